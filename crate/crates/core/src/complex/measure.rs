use log::warn;
use thiserror::Error;

use crate::linalg::cayley_menger_det;

use super::distance;

/// Simplices whose k-volume falls below this fraction of `diam^k` are
/// treated as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Triangles with area below this fraction of `diam²` trigger a warning.
pub const NEAR_DEGENERATE_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate triangle with sides ({0}, {1}, {2})")]
    DegenerateTriangle(f64, f64, f64),
    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),
}

/// A simplex of dimension 0..=3 described by its pairwise distances and,
/// for embedded simplices, its vertex coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<usize>,
    distances: Vec<Vec<f64>>,
    points: Option<Vec<[f64; 3]>>,
}

impl Simplex {
    pub fn from_points(points: &[[f64; 3]]) -> Self {
        assert!((1..=4).contains(&points.len()), "simplex needs 1 to 4 vertices");
        let distances = points
            .iter()
            .map(|p| points.iter().map(|q| distance(p, q)).collect())
            .collect();
        Simplex {
            vertices: (0..points.len()).collect(),
            distances,
            points: Some(points.to_vec()),
        }
    }

    /// Abstract simplex from a symmetric distance matrix.
    pub fn from_distances(distances: Vec<Vec<f64>>) -> Self {
        let n = distances.len();
        assert!((1..=4).contains(&n), "simplex needs 1 to 4 vertices");
        assert!(distances.iter().all(|row| row.len() == n), "distance matrix must be square");
        Simplex { vertices: (0..n).collect(), distances, points: None }
    }

    pub fn with_vertices(mut self, vertices: Vec<usize>) -> Self {
        assert_eq!(vertices.len(), self.distances.len());
        self.vertices = vertices;
        self
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn points(&self) -> Option<&[[f64; 3]]> {
        self.points.as_deref()
    }

    pub fn dimension(&self) -> usize {
        self.distances.len() - 1
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i][j]
    }

    pub fn diameter(&self) -> f64 {
        self.distances
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    /// k-dimensional volume (length, area, volume; 1 for a point).
    pub fn volume(&self) -> f64 {
        simplex_volume(&self.distances)
    }

    pub fn is_degenerate(&self) -> bool {
        let k = self.dimension();
        k > 0 && self.volume() <= DEGENERACY_TOLERANCE * self.diameter().powi(k as i32)
    }

    /// Munkres thickness: distance from the barycenter to the boundary over
    /// the diameter. Zero for degenerate simplices.
    ///
    /// The barycenter has barycentric weight `1/(k+1)`, so its distance to the
    /// hyperplane of facet `i` is `h_i / (k+1) = k V / ((k+1) F_i)`; the
    /// boundary distance is the minimum over facets.
    pub fn thickness(&self) -> f64 {
        let k = self.dimension();
        if k == 0 {
            return 0.0;
        }
        if self.is_degenerate() {
            warn!("degenerate {k}-simplex {:?}: thickness set to 0", self.vertices);
            return 0.0;
        }
        let volume = self.volume();
        let largest_facet = (0..=k)
            .map(|skip| {
                let keep: Vec<usize> = (0..=k).filter(|&i| i != skip).collect();
                let sub: Vec<Vec<f64>> = keep
                    .iter()
                    .map(|&i| keep.iter().map(|&j| self.distances[i][j]).collect())
                    .collect();
                simplex_volume(&sub)
            })
            .fold(0.0, f64::max);
        k as f64 * volume / ((k + 1) as f64 * largest_facet * self.diameter())
    }

    /// Circumradius of a 2-simplex.
    pub fn circumradius(&self) -> Result<f64, GeometryError> {
        assert_eq!(self.dimension(), 2, "circumradius is defined here for triangles only");
        let d = &self.distances;
        circumradius(d[1][2], d[0][2], d[0][1])
    }
}

fn simplex_volume(distances: &[Vec<f64>]) -> f64 {
    let k = distances.len() - 1;
    match k {
        0 => 1.0,
        1 => distances[0][1],
        2 => heron_area(distances[1][2], distances[0][2], distances[0][1]),
        _ => {
            let det = cayley_menger_det(distances);
            let sign = if (k + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
            let factorial: f64 = (1..=k).map(|i| i as f64).product();
            let v2 = sign * det / (2f64.powi(k as i32) * factorial * factorial);
            v2.max(0.0).sqrt()
        }
    }
}

/// Triangle area from side lengths, using Kahan's cancellation-free
/// arrangement of Heron's formula. Returns 0 if the sides violate the
/// triangle inequality.
pub fn heron_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p <= 0.0 {
        0.0
    } else {
        0.25 * p.sqrt()
    }
}

/// Angle opposite `opposite` in a triangle with the other two sides
/// `adjacent_a`, `adjacent_b`.
pub fn triangle_angle(adjacent_a: f64, adjacent_b: f64, opposite: f64) -> f64 {
    let cos = (adjacent_a * adjacent_a + adjacent_b * adjacent_b - opposite * opposite)
        / (2.0 * adjacent_a * adjacent_b);
    cos.clamp(-1.0, 1.0).acos()
}

/// Circumradius `abc / 4A` of a triangle with the given side lengths.
pub fn circumradius(a: f64, b: f64, c: f64) -> Result<f64, GeometryError> {
    let area = heron_area(a, b, c);
    let diam = a.max(b).max(c);
    if area <= DEGENERACY_TOLERANCE * diam * diam {
        return Err(GeometryError::DegenerateTriangle(a, b, c));
    }
    if area < NEAR_DEGENERATE_TOLERANCE * diam * diam {
        warn!("near-degenerate triangle with sides ({a}, {b}, {c})");
    }
    Ok(a * b * c / (4.0 * area))
}

/// Bordered Cayley-Menger determinant of four points from their 4×4
/// distance matrix. Zero exactly when the points lie in a Euclidean plane;
/// for a genuine tetrahedron it equals `288 V²`.
pub fn cayley_menger(d: &[[f64; 4]; 4]) -> Result<f64, GeometryError> {
    let scale = d.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 0..4 {
        if d[i][i] != 0.0 {
            return Err(GeometryError::InvalidDistanceMatrix(format!("nonzero diagonal entry {i}")));
        }
        for j in i + 1..4 {
            if !(d[i][j].is_finite() && d[i][j] > 0.0) {
                return Err(GeometryError::InvalidDistanceMatrix(format!(
                    "distance ({i}, {j}) = {} is not positive",
                    d[i][j]
                )));
            }
            if (d[i][j] - d[j][i]).abs() > 1e-12 * scale {
                return Err(GeometryError::InvalidDistanceMatrix(format!("asymmetric entry ({i}, {j})")));
            }
        }
    }
    let rows: Vec<Vec<f64>> = d.iter().map(|r| r.to_vec()).collect();
    Ok(cayley_menger_det(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    // Oracle: barycenter-to-facet-line distances computed from coordinates.
    fn triangle_thickness_by_coordinates(p: [[f64; 2]; 3]) -> f64 {
        let b = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
        let mut best = f64::INFINITY;
        let mut diam: f64 = 0.0;
        for i in 0..3 {
            let (u, v) = (p[i], p[(i + 1) % 3]);
            let (dx, dy) = (v[0] - u[0], v[1] - u[1]);
            let len = dx.hypot(dy);
            diam = diam.max(len);
            let cross = (dx * (b[1] - u[1]) - dy * (b[0] - u[0])).abs();
            best = best.min(cross / len);
        }
        best / diam
    }

    #[test]
    fn equilateral_triangle_thickness() {
        let s = Simplex::from_distances(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        let expected = 3f64.sqrt() / 6.0;
        assert!(rel(s.thickness(), expected) < 1e-12);
        let oracle = triangle_thickness_by_coordinates([[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]);
        assert!(rel(oracle, expected) < 1e-12);
    }

    #[test]
    fn scalene_triangle_matches_coordinate_oracle() {
        let p = [[0.0, 0.0], [4.0, 0.0], [0.7, 1.3]];
        let s = Simplex::from_points(&p.map(|q| [q[0], q[1], 0.0]));
        assert!(rel(s.thickness(), triangle_thickness_by_coordinates(p)) < 1e-12);
    }

    #[test]
    fn collinear_triangle_has_zero_thickness() {
        let s = Simplex::from_distances(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ]);
        assert!(s.is_degenerate());
        assert_eq!(s.thickness(), 0.0);
    }

    #[test]
    fn regular_tetrahedron_thickness() {
        let h = 3f64.sqrt() / 2.0;
        let pts = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.5, h, 0.0],
            [0.5, h / 3.0, (2.0f64 / 3.0).sqrt()],
        ];
        let s = Simplex::from_points(&pts);
        // centroid sits at a quarter of the height sqrt(2/3) above each face
        let expected = (2.0f64 / 3.0).sqrt() / 4.0;
        assert!(rel(s.thickness(), expected) < 1e-12);
        assert!(rel(s.volume(), 1.0 / (6.0 * 2f64.sqrt())) < 1e-12);
    }

    #[test]
    fn segment_thickness_is_half() {
        let s = Simplex::from_distances(vec![vec![0.0, 3.0], vec![3.0, 0.0]]);
        assert_eq!(s.dimension(), 1);
        assert!(rel(s.thickness(), 0.5) < 1e-15);
    }

    #[test]
    fn circumradius_examples() {
        assert!(rel(circumradius(1.0, 1.0, 1.0).unwrap(), 1.0 / 3f64.sqrt()) < 1e-12);
        assert!(rel(circumradius(3.0, 4.0, 5.0).unwrap(), 2.5) < 1e-12);
        // near-degenerate: finite but large
        let r = circumradius(1.0, 1.0, 1.999).unwrap();
        let area = heron_area(1.0, 1.0, 1.999);
        assert!(rel(r, 1.999 / (4.0 * area)) < 1e-12);
        assert!(r > 10.0);
        assert!(matches!(circumradius(1.0, 1.0, 2.0), Err(GeometryError::DegenerateTriangle(..))));
    }

    #[test]
    fn cayley_menger_planar_square() {
        let s = 2f64.sqrt();
        let d = [
            [0.0, 1.0, s, 1.0],
            [1.0, 0.0, 1.0, s],
            [s, 1.0, 0.0, 1.0],
            [1.0, s, 1.0, 0.0],
        ];
        assert!(cayley_menger(&d).unwrap().abs() < 1e-12);
    }

    #[test]
    fn cayley_menger_regular_tetrahedron() {
        let d = [
            [0.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, 1.0, 1.0],
            [1.0, 1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0, 0.0],
        ];
        let v = 1.0 / (6.0 * 2f64.sqrt());
        let cm = cayley_menger(&d).unwrap();
        assert!(rel(cm, 288.0 * v * v) < 1e-12);
        assert!(rel(cm, 4.0) < 1e-12);
    }

    #[test]
    fn cayley_menger_rejects_collapsed_pair() {
        let d = [
            [0.0, 0.0, 1.0, 1.0],
            [0.0, 0.0, 1.0, 1.0],
            [1.0, 1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0, 0.0],
        ];
        assert!(matches!(cayley_menger(&d), Err(GeometryError::InvalidDistanceMatrix(_))));
    }
}
