//! Metric simplicial 2-complexes: triangulated surfaces carrying a length
//! on every edge, optionally realized in R³.

mod io;
mod measure;
mod skeleton;
mod validate;

pub use io::{parse_metric_json, parse_off, MetricJson};
pub use measure::{
    cayley_menger, circumradius, heron_area, triangle_angle, GeometryError, Simplex,
    DEGENERACY_TOLERANCE, NEAR_DEGENERATE_TOLERANCE,
};
pub use skeleton::skeleton_diameter;
pub use validate::{validate, ValidationReport};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative slack allowed before a triangle-inequality violation is reported.
pub const TRIANGLE_INEQUALITY_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("non-triangle face at line {line}: face has {count} vertices")]
    NonTriangleFace { line: usize, count: usize },
    #[error("repeated vertex {vertex} in triangle {triangle}")]
    RepeatedVertex { triangle: usize, vertex: usize },
    #[error("triangle {triangle} references vertex {vertex}, but the complex has {count} vertices")]
    VertexOutOfRange { triangle: usize, vertex: usize, count: usize },
    #[error("missing edge length for edge {0}")]
    MissingEdgeLength(Edge),
    #[error("conflicting edge lengths for edge {edge}: {first} vs {second}")]
    ConflictingEdgeLength { edge: Edge, first: f64, second: f64 },
    #[error("edge {edge} has non-positive or non-finite length {length}")]
    NonPositiveLength { edge: Edge, length: f64 },
    #[error("triangle inequality violated in triangle {triangle} {vertices:?} with side lengths {lengths:?}")]
    TriangleInequality { triangle: usize, vertices: [usize; 3], lengths: [f64; 3] },
    #[error("invalid coordinate for vertex {0}")]
    InvalidCoordinate(usize),
    #[error("invalid metric JSON: {0}")]
    Json(String),
    #[error("complex has no edges")]
    Empty,
    #[error("complex is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("{0}")]
    Geometry(#[from] GeometryError),
}

/// Unordered vertex pair, stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(usize, usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn lo(&self) -> usize {
        self.0
    }

    pub fn hi(&self) -> usize {
        self.1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint that is not `v`.
    pub fn other(&self, v: usize) -> Option<usize> {
        if self.0 == v {
            Some(self.1)
        } else if self.1 == v {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// A triangulated surface with per-edge lengths.
///
/// Immutable after construction. Every edge referenced by a triangle carries
/// a strictly positive length and the three lengths of every triangle satisfy
/// the triangle inequality (degenerate equality is tolerated and reported by
/// [`validate`]). When an embedding is present the stored lengths are the
/// Euclidean distances of the coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricComplex {
    vertex_count: usize,
    triangles: Vec<[usize; 3]>,
    lengths: BTreeMap<Edge, f64>,
    embedding: Option<Vec<[f64; 3]>>,
    oriented: bool,
}

impl MetricComplex {
    /// Embedded complex; edge lengths are computed from the coordinates.
    pub fn from_embedding(
        points: Vec<[f64; 3]>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self, ComplexError> {
        for (i, p) in points.iter().enumerate() {
            if p.iter().any(|x| !x.is_finite()) {
                return Err(ComplexError::InvalidCoordinate(i));
            }
        }
        check_triangles(points.len(), &triangles)?;
        let mut lengths = BTreeMap::new();
        for tri in &triangles {
            for (a, b) in tri_edges(tri) {
                lengths
                    .entry(Edge::new(a, b))
                    .or_insert_with(|| distance(&points[a], &points[b]));
            }
        }
        let complex = MetricComplex {
            vertex_count: points.len(),
            oriented: consistently_oriented(&triangles),
            triangles,
            lengths,
            embedding: Some(points),
        };
        complex.check_lengths()?;
        Ok(complex)
    }

    /// Abstract complex from explicit edge lengths `(i, j, length)`.
    ///
    /// Lengths for pairs that no triangle uses are ignored; repeated entries
    /// must agree.
    pub fn from_lengths<I>(
        vertex_count: usize,
        triangles: Vec<[usize; 3]>,
        edge_lengths: I,
    ) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        check_triangles(vertex_count, &triangles)?;
        let mut given: BTreeMap<Edge, f64> = BTreeMap::new();
        for (a, b, l) in edge_lengths {
            let e = Edge::new(a, b);
            if let Some(&prev) = given.get(&e) {
                if prev != l {
                    return Err(ComplexError::ConflictingEdgeLength { edge: e, first: prev, second: l });
                }
            }
            given.insert(e, l);
        }
        let mut lengths = BTreeMap::new();
        for tri in &triangles {
            for (a, b) in tri_edges(tri) {
                let e = Edge::new(a, b);
                let l = *given.get(&e).ok_or(ComplexError::MissingEdgeLength(e))?;
                lengths.insert(e, l);
            }
        }
        let complex = MetricComplex {
            vertex_count,
            oriented: consistently_oriented(&triangles),
            triangles,
            lengths,
            embedding: None,
        };
        complex.check_lengths()?;
        Ok(complex)
    }

    fn check_lengths(&self) -> Result<(), ComplexError> {
        for (&edge, &length) in &self.lengths {
            if !(length.is_finite() && length > 0.0) {
                return Err(ComplexError::NonPositiveLength { edge, length });
            }
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            let l = self.triangle_lengths(t);
            let mut sorted = l;
            sorted.sort_by(f64::total_cmp);
            if sorted[2] - (sorted[0] + sorted[1]) > TRIANGLE_INEQUALITY_SLACK * sorted[2] {
                return Err(ComplexError::TriangleInequality { triangle: t, vertices: *tri, lengths: l });
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.lengths.len()
    }

    /// Edges with their lengths, in ascending vertex-pair order.
    pub fn edges(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.lengths.iter().map(|(&e, &l)| (e, l))
    }

    pub fn edge_length(&self, a: usize, b: usize) -> Option<f64> {
        self.lengths.get(&Edge::new(a, b)).copied()
    }

    pub fn embedding(&self) -> Option<&[[f64; 3]]> {
        self.embedding.as_deref()
    }

    pub fn is_embedded(&self) -> bool {
        self.embedding.is_some()
    }

    /// Whether every edge is traversed at most once in each direction by
    /// the stored triangle orientations.
    pub fn is_consistently_oriented(&self) -> bool {
        self.oriented
    }

    /// Side lengths of triangle `t`; entry `i` is the side opposite the
    /// triangle's `i`-th vertex.
    pub fn triangle_lengths(&self, t: usize) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let len = |x, y| self.lengths[&Edge::new(x, y)];
        [len(b, c), len(c, a), len(a, b)]
    }

    /// Interior angle of triangle `t` at vertex `v` (law of cosines).
    pub fn corner_angle(&self, t: usize, v: usize) -> Option<f64> {
        let tri = self.triangles[t];
        let i = tri.iter().position(|&x| x == v)?;
        let l = self.triangle_lengths(t);
        Some(triangle_angle(l[(i + 1) % 3], l[(i + 2) % 3], l[i]))
    }

    pub fn triangle_simplex(&self, t: usize) -> Simplex {
        let tri = self.triangles[t];
        match &self.embedding {
            Some(pts) => Simplex::from_points(&tri.map(|v| pts[v]))
                .with_vertices(tri.to_vec()),
            None => {
                let l = self.triangle_lengths(t);
                Simplex::from_distances(vec![
                    vec![0.0, l[2], l[1]],
                    vec![l[2], 0.0, l[0]],
                    vec![l[1], l[0], 0.0],
                ])
                .with_vertices(tri.to_vec())
            }
        }
    }

    /// Map from each edge to the triangles containing it, in triangle order.
    pub fn edge_triangles(&self) -> BTreeMap<Edge, Vec<usize>> {
        let mut map: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for (a, b) in tri_edges(tri) {
                map.entry(Edge::new(a, b)).or_default().push(t);
            }
        }
        map
    }

    /// Triangles incident to each vertex, in triangle order.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut star = vec![Vec::new(); self.vertex_count];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                star[v].push(t);
            }
        }
        star
    }

    /// Number of triangles incident to each vertex.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for tri in &self.triangles {
            for &v in tri {
                deg[v] += 1;
            }
        }
        deg
    }

    /// V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.lengths.len() as i64 + self.triangles.len() as i64
    }

    /// Mesh size: the largest edge length.
    pub fn mesh_size(&self) -> Result<f64, ComplexError> {
        self.lengths
            .values()
            .copied()
            .max_by(f64::total_cmp)
            .ok_or(ComplexError::Empty)
    }

    /// The same complex with every length (and coordinate) multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> MetricComplex {
        assert!(factor > 0.0 && factor.is_finite(), "scale factor must be positive");
        MetricComplex {
            vertex_count: self.vertex_count,
            triangles: self.triangles.clone(),
            lengths: self.lengths.iter().map(|(&e, &l)| (e, l * factor)).collect(),
            embedding: self
                .embedding
                .as_ref()
                .map(|pts| pts.iter().map(|p| p.map(|x| x * factor)).collect()),
            oriented: self.oriented,
        }
    }

    /// Drops the embedding, keeping the edge lengths.
    pub fn to_abstract(&self) -> MetricComplex {
        MetricComplex { embedding: None, ..self.clone() }
    }

    /// Connected components of the 1-skeleton (isolated vertices count).
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in self.lengths.keys() {
            let (a, b) = (find(&mut parent, e.0), find(&mut parent, e.1));
            if a != b {
                parent[a] = b;
            }
        }
        (0..self.vertex_count)
            .filter(|&v| find(&mut parent, v) == v)
            .count()
    }
}

pub(crate) fn tri_edges(tri: &[usize; 3]) -> [(usize, usize); 3] {
    [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])]
}

pub(crate) fn distance(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let dz = p[2] - q[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

fn check_triangles(vertex_count: usize, triangles: &[[usize; 3]]) -> Result<(), ComplexError> {
    for (t, tri) in triangles.iter().enumerate() {
        for &v in tri {
            if v >= vertex_count {
                return Err(ComplexError::VertexOutOfRange { triangle: t, vertex: v, count: vertex_count });
            }
        }
        if tri[0] == tri[1] || tri[0] == tri[2] {
            return Err(ComplexError::RepeatedVertex { triangle: t, vertex: tri[0] });
        }
        if tri[1] == tri[2] {
            return Err(ComplexError::RepeatedVertex { triangle: t, vertex: tri[1] });
        }
    }
    Ok(())
}

fn consistently_oriented(triangles: &[[usize; 3]]) -> bool {
    let mut seen = BTreeSet::new();
    triangles
        .iter()
        .flat_map(tri_edges)
        .all(|directed| seen.insert(directed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetrahedron() -> MetricComplex {
        let tris = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
        let lengths = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].map(|(a, b)| (a, b, 1.0));
        MetricComplex::from_lengths(4, tris, lengths).unwrap()
    }

    #[test]
    fn edge_is_unordered() {
        assert_eq!(Edge::new(3, 1), Edge::new(1, 3));
        assert_eq!(Edge::new(3, 1).other(3), Some(1));
        assert_eq!(Edge::new(3, 1).other(2), None);
    }

    #[test]
    fn tetrahedron_counts() {
        let c = tetrahedron();
        assert_eq!(c.edge_count(), 6);
        assert_eq!(c.euler_characteristic(), 2);
        assert!(c.is_consistently_oriented());
        assert_eq!(c.vertex_degrees(), vec![3, 3, 3, 3]);
        assert_eq!(c.mesh_size().unwrap(), 1.0);
    }

    #[test]
    fn missing_length_is_reported() {
        let err = MetricComplex::from_lengths(3, vec![[0, 1, 2]], [(0, 1, 1.0), (1, 2, 1.0)]).unwrap_err();
        assert_eq!(err, ComplexError::MissingEdgeLength(Edge::new(0, 2)));
    }

    #[test]
    fn conflicting_lengths_are_reported() {
        let err = MetricComplex::from_lengths(
            3,
            vec![[0, 1, 2]],
            [(0, 1, 1.0), (1, 0, 2.0), (1, 2, 1.0), (0, 2, 1.0)],
        )
        .unwrap_err();
        assert!(matches!(err, ComplexError::ConflictingEdgeLength { .. }));
    }

    #[test]
    fn triangle_inequality_violation() {
        let err = MetricComplex::from_lengths(3, vec![[0, 1, 2]], [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)])
            .unwrap_err();
        assert!(matches!(err, ComplexError::TriangleInequality { triangle: 0, .. }));
        assert!(err.to_string().contains("triangle inequality"));
    }

    #[test]
    fn degenerate_triangle_is_accepted() {
        let c = MetricComplex::from_lengths(3, vec![[0, 1, 2]], [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)]);
        assert!(c.is_ok());
    }

    #[test]
    fn repeated_and_out_of_range_vertices() {
        let pts = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(matches!(
            MetricComplex::from_embedding(pts.clone(), vec![[0, 1, 1]]),
            Err(ComplexError::RepeatedVertex { .. })
        ));
        assert!(matches!(
            MetricComplex::from_embedding(pts, vec![[0, 1, 5]]),
            Err(ComplexError::VertexOutOfRange { vertex: 5, .. })
        ));
    }

    #[test]
    fn coincident_points_rejected() {
        let pts = vec![[0.0; 3], [0.0; 3], [0.0, 1.0, 0.0]];
        assert!(matches!(
            MetricComplex::from_embedding(pts, vec![[0, 1, 2]]),
            Err(ComplexError::NonPositiveLength { .. })
        ));
    }

    #[test]
    fn scaling_multiplies_lengths() {
        let c = tetrahedron().scaled(2.5);
        assert!(c.edges().all(|(_, l)| l == 2.5));
    }

    #[test]
    fn corner_angles_of_right_triangle() {
        let pts = vec![[0.0; 3], [3.0, 0.0, 0.0], [0.0, 4.0, 0.0]];
        let c = MetricComplex::from_embedding(pts, vec![[0, 1, 2]]).unwrap();
        let right = c.corner_angle(0, 0).unwrap();
        assert!((right - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let sum: f64 = (0..3).map(|v| c.corner_angle(0, v).unwrap()).sum();
        assert!((sum - std::f64::consts::PI).abs() < 1e-12);
    }
}
