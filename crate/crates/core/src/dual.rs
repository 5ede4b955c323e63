//! Circumcentric dual cell complex of a closed triangulated surface.
//!
//! Each triangle contributes a dual vertex weighted by its circumradius, each
//! primal edge a dual edge of length `r_i + r_j`, and each primal vertex a
//! dual 2-cell whose vertices are the surrounding triangles in rotational
//! order.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{circumradius, validate, ComplexError, Edge, MetricComplex};

/// Pairs of cell vertices closer than this fraction of the cell diameter are
/// reported as coincident.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualError {
    #[error("dual complex needs a closed triangulated surface: {}", .0.join(", "))]
    NotClosed(Vec<String>),
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("extrinsic cell metric requires an embedded complex")]
    NoEmbedding,
    #[error("no dual cell for vertex {0}")]
    NoSuchCell(usize),
    #[error("no dual vertex {0}")]
    NoSuchVertex(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// How distances inside a dual cell are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellMode {
    /// Euclidean distances between circumcenters in R³.
    Extrinsic,
    /// Cone-metric distances in the developed star of the primal vertex.
    IntrinsicStar,
}

impl CellMode {
    /// Extrinsic when the complex carries coordinates.
    pub fn default_for(c: &MetricComplex) -> Self {
        if c.is_embedded() {
            CellMode::Extrinsic
        } else {
            CellMode::IntrinsicStar
        }
    }
}

impl std::fmt::Display for CellMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CellMode::Extrinsic => "extrinsic",
            CellMode::IntrinsicStar => "intrinsic-star",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualVertex {
    pub triangle: usize,
    pub circumradius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circumcenter: Option<[f64; 3]>,
    pub obtuse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    pub primal: Edge,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCell {
    pub primal_vertex: usize,
    /// Dual vertices in rotational order around the primal vertex.
    pub cycle: Vec<usize>,
}

/// An oriented dual edge leaving `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Direction {
    pub base: usize,
    pub target: usize,
    pub edge: usize,
}

impl Direction {
    pub fn reversed(&self) -> Direction {
        Direction { base: self.target, target: self.base, edge: self.edge }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualComplex {
    primal: MetricComplex,
    vertices: Vec<DualVertex>,
    edges: Vec<DualEdge>,
    cells: Vec<DualCell>,
    /// Dual edges at each dual vertex, ordered like the triangle's sides.
    incident: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellMetric {
    /// The cell, indexed by its primal vertex.
    pub cell: usize,
    pub mode: CellMode,
    /// Distances between the cell's dual vertices, in cycle order.
    pub distances: Vec<Vec<f64>>,
    /// Distances from the primal vertex to each dual vertex.
    pub apex: Vec<f64>,
    pub coincident_pairs: usize,
    /// Cycle positions whose circumcenter lies outside the vertex star; their
    /// distances fall back to dual-skeleton path lengths.
    pub outside_star: Vec<usize>,
}

#[derive(Serialize)]
struct DualJson<'a> {
    dual_vertices: &'a [DualVertex],
    dual_edges: Vec<(usize, usize, f64)>,
    cells: Vec<&'a [usize]>,
}

/// Builds the circumcentric dual of a closed triangulated surface.
pub fn build_dual(c: &MetricComplex) -> Result<DualComplex, DualError> {
    let report = validate(c);
    if !report.closed_manifold {
        return Err(DualError::NotClosed(report.failures()));
    }

    let mut vertices = Vec::with_capacity(c.triangle_count());
    for t in 0..c.triangle_count() {
        let [a, b, cc] = c.triangle_lengths(t);
        let r = circumradius(a, b, cc).map_err(|_| DualError::DegenerateTriangle(t))?;
        let mut sides = [a, b, cc];
        sides.sort_by(f64::total_cmp);
        vertices.push(DualVertex {
            triangle: t,
            circumradius: r,
            circumcenter: c.embedding().map(|pts| circumcenter(c.triangles()[t].map(|v| pts[v]))),
            obtuse: sides[0] * sides[0] + sides[1] * sides[1] < sides[2] * sides[2] * (1.0 - 1e-12),
        });
    }

    let mut edges = Vec::with_capacity(c.edge_count());
    let mut edge_index = BTreeMap::new();
    for (e, ts) in c.edge_triangles() {
        let (a, b) = (ts[0], ts[1]);
        edge_index.insert(e, edges.len());
        edges.push(DualEdge {
            a,
            b,
            primal: e,
            length: vertices[a].circumradius + vertices[b].circumradius,
        });
    }
    let incident = c
        .triangles()
        .iter()
        .map(|&[x, y, z]| [Edge::new(y, z), Edge::new(z, x), Edge::new(x, y)].map(|e| edge_index[&e]))
        .collect();

    let star = c.vertex_triangles();
    let cells = (0..c.vertex_count())
        .map(|v| DualCell { primal_vertex: v, cycle: rotational_order(c, v, &star[v]) })
        .collect();

    Ok(DualComplex { primal: c.clone(), vertices, edges, cells, incident })
}

/// Triangles around `v`, each sharing an edge through `v` with the next.
fn rotational_order(c: &MetricComplex, v: usize, tris: &[usize]) -> Vec<usize> {
    let after = |t: usize| -> (usize, usize) {
        let tri = c.triangles()[t];
        let i = tri.iter().position(|&x| x == v).expect("vertex in its star");
        (tri[(i + 1) % 3], tri[(i + 2) % 3])
    };
    let mut order = vec![tris[0]];
    let (_, mut w) = after(tris[0]);
    while order.len() < tris.len() {
        let prev = *order.last().unwrap();
        let next = tris
            .iter()
            .copied()
            .find(|&t| t != prev && !order.contains(&t) && c.triangles()[t].contains(&w))
            .expect("vertex link is a cycle");
        let (p, q) = after(next);
        w = if p == w { q } else { p };
        order.push(next);
    }
    order
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Circumcenter of a nondegenerate triangle in R³.
pub fn circumcenter([p, q, r]: [[f64; 3]; 3]) -> [f64; 3] {
    let (a, b) = (sub(q, p), sub(r, p));
    let n = cross(a, b);
    let nn = dot(n, n);
    let u = cross(n, a);
    let w = cross(b, n);
    let (la, lb) = (dot(a, a), dot(b, b));
    [0, 1, 2].map(|k| p[k] + (lb * u[k] + la * w[k]) / (2.0 * nn))
}

impl DualComplex {
    pub fn primal(&self) -> &MetricComplex {
        &self.primal
    }

    pub fn vertices(&self) -> &[DualVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[DualEdge] {
        &self.edges
    }

    pub fn cells(&self) -> &[DualCell] {
        &self.cells
    }

    pub fn obtuse_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.obtuse).count()
    }

    /// Largest dual edge length.
    pub fn mesh_size(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    /// The two cells containing a dual edge: those of its primal endpoints.
    pub fn edge_cells(&self, edge: usize) -> [usize; 2] {
        let e = self.edges[edge].primal;
        [e.lo(), e.hi()]
    }

    /// The three cells containing a dual vertex: those of its triangle's corners.
    pub fn vertex_cells(&self, v: usize) -> [usize; 3] {
        let mut t = self.primal.triangles()[self.vertices[v].triangle];
        t.sort_unstable();
        t
    }

    /// One direction per dual edge at `v`, each with the two cells containing it.
    pub fn directions_at(&self, v: usize) -> Result<Vec<(Direction, [usize; 2])>, DualError> {
        let edges = self.incident.get(v).ok_or(DualError::NoSuchVertex(v))?;
        Ok(edges
            .iter()
            .map(|&e| {
                let de = &self.edges[e];
                let target = if de.a == v { de.b } else { de.a };
                (Direction { base: v, target, edge: e }, self.edge_cells(e))
            })
            .collect())
    }

    /// Pairwise distances between the dual vertices of a cell.
    pub fn cell_metric(&self, cell: usize, mode: CellMode) -> Result<CellMetric, DualError> {
        let dc = self.cells.get(cell).ok_or(DualError::NoSuchCell(cell))?;
        let p = dc.cycle.len();
        let mut m = match mode {
            CellMode::Extrinsic => {
                let pts = self.primal.embedding().ok_or(DualError::NoEmbedding)?;
                let centers: Vec<[f64; 3]> =
                    dc.cycle.iter().map(|&t| self.vertices[t].circumcenter.unwrap()).collect();
                let apex = centers.iter().map(|&x| norm(sub(x, pts[cell]))).collect();
                let distances = (0..p)
                    .map(|i| (0..p).map(|j| norm(sub(centers[i], centers[j]))).collect())
                    .collect();
                CellMetric { cell, mode, distances, apex, coincident_pairs: 0, outside_star: vec![] }
            }
            CellMode::IntrinsicStar => self.intrinsic_cell(cell),
        };
        let diam = m.distances.iter().flatten().fold(0.0, |a: f64, &b| a.max(b));
        m.coincident_pairs = (0..p)
            .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
            .filter(|&(i, j)| m.distances[i][j] <= COINCIDENCE_TOLERANCE * diam)
            .count();
        Ok(m)
    }

    /// Polar coordinates (ρ, θ) of the cell's circumcenters in the developed
    /// star, together with the total cone angle and the positions whose
    /// circumcenter lies beyond the link (obtuse corner at the apex).
    fn develop(&self, cell: usize) -> (Vec<(f64, f64)>, f64, Vec<usize>) {
        let c = &self.primal;
        let cycle = &self.cells[cell].cycle;
        let mut polar = Vec::with_capacity(cycle.len());
        let mut outside = Vec::new();
        let mut theta = 0.0;
        // `w` is the spoke shared with the previous triangle
        let tri0 = c.triangles()[cycle[0]];
        let i0 = tri0.iter().position(|&x| x == cell).unwrap();
        let next0 = cycle.get(1).map(|&t| c.triangles()[t]);
        let (p0, q0) = (tri0[(i0 + 1) % 3], tri0[(i0 + 2) % 3]);
        let mut w = match next0 {
            Some(n) if n.contains(&q0) => p0,
            _ => q0,
        };
        for (k, &t) in cycle.iter().enumerate() {
            let tri = c.triangles()[t];
            let far = *tri.iter().find(|&&x| x != cell && x != w).unwrap();
            let alpha = c.corner_angle(t, cell).unwrap();
            // angle between the spoke to `w` and the circumcenter is π/2 minus
            // the corner angle opposite that spoke
            let gamma = c.corner_angle(t, far).unwrap();
            polar.push((self.vertices[t].circumradius, theta + (PI / 2.0 - gamma)));
            if alpha > PI / 2.0 * (1.0 + 1e-12) {
                outside.push(k);
            }
            theta += alpha;
            w = far;
        }
        (polar, theta, outside)
    }

    fn intrinsic_cell(&self, cell: usize) -> CellMetric {
        let (polar, cone, outside_star) = self.develop(cell);
        let p = polar.len();
        let mut distances = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in i + 1..p {
                let d = cone_distance(polar[i], polar[j], cone);
                distances[i][j] = d;
                distances[j][i] = d;
            }
        }
        if !outside_star.is_empty() {
            let cycle = &self.cells[cell].cycle;
            let step: Vec<f64> = (0..p)
                .map(|k| self.vertices[cycle[k]].circumradius + self.vertices[cycle[(k + 1) % p]].circumradius)
                .collect();
            let total: f64 = step.iter().sum();
            for &k in &outside_star {
                for j in 0..p {
                    if j == k {
                        continue;
                    }
                    let (a, b) = (k.min(j), k.max(j));
                    let forward: f64 = step[a..b].iter().sum();
                    let d = forward.min(total - forward);
                    distances[k][j] = d;
                    distances[j][k] = d;
                }
            }
            log::warn!("cell {cell}: circumcenters {outside_star:?} lie outside the vertex star");
        }
        let apex = polar.iter().map(|&(rho, _)| rho).collect();
        CellMetric {
            cell,
            mode: CellMode::IntrinsicStar,
            distances,
            apex,
            coincident_pairs: 0,
            outside_star,
        }
    }

    /// Planar polygon of a cell: the developed star rescaled to total angle
    /// 2π (intrinsic) or the circumcenters projected to their best-fit plane
    /// (extrinsic).
    fn cell_polygon(&self, cell: usize, mode: CellMode) -> Result<Vec<[f64; 2]>, DualError> {
        match mode {
            CellMode::IntrinsicStar => {
                let (polar, cone, _) = self.develop(cell);
                let s = 2.0 * PI / cone;
                Ok(polar.iter().map(|&(r, t)| [r * (s * t).cos(), r * (s * t).sin()]).collect())
            }
            CellMode::Extrinsic => {
                if !self.primal.is_embedded() {
                    return Err(DualError::NoEmbedding);
                }
                let pts: Vec<[f64; 3]> = self.cells[cell]
                    .cycle
                    .iter()
                    .map(|&t| self.vertices[t].circumcenter.unwrap())
                    .collect();
                // Newell normal
                let mut n = [0.0; 3];
                for (k, a) in pts.iter().enumerate() {
                    let b = pts[(k + 1) % pts.len()];
                    n[0] += (a[1] - b[1]) * (a[2] + b[2]);
                    n[1] += (a[2] - b[2]) * (a[0] + b[0]);
                    n[2] += (a[0] - b[0]) * (a[1] + b[1]);
                }
                let nn = norm(n);
                let n = n.map(|x| x / nn);
                let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                let u = cross(n, helper);
                let u = u.map(|x| x / norm(u));
                let v = cross(n, u);
                Ok(pts.iter().map(|&p| [dot(p, u), dot(p, v)]).collect())
            }
        }
    }

    /// Thickness of one cell: distance from the vertex barycenter to the
    /// polygon boundary over the polygon diameter.
    pub fn cell_thickness(&self, cell: usize, mode: CellMode) -> Result<f64, DualError> {
        if cell >= self.cells.len() {
            return Err(DualError::NoSuchCell(cell));
        }
        let poly = self.cell_polygon(cell, mode)?;
        let p = poly.len() as f64;
        let centroid = [
            poly.iter().map(|q| q[0]).sum::<f64>() / p,
            poly.iter().map(|q| q[1]).sum::<f64>() / p,
        ];
        let mut diam: f64 = 0.0;
        let mut inner = f64::INFINITY;
        for (k, a) in poly.iter().enumerate() {
            for b in &poly[k + 1..] {
                diam = diam.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
            inner = inner.min(point_segment_distance(centroid, *a, poly[(k + 1) % poly.len()]));
        }
        Ok(if diam > 0.0 { inner / diam } else { 0.0 })
    }

    /// Minimum cell thickness over the dual complex.
    pub fn dual_thickness(&self, mode: CellMode) -> Result<f64, DualError> {
        (0..self.cells.len()).try_fold(f64::INFINITY, |m, k| Ok(m.min(self.cell_thickness(k, mode)?)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DualJson {
            dual_vertices: &self.vertices,
            dual_edges: self.edges.iter().map(|e| (e.a, e.b, e.length)).collect(),
            cells: self.cells.iter().map(|c| c.cycle.as_slice()).collect(),
        })
        .expect("dual complex serializes")
    }
}

/// Geodesic distance between two points of a cone of total angle `cone`,
/// given in polar coordinates about the apex.
fn cone_distance((r1, t1): (f64, f64), (r2, t2): (f64, f64), cone: f64) -> f64 {
    let delta = (t1 - t2).rem_euclid(cone);
    let delta = delta.min(cone - delta);
    if delta >= PI {
        r1 + r2
    } else {
        let s = (delta / 2.0).sin();
        ((r1 - r2).powi(2) + 4.0 * r1 * r2 * s * s).sqrt()
    }
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    ((ap[0] - t * ab[0]).powi(2) + (ap[1] - t * ab[1]).powi(2)).sqrt()
}

#[cfg(test)]
impl DualComplex {
    /// Dual of a single open fan around vertex 0, for mode comparisons.
    fn fan_for_tests(pts: Vec<[f64; 3]>) -> DualComplex {
        let n = pts.len() - 1;
        let tris: Vec<[usize; 3]> = (0..n).map(|k| [0, k + 1, (k + 1) % n + 1]).collect();
        let c = MetricComplex::from_embedding(pts, tris).unwrap();
        let vertices = (0..n)
            .map(|t| {
                let [a, b, cc] = c.triangle_lengths(t);
                DualVertex {
                    triangle: t,
                    circumradius: circumradius(a, b, cc).unwrap(),
                    circumcenter: Some(circumcenter(c.triangles()[t].map(|v| c.embedding().unwrap()[v]))),
                    obtuse: false,
                }
            })
            .collect();
        DualComplex {
            vertices,
            edges: vec![],
            cells: vec![DualCell { primal_vertex: 0, cycle: (0..n).collect() }],
            incident: vec![],
            primal: c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{gen_flat_torus, gen_icosphere, icosahedron, tetrahedron};

    #[test]
    fn tetrahedron_dual_combinatorics() {
        let d = build_dual(&tetrahedron(1.0).unwrap()).unwrap();
        assert_eq!((d.vertices().len(), d.edges().len(), d.cells().len()), (4, 6, 4));
        assert!(d.cells().iter().all(|c| c.cycle.len() == 3));
    }

    #[test]
    fn icosahedron_dual() {
        let d = build_dual(&icosahedron(1.0).unwrap()).unwrap();
        assert_eq!((d.vertices().len(), d.edges().len(), d.cells().len()), (20, 30, 12));
        assert!(d.cells().iter().all(|c| c.cycle.len() == 5));
        let expected = 2.0 / 3f64.sqrt();
        assert!(d.edges().iter().all(|e| (e.length - expected).abs() < 1e-12));
    }

    #[test]
    fn open_surface_is_rejected() {
        let c = MetricComplex::from_lengths(3, vec![[0, 1, 2]], [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
            .unwrap();
        assert!(matches!(build_dual(&c), Err(DualError::NotClosed(_))));
    }

    #[test]
    fn cycles_follow_shared_edges() {
        let c = gen_icosphere(1, 1.0).unwrap();
        let d = build_dual(&c).unwrap();
        for cell in d.cells() {
            let p = cell.cycle.len();
            assert_eq!(p, c.vertex_degrees()[cell.primal_vertex]);
            for k in 0..p {
                let (s, t) = (c.triangles()[cell.cycle[k]], c.triangles()[cell.cycle[(k + 1) % p]]);
                assert_eq!(s.iter().filter(|v| t.contains(v)).count(), 2);
            }
        }
    }

    #[test]
    fn circumcenter_is_equidistant() {
        let tri = [[0.3, -1.0, 2.0], [1.5, 0.2, 0.1], [-0.4, 0.9, 1.1]];
        let o = circumcenter(tri);
        let r: Vec<f64> = tri.iter().map(|&p| norm(sub(p, o))).collect();
        assert!((r[0] - r[1]).abs() < 1e-12 && (r[1] - r[2]).abs() < 1e-12);
        let n = cross(sub(tri[1], tri[0]), sub(tri[2], tri[0]));
        assert!(dot(sub(o, tri[0]), n).abs() < 1e-12);
    }

    #[test]
    fn directions_pair_with_endpoint_cells() {
        let c = icosahedron(1.0).unwrap();
        let d = build_dual(&c).unwrap();
        for v in 0..d.vertices().len() {
            let dirs = d.directions_at(v).unwrap();
            assert_eq!(dirs.len(), 3);
            for (dir, cells) in dirs {
                let e = d.edges()[dir.edge].primal;
                assert_eq!(cells, [e.lo(), e.hi()]);
                assert_eq!(d.edge_cells(dir.reversed().edge), cells);
            }
        }
    }

    #[test]
    fn intrinsic_matches_extrinsic_on_flat_star() {
        // a flat hexagonal fan embedded in the plane: both modes agree
        let mut pts = vec![[0.0, 0.0, 0.0]];
        for k in 0..6 {
            let a = k as f64 * PI / 3.0 + 0.1 * (k % 2) as f64;
            pts.push([a.cos(), a.sin(), 0.0]);
        }
        let d = DualComplex::fan_for_tests(pts);
        let ext = d.cell_metric(0, CellMode::Extrinsic).unwrap();
        let int = d.cell_metric(0, CellMode::IntrinsicStar).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((ext.distances[i][j] - int.distances[i][j]).abs() < 1e-12);
            }
            assert!((ext.apex[i] - int.apex[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_cell_is_planar_development() {
        let d = build_dual(&gen_flat_torus(4, 4).unwrap()).unwrap();
        let m = d.cell_metric(5, CellMode::IntrinsicStar).unwrap();
        // the two triangles of each square share the square's center
        assert_eq!(m.coincident_pairs, 2);
        let mut off: Vec<f64> = m.distances.iter().flatten().copied().filter(|&x| x > 1e-9).collect();
        off.sort_by(f64::total_cmp);
        off.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let expected = [1.0, 2f64.sqrt()];
        assert_eq!(off.len(), 2);
        assert!(off.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn extrinsic_needs_embedding() {
        let d = build_dual(&gen_flat_torus(3, 3).unwrap()).unwrap();
        assert_eq!(d.cell_metric(0, CellMode::Extrinsic).unwrap_err(), DualError::NoEmbedding);
    }

    #[test]
    fn icosahedron_cells_are_regular_pentagons() {
        let d = build_dual(&icosahedron(1.0).unwrap()).unwrap();
        // unfolded across the shared edge, adjacent circumcenters are two
        // inradii apart; the chord in R³ is shorter because of the fold
        let unfolded = 1.0 / 3f64.sqrt();
        for mode in [CellMode::Extrinsic, CellMode::IntrinsicStar] {
            let m = d.cell_metric(0, mode).unwrap();
            for k in 0..5 {
                let x = m.distances[k][(k + 1) % 5];
                assert!((x - m.distances[0][1]).abs() < 1e-12, "{mode}");
            }
            if mode == CellMode::Extrinsic {
                assert!(m.distances[0][1] < unfolded);
            } else {
                assert!((m.distances[0][1] - unfolded).abs() < 1e-12);
            }
        }
        let phi = d.dual_thickness(CellMode::Extrinsic).unwrap();
        let phi0 = d.cell_thickness(0, CellMode::Extrinsic).unwrap();
        assert!((phi - phi0).abs() < 1e-12 && phi > 0.0);
    }

    #[test]
    fn json_export_shape() {
        let d = build_dual(&tetrahedron(1.0).unwrap()).unwrap();
        let j = d.to_json();
        assert_eq!(j["dual_vertices"].as_array().unwrap().len(), 4);
        assert_eq!(j["dual_edges"].as_array().unwrap().len(), 6);
        assert_eq!(j["dual_edges"][0].as_array().unwrap().len(), 3);
        assert_eq!(j["cells"].as_array().unwrap().len(), 4);
    }
}
