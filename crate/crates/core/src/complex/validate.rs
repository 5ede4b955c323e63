use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::{heron_area, tri_edges, Edge, MetricComplex, DEGENERACY_TOLERANCE};

/// Outcome of [`validate`]: every failed check with the offending entities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub triangle_count: usize,
    pub euler_characteristic: i64,
    pub closed_manifold: bool,
    pub boundary_edges: Vec<Edge>,
    pub nonmanifold_edges: Vec<Edge>,
    /// Vertices whose link is not a single cycle of length >= 3.
    pub bad_vertex_links: Vec<usize>,
    pub isolated_vertices: Vec<usize>,
    /// Triangles repeating the vertex set of an earlier triangle.
    pub duplicate_triangles: Vec<usize>,
    pub degenerate_triangles: Vec<usize>,
    pub obtuse_triangles: usize,
    pub connected_components: usize,
    pub consistently_oriented: bool,
    /// Only decided for closed manifolds.
    pub orientable: Option<bool>,
    /// Only for connected, closed, orientable surfaces.
    pub genus: Option<i64>,
}

impl ValidationReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.triangle_count == 0 {
            out.push("no triangles".to_string());
        }
        let mut list = |name: &str, n: usize| {
            if n > 0 {
                out.push(format!("{n} {name}"));
            }
        };
        list("boundary edges", self.boundary_edges.len());
        list("non-manifold edges", self.nonmanifold_edges.len());
        list("vertices with a broken link", self.bad_vertex_links.len());
        list("isolated vertices", self.isolated_vertices.len());
        list("duplicate triangles", self.duplicate_triangles.len());
        out
    }
}

/// Checks the closed-manifold conditions (every edge in exactly two
/// triangles, every vertex link a single cycle) and reports topology.
pub fn validate(c: &MetricComplex) -> ValidationReport {
    let edge_tris = c.edge_triangles();
    let mut boundary_edges = Vec::new();
    let mut nonmanifold_edges = Vec::new();
    for (e, ts) in &edge_tris {
        match ts.len() {
            1 => boundary_edges.push(*e),
            2 => {}
            _ => nonmanifold_edges.push(*e),
        }
    }

    let mut seen = BTreeSet::new();
    let mut duplicate_triangles = Vec::new();
    for (t, tri) in c.triangles().iter().enumerate() {
        let mut key = *tri;
        key.sort_unstable();
        if !seen.insert(key) {
            duplicate_triangles.push(t);
        }
    }

    let star = c.vertex_triangles();
    let mut isolated_vertices = Vec::new();
    let mut bad_vertex_links = Vec::new();
    for (v, tris) in star.iter().enumerate() {
        if tris.is_empty() {
            isolated_vertices.push(v);
        } else if !link_is_cycle(c, v, tris) {
            bad_vertex_links.push(v);
        }
    }

    let mut degenerate_triangles = Vec::new();
    let mut obtuse_triangles = 0;
    for t in 0..c.triangle_count() {
        let mut l = c.triangle_lengths(t);
        l.sort_by(f64::total_cmp);
        if heron_area(l[0], l[1], l[2]) <= DEGENERACY_TOLERANCE * l[2] * l[2] {
            degenerate_triangles.push(t);
        } else if l[0] * l[0] + l[1] * l[1] < l[2] * l[2] * (1.0 - 1e-12) {
            obtuse_triangles += 1;
        }
    }

    let closed_manifold = c.triangle_count() > 0
        && boundary_edges.is_empty()
        && nonmanifold_edges.is_empty()
        && bad_vertex_links.is_empty()
        && isolated_vertices.is_empty()
        && duplicate_triangles.is_empty();

    let connected_components = c.connected_components();
    let euler_characteristic = c.euler_characteristic();
    let orientable = closed_manifold.then(|| is_orientable(c, &edge_tris));
    let genus = match orientable {
        Some(true) if connected_components == 1 => Some((2 - euler_characteristic) / 2),
        _ => None,
    };

    ValidationReport {
        vertex_count: c.vertex_count(),
        edge_count: c.edge_count(),
        triangle_count: c.triangle_count(),
        euler_characteristic,
        closed_manifold,
        boundary_edges,
        nonmanifold_edges,
        bad_vertex_links,
        isolated_vertices,
        duplicate_triangles,
        degenerate_triangles,
        obtuse_triangles,
        connected_components,
        consistently_oriented: c.is_consistently_oriented(),
        orientable,
        genus,
    }
}

/// The link of `v` (opposite edges of its triangles, as a multigraph) must be
/// one cycle through at least three vertices.
fn link_is_cycle(c: &MetricComplex, v: usize, tris: &[usize]) -> bool {
    if tris.len() < 3 {
        return false;
    }
    let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let link: Vec<(usize, usize)> = tris
        .iter()
        .map(|&t| {
            let tri = c.triangles()[t];
            let i = tri.iter().position(|&x| x == v).unwrap();
            (tri[(i + 1) % 3], tri[(i + 2) % 3])
        })
        .collect();
    for (k, &(a, b)) in link.iter().enumerate() {
        incident.entry(a).or_default().push(k);
        incident.entry(b).or_default().push(k);
    }
    if incident.values().any(|ks| ks.len() != 2) {
        return false;
    }
    // walk the cycle from the first link edge
    let mut visited = vec![false; link.len()];
    let (start, mut at) = link[0];
    visited[0] = true;
    let mut count = 1;
    while at != start {
        let next = incident[&at].iter().copied().find(|&k| !visited[k]);
        let Some(k) = next else { return false };
        visited[k] = true;
        count += 1;
        let (a, b) = link[k];
        at = if a == at { b } else { a };
    }
    count == link.len()
}

fn is_orientable(c: &MetricComplex, edge_tris: &BTreeMap<Edge, Vec<usize>>) -> bool {
    let dir = |t: usize, e: &Edge| -> i8 {
        let found = tri_edges(&c.triangles()[t])
            .into_iter()
            .find(|&(a, b)| Edge::new(a, b) == *e)
            .expect("edge belongs to triangle");
        if found.0 == e.lo() {
            1
        } else {
            -1
        }
    };
    let mut sign: Vec<i8> = vec![0; c.triangle_count()];
    let mut neighbours: Vec<Vec<(usize, Edge)>> = vec![Vec::new(); c.triangle_count()];
    for (e, ts) in edge_tris {
        if let [t1, t2] = ts[..] {
            neighbours[t1].push((t2, *e));
            neighbours[t2].push((t1, *e));
        }
    }
    for root in 0..c.triangle_count() {
        if sign[root] != 0 {
            continue;
        }
        sign[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            for &(u, e) in &neighbours[t] {
                let want = -dir(t, &e) * dir(u, &e) * sign[t];
                if sign[u] == 0 {
                    sign[u] = want;
                    queue.push_back(u);
                } else if sign[u] != want {
                    return false;
                }
            }
        }
    }
    true
}
