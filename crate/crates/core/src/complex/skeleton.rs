use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{ComplexError, MetricComplex};

#[derive(Copy, Clone, PartialEq)]
struct Visit {
    dist: f64,
    vertex: usize,
}

impl Eq for Visit {}

impl Ord for Visit {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| self.vertex.cmp(&other.vertex))
    }
}

impl PartialOrd for Visit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn adjacency(c: &MetricComplex) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); c.vertex_count()];
    for (e, l) in c.edges() {
        adj[e.lo()].push((e.hi(), l));
        adj[e.hi()].push((e.lo(), l));
    }
    adj
}

fn shortest_paths_from(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Visit { dist: 0.0, vertex: source });
    while let Some(Visit { dist: d, vertex }) = heap.pop() {
        if d > dist[vertex] {
            continue;
        }
        for &(next, w) in &adj[vertex] {
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Visit { dist: nd, vertex: next });
            }
        }
    }
    dist
}

/// Largest weighted shortest-path distance between two vertices of the
/// 1-skeleton. This bounds the intrinsic diameter of the surface from above.
pub fn skeleton_diameter(c: &MetricComplex) -> Result<f64, ComplexError> {
    if c.edge_count() == 0 {
        return Err(ComplexError::Empty);
    }
    let components = c.connected_components();
    if components > 1 {
        return Err(ComplexError::Disconnected { components });
    }
    let adj = adjacency(c);
    let diameter = (0..c.vertex_count())
        .into_par_iter()
        .map(|s| shortest_paths_from(&adj, s).into_iter().fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    Ok(diameter)
}
