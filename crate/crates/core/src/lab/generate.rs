use std::collections::HashMap;

use thiserror::Error;

use crate::complex::{Edge, MetricComplex};

/// Largest icosphere level accepted (level 7 has 163 842 vertices).
pub const MAX_ICOSPHERE_LEVEL: u32 = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("icosphere level {0} exceeds the maximum of {MAX_ICOSPHERE_LEVEL}")]
    LevelTooLarge(u32),
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("flat torus needs at least 3 x 3 squares to be a simplicial complex, got {0} x {1}")]
    TorusTooSmall(usize, usize),
    #[error("edge length must be positive and finite, got {0}")]
    InvalidEdge(f64),
}

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
];

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    p.map(|x| x / n)
}

/// Icosahedron subdivided `level` times (each triangle split into four at
/// its edge midpoints), with every vertex projected onto the sphere of the
/// given radius centred at the origin.
pub fn gen_icosphere(level: u32, radius: f64) -> Result<MetricComplex, GenerateError> {
    if level > MAX_ICOSPHERE_LEVEL {
        return Err(GenerateError::LevelTooLarge(level));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(GenerateError::InvalidRadius(radius));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut points: Vec<[f64; 3]> = [
        [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
        [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
        [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize)
    .collect();
    let mut faces = ICOSAHEDRON_FACES.to_vec();

    for _ in 0..level {
        let mut midpoint: HashMap<Edge, usize> = HashMap::new();
        let mut split = |a: usize, b: usize, points: &mut Vec<[f64; 3]>| -> usize {
            *midpoint.entry(Edge::new(a, b)).or_insert_with(|| {
                let (p, q) = (points[a], points[b]);
                points.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                points.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = split(a, b, &mut points);
            let bc = split(b, c, &mut points);
            let ca = split(c, a, &mut points);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let points = points.into_iter().map(|p| p.map(|x| x * radius)).collect();
    Ok(MetricComplex::from_embedding(points, faces).expect("icosphere is a valid complex"))
}

/// Regular icosahedron with the given edge length.
pub fn icosahedron(edge: f64) -> Result<MetricComplex, GenerateError> {
    if !(edge.is_finite() && edge > 0.0) {
        return Err(GenerateError::InvalidEdge(edge));
    }
    // circumradius of the regular icosahedron is edge * sin(2π/5)
    gen_icosphere(0, edge * (2.0 * std::f64::consts::PI / 5.0).sin())
}

/// Boundary of the regular tetrahedron with the given edge length.
pub fn tetrahedron(edge: f64) -> Result<MetricComplex, GenerateError> {
    if !(edge.is_finite() && edge > 0.0) {
        return Err(GenerateError::InvalidEdge(edge));
    }
    let s = edge / 8f64.sqrt();
    let points = vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    let faces = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    Ok(MetricComplex::from_embedding(points, faces).expect("tetrahedron is a valid complex"))
}

/// Abstract flat torus: an `nx × ny` grid of unit squares with periodic
/// identification, each square split along its (i, j)–(i+1, j+1) diagonal.
/// Every vertex has degree 6 and every triangle side lengths (1, 1, √2).
pub fn gen_flat_torus(nx: usize, ny: usize) -> Result<MetricComplex, GenerateError> {
    if nx < 3 || ny < 3 {
        return Err(GenerateError::TorusTooSmall(nx, ny));
    }
    let id = |i: usize, j: usize| (i % nx) + nx * (j % ny);
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    let mut lengths = Vec::with_capacity(3 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
            lengths.push((v00, v10, 1.0));
            lengths.push((v00, v01, 1.0));
            lengths.push((v00, v11, std::f64::consts::SQRT_2));
        }
    }
    Ok(MetricComplex::from_lengths(nx * ny, triangles, lengths).expect("torus grid is a valid complex"))
}
