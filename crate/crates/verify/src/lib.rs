//! Random quadruple samplers with known embedding curvature, used as
//! independent oracles by the acceptance suite.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use ricci_core::complex::Simplex;
use ricci_core::wald::MetricQuadruple;

/// Distance matrix of four points, and its smallest face thickness.
pub fn quadruple(d: [[f64; 4]; 4]) -> (MetricQuadruple, f64) {
    let mut phi = f64::INFINITY;
    for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        let s = Simplex::from_distances(t.iter().map(|&i| t.iter().map(|&j| d[i][j]).collect()).collect());
        phi = phi.min(s.thickness());
    }
    let q = MetricQuadruple::new([d[0][1], d[0][2], d[0][3], d[1][2], d[1][3], d[2][3]]).unwrap();
    (q, phi)
}

pub fn pairwise(f: impl Fn(usize, usize) -> f64) -> [[f64; 4]; 4] {
    let mut d = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                d[i][j] = f(i, j);
            }
        }
    }
    d
}

/// Minimum face thickness accepted for a random sample.
pub const SAMPLE_THICKNESS: f64 = 0.05;

/// Geodesic quadruple on the sphere of radius `r`, inside a cap of angular
/// radius π/3 around a random center.
pub fn sphere_sample<R: Rng>(rng: &mut R, r: f64) -> MetricQuadruple {
    loop {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let a: f64 = rng.gen_range(0.0..TAU);
        let s = (1.0 - z * z).sqrt();
        let center = [s * a.cos(), s * a.sin(), z];
        let helper = if center[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u = normalize(cross(center, helper));
        let v = cross(center, u);
        let cap = PI / 3.0;
        let pts: Vec<[f64; 3]> = (0..4)
            .map(|_| {
                // uniform on the cap
                let cos_t = 1.0 - rng.gen::<f64>() * (1.0 - cap.cos());
                let sin_t = (1.0 - cos_t * cos_t).sqrt();
                let phi: f64 = rng.gen_range(0.0..TAU);
                [0, 1, 2].map(|k| cos_t * center[k] + sin_t * (phi.cos() * u[k] + phi.sin() * v[k]))
            })
            .collect();
        let d = pairwise(|i, j| r * dot(pts[i], pts[j]).clamp(-1.0, 1.0).acos());
        let (q, phi) = quadruple(d);
        if phi >= SAMPLE_THICKNESS {
            return q;
        }
    }
}

/// Quadruple in the hyperbolic plane of curvature −1, inside a disk of radius 1.
pub fn hyperbolic_sample<R: Rng>(rng: &mut R) -> MetricQuadruple {
    loop {
        let pts: Vec<[f64; 3]> = (0..4)
            .map(|_| {
                let r = rng.gen::<f64>().sqrt();
                let a: f64 = rng.gen_range(0.0..TAU);
                [r.cosh(), r.sinh() * a.cos(), r.sinh() * a.sin()]
            })
            .collect();
        let d = pairwise(|i, j| {
            let (x, y) = (pts[i], pts[j]);
            (x[0] * y[0] - x[1] * y[1] - x[2] * y[2]).max(1.0).acosh()
        });
        let (q, phi) = quadruple(d);
        if phi >= SAMPLE_THICKNESS {
            return q;
        }
    }
}

pub fn plane_sample<R: Rng>(rng: &mut R) -> MetricQuadruple {
    loop {
        let pts: Vec<[f64; 2]> = (0..4).map(|_| [rng.gen(), rng.gen()]).collect();
        let d = pairwise(|i, j| ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt());
        let (q, phi) = quadruple(d);
        if phi >= SAMPLE_THICKNESS {
            return q;
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    a.map(|x| x / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn min_thickness(q: &MetricQuadruple) -> f64 {
        let mut d = [[0.0; 4]; 4];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = q.distance(i, j);
            }
        }
        quadruple(d).1
    }

    #[test]
    fn sphere_samples_stay_in_the_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for r in [0.5, 2.0] {
            for _ in 0..50 {
                let q = sphere_sample(&mut rng, r);
                // two points in a cap of radius π/3 are at most 2π/3 apart
                assert!(q.max_distance() <= r * 2.0 * PI / 3.0 + 1e-12);
                assert!(min_thickness(&q) >= SAMPLE_THICKNESS);
            }
        }
    }

    #[test]
    fn hyperbolic_and_plane_samples_are_thick() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let h = hyperbolic_sample(&mut rng);
            assert!(h.max_distance() <= 2.0 + 1e-12);
            assert!(min_thickness(&h) >= SAMPLE_THICKNESS);
            let p = plane_sample(&mut rng);
            assert!(p.max_distance() <= 2f64.sqrt());
            assert!(min_thickness(&p) >= SAMPLE_THICKNESS);
        }
    }
}
