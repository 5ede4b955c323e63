use std::f64::consts::PI;

use proptest::prelude::*;
use ricci_core::complex::{skeleton_diameter, Simplex};
use ricci_core::curvature::stone_ricci_2d;
use ricci_core::dual::{build_dual, CellMetric, CellMode};
use ricci_core::lab::{gen_flat_torus, gen_icosphere};
use ricci_core::wald::{cell_curvature, gauge_determinant, quadruple_curvature, Branch, MetricQuadruple, SolverOptions};
use ricci_core::{cayley_menger, MetricComplex};

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64]
}

fn planar_point() -> impl Strategy<Value = [f64; 3]> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| [x, y, 0.0])
}

fn matrix(pts: &[[f64; 3]]) -> Vec<Vec<f64>> {
    pts.iter().map(|&p| pts.iter().map(|&q| dist(p, q)).collect()).collect()
}

fn min_face_thickness(m: &[Vec<f64>]) -> f64 {
    [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
        .iter()
        .map(|t| Simplex::from_distances(t.iter().map(|&i| t.iter().map(|&j| m[i][j]).collect()).collect()).thickness())
        .fold(f64::INFINITY, f64::min)
}

/// Four points in a spherical cap of angular radius π/3 on the unit sphere.
fn cap_quadruple() -> impl Strategy<Value = MetricQuadruple> {
    prop::array::uniform4((0.0..(PI / 3.0), 0.0..(2.0 * PI)))
        .prop_map(|pts| {
            let xyz = pts.map(|(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]);
            let mut m = vec![vec![0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    let c: f64 = (0..3).map(|k| xyz[i][k] * xyz[j][k]).sum();
                    m[i][j] = if i == j { 0.0 } else { c.clamp(-1.0, 1.0).acos() };
                }
            }
            m
        })
        .prop_filter("thick samples only", |m| min_face_thickness(m) >= 0.05)
        .prop_map(|m| MetricQuadruple::from_matrix(&m, [0, 1, 2, 3]).unwrap())
}

fn any_quadruple() -> impl Strategy<Value = MetricQuadruple> {
    prop::array::uniform4(point())
        .prop_map(|p| matrix(&p))
        .prop_filter("thick samples only", |m| min_face_thickness(m) >= 0.05)
        .prop_map(|m| MetricQuadruple::from_matrix(&m, [0, 1, 2, 3]).unwrap())
}

fn permuted(c: &MetricComplex, perm: &[usize]) -> MetricComplex {
    let pts = c.embedding().unwrap();
    let mut moved = vec![[0.0; 3]; pts.len()];
    for (old, &new) in perm.iter().enumerate() {
        moved[new] = pts[old];
    }
    let tris = c.triangles().iter().map(|t| t.map(|v| perm[v])).collect();
    MetricComplex::from_embedding(moved, tris).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn thickness_is_scale_invariant(pts in prop::array::uniform4(point()), lambda in 0.01..100.0f64) {
        for k in [2usize, 3, 4] {
            let s = Simplex::from_points(&pts[..k]);
            let scaled: Vec<[f64; 3]> = pts[..k].iter().map(|p| p.map(|x| x * lambda)).collect();
            let t = Simplex::from_points(&scaled);
            let (a, b) = (s.thickness(), t.thickness());
            if a < 1e-3 {
                continue;
            }
            prop_assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn planar_cayley_menger_vanishes(pts in prop::array::uniform4(planar_point())) {
        let m = matrix(&pts);
        let mut d = [[0.0; 4]; 4];
        let mut dmax: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                d[i][j] = m[i][j];
                dmax = dmax.max(m[i][j]);
            }
        }
        prop_assume!(d.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| i == j || x > 1e-6)));
        let cm = cayley_menger(&d).unwrap();
        prop_assert!(cm.abs() <= 1e-9 * dmax.powi(4), "{cm}");
    }

    #[test]
    fn planar_quadruples_are_flat(pts in prop::array::uniform4(planar_point())) {
        let m = matrix(&pts);
        prop_assume!(min_face_thickness(&m) >= 0.05);
        let q = MetricQuadruple::from_matrix(&m, [0, 1, 2, 3]).unwrap();
        let r = quadruple_curvature(&q, &SolverOptions::default()).unwrap();
        prop_assert_eq!(r.branch, Branch::Flat);
    }

    #[test]
    fn curvature_scales_inversely_with_area(q in cap_quadruple(), lambda in 0.1..10.0f64) {
        let opts = SolverOptions::default();
        let k = quadruple_curvature(&q, &opts).unwrap().kappa;
        let kl = quadruple_curvature(&q.scaled(lambda), &opts).unwrap().kappa;
        prop_assert!((kl - k / (lambda * lambda)).abs() <= 1e-8 * (k / (lambda * lambda)).abs());
    }

    #[test]
    fn spherical_roots_have_small_residual(q in cap_quadruple()) {
        let r = quadruple_curvature(&q, &SolverOptions::default()).unwrap();
        prop_assert!((r.kappa - 1.0).abs() < 1e-8);
        prop_assert!(r.raw_residual <= 1e-10);
        prop_assert!(r.min_minor >= -1e-10);
    }

    #[test]
    fn gauge_determinant_is_continuous_at_zero(q in any_quadruple()) {
        let g0 = gauge_determinant(&q, 0.0).unwrap();
        let dmax = q.max_distance();
        let eps = 1e-9 / (dmax * dmax);
        for kappa in [eps, -eps] {
            let g = gauge_determinant(&q, kappa).unwrap();
            let scale = dmax.powi(8);
            prop_assert!(g.signum() == g0.signum() || g0.abs() < 1e-6 * scale);
            prop_assert!((g - g0).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn skeleton_diameter_ignores_labels(seed in any::<u64>()) {
        let c = gen_icosphere(1, 1.0).unwrap();
        let mut perm: Vec<usize> = (0..c.vertex_count()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = skeleton_diameter(&c).unwrap();
        let b = skeleton_diameter(&permuted(&c, &perm)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn extra_edges_never_increase_diameter(a in 0usize..42, b in 0usize..42, k in 0usize..42) {
        prop_assume!(a != b && b != k && a != k);
        let c = gen_icosphere(1, 1.0).unwrap();
        let mut tris = c.triangles().to_vec();
        tris.push([a, b, k]);
        let more = MetricComplex::from_embedding(c.embedding().unwrap().to_vec(), tris).unwrap();
        prop_assert!(skeleton_diameter(&more).unwrap() <= skeleton_diameter(&c).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn stone_depends_only_on_degrees(seed in any::<u64>(), t in 0usize..80, pick in 0usize..6) {
        let c = gen_icosphere(1, 1.0).unwrap();
        let mut perm: Vec<usize> = (0..c.vertex_count()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = permuted(&c, &perm);
        let [x, y, z] = c.triangles()[t];
        let sides = [(y, z), (z, x), (x, y)];
        let (i, j) = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)][pick];
        let e = |(u, v): (usize, usize)| ricci_core::Edge::new(u, v);
        let pe = |(u, v): (usize, usize)| ricci_core::Edge::new(perm[u], perm[v]);
        let before = stone_ricci_2d(&c, t, e(sides[i]), e(sides[j])).unwrap();
        let after = stone_ricci_2d(&p, t, pe(sides[i]), pe(sides[j])).unwrap();
        prop_assert_eq!(before, after);
        let deg = c.vertex_degrees();
        prop_assert_eq!(before, 16 - (deg[x] + deg[y] + deg[z]) as i64);
    }

    #[test]
    fn cell_curvature_ignores_vertex_order(cell in 0usize..42, seed in any::<u64>()) {
        let d = build_dual(&gen_icosphere(1, 1.0).unwrap()).unwrap();
        for mode in [CellMode::Extrinsic, CellMode::IntrinsicStar] {
            let m = d.cell_metric(cell, mode).unwrap();
            let p = m.distances.len();
            let mut perm: Vec<usize> = (0..p).collect();
            let mut s = seed;
            for i in (1..p).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let shuffled = CellMetric {
                distances: perm.iter().map(|&i| perm.iter().map(|&j| m.distances[i][j]).collect()).collect(),
                apex: perm.iter().map(|&i| m.apex[i]).collect(),
                ..m.clone()
            };
            let opts = SolverOptions::default();
            let a = cell_curvature(&m, &opts).unwrap().kappa;
            let b = cell_curvature(&shuffled, &opts).unwrap().kappa;
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}

#[test]
fn embedded_lengths_match_coordinates() {
    for c in (0..=3).map(|l| gen_icosphere(l, 1.7).unwrap()) {
        let pts = c.embedding().unwrap();
        for (e, l) in c.edges() {
            assert!((l - dist(pts[e.lo()], pts[e.hi()])).abs() <= 1e-12 * l);
        }
    }
}

#[test]
fn euler_characteristic_matches_genus() {
    for l in 0..=4 {
        assert_eq!(gen_icosphere(l, 1.0).unwrap().euler_characteristic(), 2);
    }
    for (nx, ny) in [(3, 3), (4, 6), (7, 5)] {
        assert_eq!(gen_flat_torus(nx, ny).unwrap().euler_characteristic(), 0);
    }
}

#[test]
fn dual_combinatorics_and_edge_bounds() {
    let meshes = [gen_icosphere(2, 1.0).unwrap(), gen_flat_torus(4, 5).unwrap()];
    for c in &meshes {
        let d = build_dual(c).unwrap();
        assert_eq!(d.vertices().len(), c.triangle_count());
        assert_eq!(d.edges().len(), c.edge_count());
        assert_eq!(d.cells().len(), c.vertex_count());
        let rmax = d.vertices().iter().map(|v| v.circumradius).fold(0.0, f64::max);
        assert!(d.edges().iter().all(|e| e.length > 0.0 && e.length <= 2.0 * rmax));
        let mut per_edge = vec![0; d.edges().len()];
        for v in 0..d.vertices().len() {
            for (dir, _) in d.directions_at(v).unwrap() {
                per_edge[dir.edge] += 1;
            }
        }
        // every dual edge is seen from both endpoints and lies in two cells
        assert!(per_edge.iter().all(|&n| n == 2));
    }
}

#[test]
fn intrinsic_cell_distances_are_metric() {
    let meshes = [
        gen_icosphere(0, 1.0).unwrap(),
        gen_icosphere(2, 1.0).unwrap(),
        gen_flat_torus(4, 4).unwrap(),
        ricci_core::lab::tetrahedron(1.0).unwrap(),
    ];
    for c in &meshes {
        let d = build_dual(c).unwrap();
        for k in 0..d.cells().len() {
            let m = d.cell_metric(k, CellMode::IntrinsicStar).unwrap();
            let p = m.distances.len();
            for i in 0..p {
                for j in 0..p {
                    assert_eq!(m.distances[i][j], m.distances[j][i]);
                    for l in 0..p {
                        assert!(m.distances[i][j] <= m.distances[i][l] + m.distances[l][j] + 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn dual_mesh_size_decreases_under_refinement() {
    let sizes: Vec<f64> = (0..=4)
        .map(|l| build_dual(&gen_icosphere(l, 1.0).unwrap()).unwrap().mesh_size())
        .collect();
    assert!(sizes.windows(2).all(|w| w[1] < w[0]), "{sizes:?}");
    let primal: Vec<f64> = (0..=4).map(|l| gen_icosphere(l, 1.0).unwrap().mesh_size().unwrap()).collect();
    let ratios: Vec<f64> = sizes.iter().zip(&primal).map(|(d, p)| d / p).collect();
    assert!(ratios.iter().all(|&r| (1.0..1.3).contains(&r)), "{ratios:?}");
}
