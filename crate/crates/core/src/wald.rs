//! Embedding (Wald) curvature of metric quadruples and of dual cells.
//!
//! A quadruple embeds isometrically in the gauge surface of curvature κ when
//! the 4×4 matrix `[cos(√κ d_ij)]` (κ > 0) or `[cosh(√−κ d_ij)]` (κ < 0) is
//! singular. Writing that matrix as `J − κH` with `J` all ones and
//! `H_ij = (1 − cos(√κ d_ij))/κ`, its determinant equals `κ³ G(κ)` where
//!
//! ```text
//! G(κ) = det | κ  1ᵀ |
//!            | 1  H  |
//! ```
//!
//! `G` is analytic in κ and at κ = 0 reduces to the bordered Cayley-Menger
//! determinant divided by 8. The solver works with `G`, which avoids the
//! spurious sign change of the raw determinant at κ = 0.

use serde::Serialize;
use thiserror::Error;

use crate::complex::heron_area;
use crate::dual::CellMetric;
use crate::linalg::determinant;

/// Beyond this value of √−κ·max d the hyperbolic entries overflow.
pub const HYPERBOLIC_ARGUMENT_CAP: f64 = 150.0;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid quadruple: {0}")]
    Invalid(String),
    #[error("degenerate quadruple: points {triple:?} are collinear or coincident")]
    Degenerate { triple: [usize; 3] },
    #[error("quadruple does not embed in any gauge surface within the search range")]
    NonEmbeddable,
    #[error("gauge determinant outside its domain: sqrt(kappa) * {max_distance} exceeds pi for kappa = {kappa}")]
    DomainViolation { kappa: f64, max_distance: f64 },
    #[error("cell {cell}: no quadruple could be solved ({degenerate} degenerate, {failed} without a root)")]
    CellCurvatureUndefined { cell: usize, degenerate: usize, failed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Flat when |Cayley-Menger| < planarity_tolerance · (max d)⁸.
    pub planarity_tolerance: f64,
    /// Relative width at which bisection stops.
    pub root_tolerance: f64,
    /// Brackets per side, and per hyperbolic doubling segment.
    pub scan_resolution: usize,
    pub max_doublings: u32,
    /// A triple is degenerate when its height is below this fraction of its longest side.
    pub degeneracy_tolerance: f64,
    /// Lower bound accepted for the order-3 principal minors of the gauge matrix.
    pub minor_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            planarity_tolerance: 1e-9,
            root_tolerance: 1e-12,
            scan_resolution: 1024,
            max_doublings: 20,
            degeneracy_tolerance: 1e-8,
            minor_tolerance: 1e-10,
        }
    }
}

impl SolverOptions {
    pub fn check(&self) -> Result<(), SolverError> {
        let positive = [
            self.planarity_tolerance,
            self.root_tolerance,
            self.degeneracy_tolerance,
            self.minor_tolerance,
        ];
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) || self.scan_resolution == 0 {
            return Err(SolverError::Invalid("solver options must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Flat,
    Spherical,
    Hyperbolic,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Flat => "flat",
            Branch::Spherical => "spherical",
            Branch::Hyperbolic => "hyperbolic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingCurvatureResult {
    pub kappa: f64,
    pub branch: Branch,
    /// |G(κ)| at the returned root (the Cayley-Menger value for flat results).
    pub residual: f64,
    /// |det[cos(√κ d_ij)]| at the returned root.
    pub raw_residual: f64,
    /// Smallest order-3 principal minor of the gauge matrix at the root.
    pub min_minor: f64,
    pub brackets_scanned: usize,
    /// Sign changes whose root failed the minor or domain condition.
    pub roots_rejected: usize,
}

/// Four points with their six pairwise distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricQuadruple {
    pub labels: [usize; 4],
    d: [[f64; 4]; 4],
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
const TRIPLES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

impl MetricQuadruple {
    /// Distances in the order d01, d02, d03, d12, d13, d23.
    pub fn new(distances: [f64; 6]) -> Result<Self, SolverError> {
        let mut d = [[0.0; 4]; 4];
        for (&(i, j), &x) in PAIRS.iter().zip(&distances) {
            if !(x.is_finite() && x >= 0.0) {
                return Err(SolverError::Invalid(format!("distance d{i}{j} = {x}")));
            }
            d[i][j] = x;
            d[j][i] = x;
        }
        Ok(MetricQuadruple { labels: [0, 1, 2, 3], d })
    }

    /// Quadruple taken from rows/columns `idx` of a larger distance matrix.
    pub fn from_matrix(m: &[Vec<f64>], idx: [usize; 4]) -> Result<Self, SolverError> {
        let mut q = Self::new(PAIRS.map(|(i, j)| m[idx[i]][idx[j]]))?;
        q.labels = idx;
        Ok(q)
    }

    /// Parses a batch line `d01,d02,d03,d12,d13,d23`.
    pub fn from_csv_line(line: &str) -> Result<Self, SolverError> {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(SolverError::Invalid(format!("expected 6 distances, found {}", fields.len())));
        }
        let mut d = [0.0; 6];
        for (slot, f) in d.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|_| SolverError::Invalid(format!("not a number: `{f}`")))?;
        }
        Self::new(d)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    pub fn distances(&self) -> [f64; 6] {
        PAIRS.map(|(i, j)| self.d[i][j])
    }

    pub fn max_distance(&self) -> f64 {
        self.distances().into_iter().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut q = self.clone();
        q.d = q.d.map(|row| row.map(|x| x * factor));
        q
    }

    /// Rejects non-metric input and flags degenerate triples.
    fn check(&self, opts: &SolverOptions) -> Result<(), SolverError> {
        for t in TRIPLES {
            let mut s = [self.d[t[0]][t[1]], self.d[t[1]][t[2]], self.d[t[0]][t[2]]];
            s.sort_by(f64::total_cmp);
            if s[0] <= 0.0 {
                return Err(SolverError::Degenerate { triple: t.map(|i| self.labels[i]) });
            }
            if s[2] > (s[0] + s[1]) * (1.0 + crate::complex::TRIANGLE_INEQUALITY_SLACK) {
                return Err(SolverError::Invalid(format!(
                    "triangle inequality violated on points {:?}",
                    t.map(|i| self.labels[i])
                )));
            }
            let height = 2.0 * heron_area(s[0], s[1], s[2]) / s[2];
            if height < opts.degeneracy_tolerance * s[2] {
                return Err(SolverError::Degenerate { triple: t.map(|i| self.labels[i]) });
            }
        }
        Ok(())
    }

    /// Bordered Cayley-Menger determinant (288 V² for a tetrahedron).
    pub fn cayley_menger(&self) -> f64 {
        8.0 * self.normalized_gauge(0.0)
    }

    /// G(κ) without the domain check.
    fn normalized_gauge(&self, kappa: f64) -> f64 {
        let mut m = [[0.0; 5]; 5];
        m[0][0] = kappa;
        for i in 0..4 {
            m[0][i + 1] = 1.0;
            m[i + 1][0] = 1.0;
        }
        for (i, j) in PAIRS {
            let h = versine_over_kappa(kappa, self.d[i][j]);
            m[i + 1][j + 1] = h;
            m[j + 1][i + 1] = h;
        }
        determinant(&m)
    }

    /// Entries of the cos/cosh gauge matrix.
    fn gauge_matrix(&self, kappa: f64) -> [[f64; 4]; 4] {
        let mut c = [[1.0; 4]; 4];
        for (i, j) in PAIRS {
            let v = 1.0 - kappa * versine_over_kappa(kappa, self.d[i][j]);
            c[i][j] = v;
            c[j][i] = v;
        }
        c
    }

    fn min_principal_minor(&self, kappa: f64) -> f64 {
        let c = self.gauge_matrix(kappa);
        TRIPLES
            .iter()
            .map(|t| determinant(&[0, 1, 2].map(|r| [0, 1, 2].map(|s| c[t[r]][t[s]]))))
            .fold(f64::INFINITY, f64::min)
    }
}

/// (1 − cos(√κ d))/κ, continued analytically through κ = 0 and evaluated
/// without cancellation on both sides.
fn versine_over_kappa(kappa: f64, d: f64) -> f64 {
    if kappa > 0.0 {
        let s = (kappa.sqrt() * d / 2.0).sin();
        2.0 * s * s / kappa
    } else if kappa < 0.0 {
        let s = ((-kappa).sqrt() * d / 2.0).sinh();
        2.0 * s * s / -kappa
    } else {
        d * d / 2.0
    }
}

/// Normalized gauge determinant G(κ) = det[cos(√κ d_ij)] / κ³, equal to the
/// Cayley-Menger determinant over 8 at κ = 0.
pub fn gauge_determinant(q: &MetricQuadruple, kappa: f64) -> Result<f64, SolverError> {
    let max_distance = q.max_distance();
    if kappa > 0.0 && kappa.sqrt() * max_distance > std::f64::consts::PI * (1.0 + 1e-12) {
        return Err(SolverError::DomainViolation { kappa, max_distance });
    }
    Ok(q.normalized_gauge(kappa))
}

/// Raw determinant of the 4×4 cos (κ > 0) or cosh (κ < 0) matrix; zero at κ = 0.
pub fn gauge_matrix_determinant(q: &MetricQuadruple, kappa: f64) -> Result<f64, SolverError> {
    gauge_determinant(q, kappa)?;
    Ok(determinant(&q.gauge_matrix(kappa)))
}

/// One side of the outward bracket scan.
struct Scan {
    sign: f64,
    step: f64,
    segment_end: f64,
    at: f64,
    value: f64,
    limit: f64,
    doublings_left: u32,
    resolution: usize,
}

impl Scan {
    fn next_bracket(&mut self, q: &MetricQuadruple) -> Option<(f64, f64, f64, f64)> {
        if self.at >= self.limit * (1.0 - 1e-15) {
            return None;
        }
        if self.at >= self.segment_end * (1.0 - 1e-15) {
            if self.doublings_left == 0 {
                return None;
            }
            self.doublings_left -= 1;
            self.step = self.segment_end / self.resolution as f64;
            self.segment_end *= 2.0;
        }
        let lo = self.at;
        let hi = (lo + self.step).min(self.segment_end).min(self.limit);
        let value = q.normalized_gauge(self.sign * hi);
        let bracket = (lo, hi, self.value, value);
        self.at = hi;
        self.value = value;
        Some(bracket)
    }
}

fn bisect(q: &MetricQuadruple, sign: f64, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol * hi {
            break;
        }
        let f_mid = q.normalized_gauge(sign * mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Embedding curvature of a quadruple: 0 when it is planar, otherwise the
/// root of G with the smallest |κ| whose gauge matrix has nonnegative
/// order-3 principal minors (and, on the sphere, √κ·max d ≤ π).
pub fn quadruple_curvature(
    q: &MetricQuadruple,
    opts: &SolverOptions,
) -> Result<EmbeddingCurvatureResult, SolverError> {
    opts.check()?;
    q.check(opts)?;
    let dmax = q.max_distance();
    let cm = q.cayley_menger();
    if cm.abs() < opts.planarity_tolerance * dmax.powi(8) {
        return Ok(EmbeddingCurvatureResult {
            kappa: 0.0,
            branch: Branch::Flat,
            residual: cm.abs(),
            raw_residual: 0.0,
            min_minor: q.min_principal_minor(0.0),
            brackets_scanned: 0,
            roots_rejected: 0,
        });
    }

    let pi = std::f64::consts::PI;
    let span = (pi / dmax).powi(2);
    let g0 = cm / 8.0;
    let mut sides = [
        Scan {
            sign: 1.0,
            step: span / opts.scan_resolution as f64,
            segment_end: span,
            at: 0.0,
            value: g0,
            limit: span,
            doublings_left: 0,
            resolution: opts.scan_resolution,
        },
        Scan {
            sign: -1.0,
            step: span / opts.scan_resolution as f64,
            segment_end: span,
            at: 0.0,
            value: g0,
            limit: (HYPERBOLIC_ARGUMENT_CAP / dmax).powi(2),
            doublings_left: opts.max_doublings,
            resolution: opts.scan_resolution,
        },
    ];
    let mut done = [false, false];
    let mut best: Option<(f64, f64)> = None;
    let mut brackets_scanned = 0;
    let mut roots_rejected = 0;

    loop {
        let side = match (done[0], done[1]) {
            (true, true) => break,
            (false, true) => 0,
            (true, false) => 1,
            _ => usize::from(sides[1].at < sides[0].at),
        };
        if let Some((b, _)) = best {
            if sides[side].at >= b.abs() {
                done[side] = true;
                continue;
            }
        }
        let Some((lo, hi, f_lo, f_hi)) = sides[side].next_bracket(q) else {
            done[side] = true;
            continue;
        };
        brackets_scanned += 1;
        if f_lo == 0.0 || (f_hi != 0.0 && (f_lo > 0.0) == (f_hi > 0.0)) {
            continue;
        }
        let sign = sides[side].sign;
        let root = if f_hi == 0.0 { hi } else { bisect(q, sign, lo, hi, f_lo, opts.root_tolerance) };
        let kappa = sign * root;
        let in_domain = kappa < 0.0 || kappa.sqrt() * dmax <= pi * (1.0 + 1e-12);
        let min_minor = q.min_principal_minor(kappa);
        let scale = q.gauge_matrix(kappa)[0].iter().fold(1.0f64, |m, x| m.max(x.abs())).powi(3);
        if in_domain && min_minor >= -opts.minor_tolerance * scale {
            if best.is_none_or(|(b, _)| kappa.abs() < b.abs()) {
                best = Some((kappa, min_minor));
            }
        } else {
            roots_rejected += 1;
        }
    }

    let (kappa, min_minor) = best.ok_or(SolverError::NonEmbeddable)?;
    let g = q.normalized_gauge(kappa);
    Ok(EmbeddingCurvatureResult {
        kappa,
        branch: if kappa > 0.0 { Branch::Spherical } else { Branch::Hyperbolic },
        residual: g.abs(),
        raw_residual: (kappa.powi(3) * g).abs(),
        min_minor,
        brackets_scanned,
        roots_rejected,
    })
}

/// Curvature of a dual cell: the minimum over its vertex quadruples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCurvature {
    pub cell: usize,
    pub kappa: f64,
    /// Quadruple attaining the minimum, as cell-local indices; index `p`
    /// stands for the apex of a 3-vertex cell.
    pub argmin: [usize; 4],
    pub quadruples: usize,
    pub degenerate: usize,
    pub failed: usize,
    pub apex_augmented: bool,
}

fn quadruple_indices(p: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            for c in b + 1..p {
                for d in c + 1..p {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Minimum embedding curvature over all quadruples of the cell's vertices.
/// Cells with three vertices use the primal vertex (cone apex or embedded
/// point) as the fourth point. Degenerate quadruples are skipped and counted.
pub fn cell_curvature(m: &CellMetric, opts: &SolverOptions) -> Result<CellCurvature, SolverError> {
    let p = m.distances.len();
    let apex_augmented = p == 3;
    let (matrix, indices) = if apex_augmented {
        let mut ext: Vec<Vec<f64>> = m.distances.clone();
        for (row, &a) in ext.iter_mut().zip(&m.apex) {
            row.push(a);
        }
        let mut last = m.apex.clone();
        last.push(0.0);
        ext.push(last);
        (ext, vec![[0, 1, 2, 3]])
    } else if p >= 4 {
        (m.distances.clone(), quadruple_indices(p))
    } else {
        return Err(SolverError::Invalid(format!("cell {} has only {p} vertices", m.cell)));
    };

    let mut best: Option<(f64, [usize; 4])> = None;
    let (mut degenerate, mut failed) = (0, 0);
    for idx in &indices {
        let q = MetricQuadruple::from_matrix(&matrix, *idx)?;
        match quadruple_curvature(&q, opts) {
            Ok(r) => {
                if best.is_none_or(|(k, _)| r.kappa < k) {
                    best = Some((r.kappa, *idx));
                }
            }
            Err(SolverError::Degenerate { .. }) => degenerate += 1,
            Err(SolverError::NonEmbeddable) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    let (kappa, argmin) =
        best.ok_or(SolverError::CellCurvatureUndefined { cell: m.cell, degenerate, failed })?;
    if degenerate + failed > 0 {
        log::debug!("cell {}: skipped {degenerate} degenerate and {failed} unsolved quadruples", m.cell);
    }
    Ok(CellCurvature {
        cell: m.cell,
        kappa,
        argmin,
        quadruples: indices.len(),
        degenerate,
        failed,
        apex_augmented,
    })
}
