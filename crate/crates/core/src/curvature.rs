//! Curvature fields on triangulated surfaces and the theorems checked on them.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{
    circumradius, heron_area, skeleton_diameter, validate, ComplexError, Edge, MetricComplex,
};
use crate::dual::{build_dual, CellMode, Direction, DualComplex, DualError};
use crate::wald::{cell_curvature, CellCurvature, SolverError, SolverOptions};

/// Default factor by which the skeleton diameter may exceed a diameter bound
/// in the tolerant Bonnet-Myers check.
pub const DEFAULT_DIAMETER_TOLERANCE: f64 = 1.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("invalid Stone direction: {0}")]
    StoneDirection(String),
    #[error("diameter bound undefined: {0}")]
    BoundDomain(String),
    #[error("fields do not belong to the same dual complex: {0}")]
    Mismatch(String),
    #[error("Menger exponent must be at least 1, got {0}")]
    MengerExponent(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Defect,
    WaldCell,
    Ricci,
    Scalar,
    Stone,
    Menger,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Defect => "defect",
            Method::WaldCell => "wald-cell",
            Method::Ricci => "ricci",
            Method::Scalar => "scalar",
            Method::Stone => "stone",
            Method::Menger => "menger",
        })
    }
}

/// What a curvature value is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum EntityId {
    Vertex(usize),
    /// Dual cell, indexed by its primal vertex.
    Cell(usize),
    /// Dual vertex, indexed by its primal triangle.
    DualVertex(usize),
    Direction { base: usize, target: usize },
    Triangle(usize),
    /// Triangle with an ordered pair of its edges.
    EdgePair { triangle: usize, first: Edge, second: Edge },
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityId::Vertex(v) => write!(f, "v{v}"),
            EntityId::Cell(v) => write!(f, "c{v}"),
            EntityId::DualVertex(t) => write!(f, "t{t}"),
            EntityId::Direction { base, target } => write!(f, "t{base}->t{target}"),
            EntityId::Triangle(t) => write!(f, "t{t}"),
            EntityId::EdgePair { triangle, first, second } => write!(f, "t{triangle}:{first}:{second}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldMeta {
    pub mesh_size: f64,
    pub min_thickness: f64,
    pub mode: Option<CellMode>,
}

impl FieldMeta {
    pub fn of(c: &MetricComplex, mode: Option<CellMode>) -> Result<Self, CurvatureError> {
        let min_thickness = (0..c.triangle_count())
            .map(|t| c.triangle_simplex(t).thickness())
            .fold(f64::INFINITY, f64::min);
        Ok(FieldMeta { mesh_size: c.mesh_size()?, min_thickness, mode })
    }
}

/// Curvature values keyed by entity, in ascending entity order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureField {
    pub method: Method,
    pub entries: Vec<(EntityId, f64)>,
    pub meta: FieldMeta,
}

impl CurvatureField {
    fn new(method: Method, mut entries: Vec<(EntityId, f64)>, meta: FieldMeta) -> Self {
        entries.sort_by_key(|a| a.0);
        CurvatureField { method, entries, meta }
    }

    pub fn get(&self, id: &EntityId) -> Option<f64> {
        self.entries
            .binary_search_by(|(e, _)| e.cmp(id))
            .ok()
            .map(|k| self.entries[k].1)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|(_, v)| *v)
    }

    pub fn min(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values().sum::<f64>() / self.entries.len() as f64
    }

    pub fn sum(&self) -> f64 {
        self.values().sum()
    }

    /// `entity_id,method,value` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("entity_id,method,value\n");
        for (id, v) in &self.entries {
            out.push_str(&format!("{id},{},{}\n", self.method, format_value(*v)));
        }
        out
    }
}

/// Twelve significant digits in scientific notation.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

/// Angle defect 2π − Σ α at every vertex.
pub fn combinatorial_defect(c: &MetricComplex) -> Result<CurvatureField, CurvatureError> {
    let star = c.vertex_triangles();
    let mut entries = Vec::with_capacity(c.vertex_count());
    for (v, tris) in star.iter().enumerate() {
        let mut total = 0.0;
        for &t in tris {
            let mut l = c.triangle_lengths(t);
            l.sort_by(f64::total_cmp);
            if heron_area(l[0], l[1], l[2]) <= crate::complex::DEGENERACY_TOLERANCE * l[2] * l[2] {
                return Err(CurvatureError::DegenerateTriangle(t));
            }
            total += c.corner_angle(t, v).expect("vertex in its star");
        }
        entries.push((EntityId::Vertex(v), 2.0 * PI - total));
    }
    Ok(CurvatureField::new(Method::Defect, entries, FieldMeta::of(c, None)?))
}

/// Embedding curvature of every dual cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCurvatures {
    pub mode: CellMode,
    pub cells: Vec<CellCurvature>,
}

impl CellCurvatures {
    /// Solves every cell of `d` concurrently.
    pub fn compute(d: &DualComplex, mode: CellMode, opts: &SolverOptions) -> Result<Self, CurvatureError> {
        let cells = (0..d.cells().len())
            .into_par_iter()
            .map(|k| -> Result<CellCurvature, CurvatureError> {
                let m = d.cell_metric(k, mode)?;
                Ok(cell_curvature(&m, opts)?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CellCurvatures { mode, cells })
    }

    pub fn kappa(&self, cell: usize) -> f64 {
        self.cells[cell].kappa
    }

    /// K₀: the smallest cell curvature.
    pub fn min(&self) -> f64 {
        self.cells.iter().map(|c| c.kappa).fold(f64::INFINITY, f64::min)
    }

    pub fn field(&self, d: &DualComplex) -> Result<CurvatureField, CurvatureError> {
        let entries = self.cells.iter().map(|c| (EntityId::Cell(c.cell), c.kappa)).collect();
        Ok(CurvatureField::new(Method::WaldCell, entries, FieldMeta::of(d.primal(), Some(self.mode))?))
    }
}

/// Ricci curvature at `dir.base` in the direction of `dir`: the sum of the
/// curvatures of the two cells containing its dual edge.
pub fn ricci(d: &DualComplex, cells: &CellCurvatures, dir: &Direction) -> f64 {
    d.edge_cells(dir.edge).iter().map(|&c| cells.kappa(c)).sum()
}

/// Scalar curvature at a dual vertex: the sum over its three cells.
pub fn scalar(d: &DualComplex, cells: &CellCurvatures, v: usize) -> f64 {
    d.vertex_cells(v).iter().map(|&c| cells.kappa(c)).sum()
}

pub fn ricci_field(d: &DualComplex, cells: &CellCurvatures) -> Result<CurvatureField, CurvatureError> {
    let mut entries = Vec::with_capacity(3 * d.vertices().len());
    for v in 0..d.vertices().len() {
        for (dir, _) in d.directions_at(v)? {
            entries.push((EntityId::Direction { base: dir.base, target: dir.target }, ricci(d, cells, &dir)));
        }
    }
    Ok(CurvatureField::new(Method::Ricci, entries, FieldMeta::of(d.primal(), Some(cells.mode))?))
}

pub fn scalar_field(d: &DualComplex, cells: &CellCurvatures) -> Result<CurvatureField, CurvatureError> {
    let entries = (0..d.vertices().len())
        .map(|v| (EntityId::DualVertex(v), scalar(d, cells, v)))
        .collect();
    Ok(CurvatureField::new(Method::Scalar, entries, FieldMeta::of(d.primal(), Some(cells.mode))?))
}

/// Stone's combinatorial Ricci curvature for n = 2: 16 minus the summed
/// triangle degrees of the three vertices spanned by two edges of `sigma`.
pub fn stone_ricci_2d(c: &MetricComplex, sigma: usize, first: Edge, second: Edge) -> Result<i64, CurvatureError> {
    let tri = *c
        .triangles()
        .get(sigma)
        .ok_or_else(|| CurvatureError::StoneDirection(format!("no triangle {sigma}")))?;
    let sides = [Edge::new(tri[1], tri[2]), Edge::new(tri[2], tri[0]), Edge::new(tri[0], tri[1])];
    if first == second {
        return Err(CurvatureError::StoneDirection(format!("edges coincide ({first})")));
    }
    for e in [first, second] {
        if !sides.contains(&e) {
            return Err(CurvatureError::StoneDirection(format!("{e} is not an edge of triangle {sigma}")));
        }
    }
    let deg = c.vertex_degrees();
    Ok(16 - tri.iter().map(|&v| deg[v] as i64).sum::<i64>())
}

/// Stone curvature for every ordered pair of distinct edges of every triangle.
pub fn stone_field(c: &MetricComplex) -> Result<CurvatureField, CurvatureError> {
    let mut entries = Vec::with_capacity(6 * c.triangle_count());
    for (t, &[a, b, cc]) in c.triangles().iter().enumerate() {
        let sides = [Edge::new(b, cc), Edge::new(cc, a), Edge::new(a, b)];
        for &first in &sides {
            for &second in &sides {
                if first != second {
                    let k = stone_ricci_2d(c, t, first, second)?;
                    entries.push((EntityId::EdgePair { triangle: t, first, second }, k as f64));
                }
            }
        }
    }
    Ok(CurvatureField::new(Method::Stone, entries, FieldMeta::of(c, None)?))
}

/// Per-triangle terms κ_M(T)^p · diam(T)² with κ_M = 1/circumradius.
pub fn menger_field(c: &MetricComplex, p: f64) -> Result<CurvatureField, CurvatureError> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(CurvatureError::MengerExponent(p));
    }
    let mut entries = Vec::with_capacity(c.triangle_count());
    for t in 0..c.triangle_count() {
        let [a, b, cc] = c.triangle_lengths(t);
        let r = circumradius(a, b, cc).map_err(|_| CurvatureError::DegenerateTriangle(t))?;
        let diam = a.max(b).max(cc);
        entries.push((EntityId::Triangle(t), r.recip().powf(p) * diam * diam));
    }
    Ok(CurvatureField::new(Method::Menger, entries, FieldMeta::of(c, None)?))
}

/// Menger curvature measure μ_p = Σ_T κ_M(T)^p · diam(T)².
pub fn menger_measure(c: &MetricComplex, p: f64) -> Result<f64, CurvatureError> {
    Ok(menger_field(c, p)?.sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonVerdict {
    pub k0: f64,
    pub n: usize,
    pub ricci_bound: f64,
    pub scalar_bound: f64,
    /// Cells below K₀ (the hypothesis fails there).
    pub cell_violations: Vec<(EntityId, f64)>,
    pub ricci_violations: Vec<(EntityId, f64)>,
    pub scalar_violations: Vec<(EntityId, f64)>,
    /// Dual vertices where the direction sum differs from 2 × scalar.
    pub counting_violations: Vec<(EntityId, f64)>,
    pub holds: bool,
}

/// Checks that cells ≥ K₀ give Ric ≥ nK₀ in every direction and
/// scal ≥ n(n+1)/2 · K₀ at every dual vertex (each dual vertex of a surface
/// lies in n + 1 = 3 cells), and that the three direction values at a dual
/// vertex sum to twice its scalar curvature.
pub fn comparison_check(
    d: &DualComplex,
    cells: &CurvatureField,
    ricci: &CurvatureField,
    scalar: &CurvatureField,
    k0: f64,
) -> Result<ComparisonVerdict, CurvatureError> {
    let n = 2usize;
    let expect = |f: &CurvatureField, method: Method, keys: BTreeSet<EntityId>| {
        let have: BTreeSet<EntityId> = f.entries.iter().map(|e| e.0).collect();
        if f.method != method || have != keys {
            Err(CurvatureError::Mismatch(format!("{} field does not match the dual complex", f.method)))
        } else {
            Ok(())
        }
    };
    expect(cells, Method::WaldCell, (0..d.cells().len()).map(EntityId::Cell).collect())?;
    expect(scalar, Method::Scalar, (0..d.vertices().len()).map(EntityId::DualVertex).collect())?;
    let mut dir_keys = BTreeSet::new();
    for v in 0..d.vertices().len() {
        for (dir, _) in d.directions_at(v)? {
            dir_keys.insert(EntityId::Direction { base: dir.base, target: dir.target });
        }
    }
    expect(ricci, Method::Ricci, dir_keys)?;

    let slack = 1e-12 * k0.abs().max(1.0);
    let ricci_bound = n as f64 * k0;
    let scalar_bound = (n * (n + 1) / 2) as f64 * k0;
    let below = |f: &CurvatureField, bound: f64| -> Vec<(EntityId, f64)> {
        f.entries.iter().filter(|(_, v)| *v < bound - slack).copied().collect()
    };
    let cell_violations = below(cells, k0);
    let ricci_violations = below(ricci, ricci_bound);
    let scalar_violations = below(scalar, scalar_bound);

    let mut counting_violations = Vec::new();
    for v in 0..d.vertices().len() {
        let total: f64 = d
            .directions_at(v)?
            .iter()
            .map(|(dir, _)| ricci.get(&EntityId::Direction { base: dir.base, target: dir.target }).unwrap())
            .sum();
        let s = scalar.get(&EntityId::DualVertex(v)).unwrap();
        if (total - 2.0 * s).abs() > 1e-9 * s.abs().max(1.0) {
            counting_violations.push((EntityId::DualVertex(v), total - 2.0 * s));
        }
    }
    let holds = cell_violations.is_empty()
        && ricci_violations.is_empty()
        && scalar_violations.is_empty()
        && counting_violations.is_empty();
    Ok(ComparisonVerdict {
        k0,
        n,
        ricci_bound,
        scalar_bound,
        cell_violations,
        ricci_violations,
        scalar_violations,
        counting_violations,
        holds,
    })
}

/// Stone's diameter bound for a surface with combinatorial curvature at
/// least `k0` and mesh size `d0`.
pub fn stone_diameter_bound(k0: f64, d0: f64) -> Result<f64, CurvatureError> {
    if !(k0 > 0.0 && d0 > 0.0 && k0.is_finite() && d0.is_finite()) {
        return Err(CurvatureError::BoundDomain(format!("need k0 > 0 and d0 > 0, got {k0}, {d0}")));
    }
    if k0 >= (2.0 - 2f64.sqrt()) * PI {
        return Ok(2.0 * PI * d0);
    }
    let disc = 4.0 * PI * k0 - k0 * k0;
    if disc <= 0.0 || d0 >= 2.0 * PI {
        return Err(CurvatureError::BoundDomain(format!("k0 = {k0}, d0 = {d0}")));
    }
    Ok(4.0 * PI.powi(3) * d0 / ((2.0 * PI - d0) * disc.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BMVerdict {
    pub mode: CellMode,
    /// False when K₀ ≤ 0: the theorem says nothing.
    pub applicable: bool,
    pub k0: f64,
    pub mesh_size: f64,
    pub skeleton_diameter: f64,
    pub classical_bound: Option<f64>,
    pub satisfied: Option<bool>,
    pub satisfied_with_tolerance: Option<bool>,
    pub tolerance: f64,
    /// Skeleton diameter over the classical bound.
    pub slack_ratio: Option<f64>,
    /// Smallest angle defect, used as Stone's k₀.
    pub combinatorial_k0: f64,
    pub stone_bound: Option<f64>,
    pub stone_satisfied: Option<bool>,
    pub stone_slack_ratio: Option<f64>,
}

/// Compares the skeleton diameter with π/√K₀ (K₀ the smallest cell
/// curvature) and with Stone's bound from the smallest angle defect.
pub fn bonnet_myers_check(
    c: &MetricComplex,
    mode: CellMode,
    opts: &SolverOptions,
    tolerance: f64,
) -> Result<BMVerdict, CurvatureError> {
    let report = validate(c);
    if !report.closed_manifold {
        return Err(DualError::NotClosed(report.failures()).into());
    }
    let d = build_dual(c)?;
    let cells = CellCurvatures::compute(&d, mode, opts)?;
    let k0 = cells.min();
    let diameter = skeleton_diameter(c)?;
    let mesh_size = c.mesh_size()?;
    let applicable = k0 > 0.0;
    let classical_bound = applicable.then(|| PI / k0.sqrt());
    let combinatorial_k0 = combinatorial_defect(c)?.min();
    let stone_bound = if combinatorial_k0 > 0.0 {
        stone_diameter_bound(combinatorial_k0, mesh_size).ok()
    } else {
        None
    };
    Ok(BMVerdict {
        mode,
        applicable,
        k0,
        mesh_size,
        skeleton_diameter: diameter,
        classical_bound,
        satisfied: classical_bound.map(|b| diameter <= b),
        satisfied_with_tolerance: classical_bound.map(|b| diameter <= tolerance * b),
        tolerance,
        slack_ratio: classical_bound.map(|b| diameter / b),
        combinatorial_k0,
        stone_bound,
        stone_satisfied: stone_bound.map(|b| diameter <= b),
        stone_slack_ratio: stone_bound.map(|b| diameter / b),
    })
}
