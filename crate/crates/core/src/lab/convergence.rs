use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use super::generate::{gen_flat_torus, gen_icosphere, GenerateError};
use crate::complex::MetricComplex;
use crate::curvature::{format_value, ricci_field, CellCurvatures, CurvatureError};
use crate::dual::{build_dual, CellMode};
use crate::wald::SolverOptions;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("invalid mesh family: {0}")]
    InvalidFamily(String),
}

/// A refinement family: level `l` is an icosphere subdivided `l` times, or
/// a flat torus with `base · 2^l` squares per side of size `cell_size / 2^l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeshFamilySpec {
    Icosphere { radius: f64 },
    FlatTorus { base: usize, cell_size: f64 },
}

impl MeshFamilySpec {
    pub fn check(&self) -> Result<(), LabError> {
        match *self {
            MeshFamilySpec::Icosphere { radius } if !(radius > 0.0 && radius.is_finite()) => {
                Err(LabError::InvalidFamily(format!("radius must be positive, got {radius}")))
            }
            MeshFamilySpec::FlatTorus { base, cell_size } if base < 3 || !(cell_size > 0.0 && cell_size.is_finite()) => {
                Err(LabError::InvalidFamily(format!("torus needs base >= 3 and positive cell size, got {base}, {cell_size}")))
            }
            _ => Ok(()),
        }
    }

    pub fn mesh(&self, level: u32) -> Result<MetricComplex, LabError> {
        self.check()?;
        Ok(match *self {
            MeshFamilySpec::Icosphere { radius } => gen_icosphere(level, radius)?,
            MeshFamilySpec::FlatTorus { base, cell_size } => {
                let n = base << level;
                gen_flat_torus(n, n)?.scaled(cell_size / f64::from(1u32 << level))
            }
        })
    }

    /// Sectional curvature of the smooth surface the family approximates.
    pub fn reference_curvature(&self) -> f64 {
        match *self {
            MeshFamilySpec::Icosphere { radius } => 1.0 / (radius * radius),
            MeshFamilySpec::FlatTorus { .. } => 0.0,
        }
    }
}

/// CSV column order of [`ConvergenceTable::to_csv`].
pub const COLUMNS: [&str; 19] = [
    "level",
    "vertices",
    "mesh_size",
    "dual_mesh_size",
    "min_thickness",
    "mean_thickness",
    "dual_thickness",
    "cell_min",
    "cell_max",
    "cell_mean",
    "ricci_min",
    "ricci_max",
    "ricci_mean",
    "max_deviation",
    "ricci_ratio",
    "ricci_ratio_half",
    "obtuse_triangles",
    "skipped_quadruples",
    "unsolved_quadruples",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: u32,
    pub vertices: usize,
    pub mesh_size: f64,
    pub dual_mesh_size: f64,
    pub min_thickness: f64,
    pub mean_thickness: f64,
    pub dual_thickness: f64,
    pub cell_min: f64,
    pub cell_max: f64,
    pub cell_mean: f64,
    pub ricci_min: f64,
    pub ricci_max: f64,
    pub ricci_mean: f64,
    /// max |K_cell − K_ref|.
    pub max_deviation: f64,
    /// Mean Ricci over K_ref; absent for a flat reference.
    pub ricci_ratio: Option<f64>,
    /// Mean Ricci over 2·K_ref.
    pub ricci_ratio_half: Option<f64>,
    pub obtuse_triangles: usize,
    pub skipped_quadruples: usize,
    pub unsolved_quadruples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub family: MeshFamilySpec,
    pub mode: CellMode,
    pub reference_curvature: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Levels that could not be evaluated, with the cause.
    pub skipped_levels: Vec<(u32, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub family: MeshFamilySpec,
    pub mode: CellMode,
    pub levels: Vec<u32>,
    pub ricci_ratios: Vec<f64>,
    /// |r_{k+1} − r_k| between consecutive levels.
    pub ratio_differences: Vec<f64>,
    pub differences_decreasing: bool,
    /// Aitken extrapolation of the last three ratios, or the last ratio.
    pub extrapolated_ratio: Option<f64>,
    pub skipped_levels: Vec<(u32, String)>,
}

fn evaluate(
    spec: &MeshFamilySpec,
    c: &MetricComplex,
    level: u32,
    mode: CellMode,
    opts: &SolverOptions,
) -> Result<ConvergenceRow, CurvatureError> {
    let d = build_dual(c)?;
    let cells = CellCurvatures::compute(&d, mode, opts)?;
    let ric = ricci_field(&d, &cells)?;
    let k_ref = spec.reference_curvature();

    let thickness: Vec<f64> = (0..c.triangle_count()).map(|t| c.triangle_simplex(t).thickness()).collect();
    let kappas: Vec<f64> = cells.cells.iter().map(|k| k.kappa).collect();
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let ricci_mean = ric.mean();
    let ratio = (k_ref != 0.0).then(|| ricci_mean / k_ref);
    Ok(ConvergenceRow {
        level,
        vertices: c.vertex_count(),
        mesh_size: c.mesh_size()?,
        dual_mesh_size: d.mesh_size(),
        min_thickness: thickness.iter().copied().fold(f64::INFINITY, f64::min),
        mean_thickness: mean(&thickness),
        dual_thickness: d.dual_thickness(mode)?,
        cell_min: cells.min(),
        cell_max: kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        cell_mean: mean(&kappas),
        ricci_min: ric.min(),
        ricci_max: ric.max(),
        ricci_mean,
        max_deviation: kappas.iter().map(|k| (k - k_ref).abs()).fold(0.0, f64::max),
        ricci_ratio: ratio,
        ricci_ratio_half: ratio.map(|r| r / 2.0),
        obtuse_triangles: d.obtuse_count(),
        skipped_quadruples: cells.cells.iter().map(|k| k.degenerate).sum(),
        unsolved_quadruples: cells.cells.iter().map(|k| k.failed).sum(),
    })
}

/// Builds, solves and tabulates each level in turn. A level whose cells
/// cannot be solved is recorded in `skipped_levels` and left out.
pub fn convergence_experiment(
    spec: &MeshFamilySpec,
    levels: RangeInclusive<u32>,
    mode: CellMode,
    opts: &SolverOptions,
) -> Result<ConvergenceTable, LabError> {
    spec.check()?;
    if let MeshFamilySpec::Icosphere { .. } = spec {
        if *levels.end() > super::MAX_ICOSPHERE_LEVEL {
            return Err(GenerateError::LevelTooLarge(*levels.end()).into());
        }
    }
    let mut rows = Vec::new();
    let mut skipped_levels = Vec::new();
    for level in levels {
        let c = spec.mesh(level)?;
        match evaluate(spec, &c, level, mode, opts) {
            Ok(row) => {
                log::info!(
                    "level {level}: mesh {:.4e}, cells [{:.4e}, {:.4e}], mean ricci {:.4e}",
                    row.mesh_size,
                    row.cell_min,
                    row.cell_max,
                    row.ricci_mean
                );
                rows.push(row);
            }
            Err(e) => {
                log::warn!("level {level} skipped: {e}");
                skipped_levels.push((level, e.to_string()));
            }
        }
    }
    Ok(ConvergenceTable {
        family: *spec,
        mode,
        reference_curvature: spec.reference_curvature(),
        rows,
        skipped_levels,
    })
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(format_value).unwrap_or_default();
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let fields = [
                r.level.to_string(),
                r.vertices.to_string(),
                format_value(r.mesh_size),
                format_value(r.dual_mesh_size),
                format_value(r.min_thickness),
                format_value(r.mean_thickness),
                format_value(r.dual_thickness),
                format_value(r.cell_min),
                format_value(r.cell_max),
                format_value(r.cell_mean),
                format_value(r.ricci_min),
                format_value(r.ricci_max),
                format_value(r.ricci_mean),
                format_value(r.max_deviation),
                opt(r.ricci_ratio),
                opt(r.ricci_ratio_half),
                r.obtuse_triangles.to_string(),
                r.skipped_quadruples.to_string(),
                r.unsolved_quadruples.to_string(),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> ConvergenceSummary {
        let ratios: Vec<f64> = self.rows.iter().filter_map(|r| r.ricci_ratio).collect();
        let ratio_differences: Vec<f64> = ratios.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let differences_decreasing = ratio_differences.windows(2).all(|w| w[1] < w[0]);
        let extrapolated_ratio = match ratios[..] {
            [.., a, b, c] if ((c - b) - (b - a)).abs() > 0.0 => {
                Some(c - (c - b).powi(2) / ((c - b) - (b - a)))
            }
            [.., last] => Some(last),
            [] => None,
        };
        ConvergenceSummary {
            family: self.family,
            mode: self.mode,
            levels: self.rows.iter().map(|r| r.level).collect(),
            ricci_ratios: ratios,
            ratio_differences,
            differences_decreasing,
            extrapolated_ratio,
            skipped_levels: self.skipped_levels.clone(),
        }
    }
}
