//! Mesh families and convergence experiments.

mod convergence;
mod generate;

pub use convergence::{
    convergence_experiment, ConvergenceRow, ConvergenceSummary, ConvergenceTable, LabError,
    MeshFamilySpec, COLUMNS,
};
pub use generate::{
    gen_flat_torus, gen_icosphere, icosahedron, tetrahedron, GenerateError, MAX_ICOSPHERE_LEVEL,
};
