//! Discrete curvature of piecewise-flat triangulated surfaces.
//!
//! The central quantity is the metric Ricci curvature obtained from the
//! dual cell complex: every dual 2-cell gets the Wald (embedding) curvature
//! of its vertex quadruples, and Ricci curvature in the direction of a dual
//! edge sums the curvatures of the cells sharing that edge. Combinatorial
//! angle defect, Stone's combinatorial Ricci curvature and the Menger
//! curvature measure are provided alongside, together with comparison and
//! Bonnet-Myers diameter checks.

pub mod complex;
pub mod curvature;
pub mod dual;
pub mod lab;
mod linalg;
pub mod wald;

pub use complex::{
    cayley_menger, circumradius, parse_metric_json, parse_off, skeleton_diameter, validate,
    ComplexError, Edge, MetricComplex, Simplex, ValidationReport,
};
