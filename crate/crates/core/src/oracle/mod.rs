//! Brute-force references for checking the block solvers: exhaustive
//! enumeration of the discrete blocks, grid search over the continuous ones,
//! and extended-precision evaluation of the link formulas. All of it runs
//! on its own implementation of the model in [`model`].

pub mod enumerate;
pub mod extended;
pub mod grid;
pub mod instances;
pub mod joint;
pub mod model;
pub mod reference;
pub mod suite;

pub use enumerate::{enumerate_segments, enumerate_task_assignments, SegmentOracle, TaskOracle};
pub use extended::{eval_extended, eval_formula_extended, Dd, FormulaArgs, FormulaId};
pub use grid::{grid_minimize, grid_minimize_zoom, Axis, GridMin, GridSpec};
pub use joint::{joint_reference, JointOracle};
pub use reference::{
    altitude_reference, cpu_reference, location_reference, power_reference, ratio_reference,
};
