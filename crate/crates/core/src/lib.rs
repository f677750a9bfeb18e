//! Energy-minimizing joint task, compression, radio and placement
//! allocation for a satellite that relays semantic data to ground terminals
//! through a UAV.
//!
//! [`algorithm::run_scheme`] is the usual entry point. The per-block solvers
//! live in [`subsolvers`] and the brute-force references used to check them
//! in [`oracle`].

pub mod algorithm;
pub mod error;
pub mod oracle;
pub mod physics;
pub mod scenario;
pub mod subsolvers;

pub use algorithm::{
    initialize, run_algorithm1, run_scheme, BlockRecord, BlockStatus, IterationRecord,
    IterationTrace, SchemeId, SolveOutcome,
};
pub use error::{Block, Error, Result};
pub use physics::{
    check_feasibility, energy_breakdown, latency_breakdown, Allocation, EnergyBreakdown,
    FeasibilityReport, LatencyBreakdown, Placement, SolutionState,
};
pub use scenario::{generate_gt_positions, OverheadCurve, ScenarioConfig, Segment};
pub use subsolvers::SolverOptions;
