//! Per-block optimizers. Each takes the full state, optimizes its own
//! variables with everything else fixed, and returns the new values without
//! touching the input.

pub mod altitude;
pub mod cpu;
pub mod dual;
pub mod location;
pub mod lp;
mod options;
pub mod power;
pub mod ratio;
pub mod segment;
pub mod task;

pub use altitude::{solve_altitude_beamwidth, AltitudeBeamwidth, AltitudeCase};
pub use cpu::solve_cpu_allocation;
pub use dual::{dual_subgradient, DualAdapter, DualOutcome};
pub use location::{solve_location, LocationLandscape, LocationResult};
pub use options::SolverOptions;
pub use power::{solve_power_bandwidth, PowerBandwidth};
pub use ratio::{solve_ratio_lp, RatioSolution};
pub use segment::{current_segments, select_segments, SegmentChoice};
pub use task::{solve_task_allocation, TaskAssignment};
