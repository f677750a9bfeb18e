//! Exhaustive search over the discrete blocks.

use crate::error::{Block, Error, Result};
use crate::physics::SolutionState;
use crate::scenario::ScenarioConfig;

use super::model;

/// Largest terminal count enumerated over the three task options.
pub const MAX_TASK_GTS: usize = 12;
/// Cap on the number of segment combinations.
pub const MAX_SEGMENT_COMBOS: usize = 531_441;

#[derive(Debug, Clone, PartialEq)]
pub struct TaskOracle {
    pub task_sat: Vec<bool>,
    pub task_uav: Vec<bool>,
    pub energy: f64,
    pub feasible: usize,
}

/// Best assignment of every terminal to no compression, the satellite or
/// the UAV, with everything else fixed. Codes run in base 3 with terminal 0
/// as the least significant digit (0 none, 1 satellite, 2 UAV); ties keep
/// the smallest code. UAV compression needs a positive CPU share.
pub fn enumerate_task_assignments(
    cfg: &ScenarioConfig,
    state: &SolutionState,
) -> Result<TaskOracle> {
    let n = cfg.num_gts();
    if n > MAX_TASK_GTS {
        return Err(Error::Size(format!(
            "3^{n} task assignments exceed the 3^{MAX_TASK_GTS} limit"
        )));
    }
    let mut trial = state.clone();
    let mut best: Option<TaskOracle> = None;
    let mut feasible = 0;
    'codes: for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        for k in 0..n {
            let digit = c % 3;
            c /= 3;
            if digit == 2 && !(state.allocation.cpu[k] > 0.0) {
                continue 'codes;
            }
            trial.allocation.task_sat[k] = digit == 1;
            trial.allocation.task_uav[k] = digit == 2;
        }
        let Some(eval) = model::evaluate(cfg, &trial) else {
            continue;
        };
        if !model::meets_deadlines(cfg, &eval) {
            continue;
        }
        feasible += 1;
        if best.as_ref().map_or(true, |b| eval.total < b.energy) {
            best = Some(TaskOracle {
                task_sat: trial.allocation.task_sat.clone(),
                task_uav: trial.allocation.task_uav.clone(),
                energy: eval.total,
                feasible: 0,
            });
        }
    }
    let mut best = best.ok_or_else(|| {
        Error::infeasible(Block::TaskAllocation, "no assignment meets every deadline")
    })?;
    best.feasible = feasible;
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentOracle {
    pub segments: Vec<usize>,
    pub energy: f64,
    pub feasible: usize,
}

/// Middle of segment `d`.
pub fn segment_midpoint(cfg: &ScenarioConfig, k: usize, d: usize) -> f64 {
    let segs = cfg.overhead_curves[k].segments();
    let upper = if d == 0 { 1.0 } else { segs[d - 1].lower };
    0.5 * (upper + segs[d].lower)
}

/// Best segment per terminal with every ratio at its segment's midpoint.
/// Combinations run with terminal 0 varying fastest; ties keep the first.
pub fn enumerate_segments(cfg: &ScenarioConfig, state: &SolutionState) -> Result<SegmentOracle> {
    let n = cfg.num_gts();
    let counts: Vec<usize> = cfg
        .overhead_curves
        .iter()
        .map(|c| c.num_segments())
        .collect();
    let total = counts
        .iter()
        .try_fold(1usize, |acc, &d| {
            acc.checked_mul(d).filter(|&v| v <= MAX_SEGMENT_COMBOS)
        })
        .ok_or_else(|| Error::Size(format!("segment combinations exceed {MAX_SEGMENT_COMBOS}")))?;
    let mut trial = state.clone();
    let mut choice = vec![0usize; n];
    let mut best: Option<SegmentOracle> = None;
    let mut feasible = 0;
    for code in 0..total {
        let mut c = code;
        for k in 0..n {
            choice[k] = c % counts[k];
            c /= counts[k];
            trial.allocation.ratio[k] = segment_midpoint(cfg, k, choice[k]);
        }
        let eval = model::evaluate_with(cfg, &trial, |k, rho| {
            Some(model::workload_in(cfg, k, choice[k], rho))
        });
        let Some(eval) = eval else { continue };
        if !model::meets_deadlines(cfg, &eval) {
            continue;
        }
        feasible += 1;
        if best.as_ref().map_or(true, |b| eval.total < b.energy) {
            best = Some(SegmentOracle {
                segments: choice.clone(),
                energy: eval.total,
                feasible: 0,
            });
        }
    }
    let mut best = best.ok_or_else(|| {
        Error::infeasible(
            Block::CompressionRatio,
            "no segment choice meets every deadline",
        )
    })?;
    best.feasible = feasible;
    Ok(best)
}
