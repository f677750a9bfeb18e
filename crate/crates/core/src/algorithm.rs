//! The alternating outer loop over the six variable blocks, and the
//! baseline schemes built from it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Block, Error, Result};
use crate::physics::{
    self, check_feasibility, energy_breakdown, latency_breakdown, Allocation, EnergyBreakdown,
    LatencyBreakdown, Placement, SolutionState,
};
use crate::scenario::{OverheadCurve, ScenarioConfig};
use crate::subsolvers::{
    current_segments, ratio::BOUNDARY_OFFSET, select_segments, solve_altitude_beamwidth,
    solve_cpu_allocation, solve_location, solve_power_bandwidth, solve_ratio_lp,
    solve_task_allocation, SolverOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    SaginPsc,
    NonSemantic,
    RandomComp,
    FixedLocation,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [
        SchemeId::SaginPsc,
        SchemeId::NonSemantic,
        SchemeId::RandomComp,
        SchemeId::FixedLocation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::SaginPsc => "sagin_psc",
            SchemeId::NonSemantic => "non_semantic",
            SchemeId::RandomComp => "random_comp",
            SchemeId::FixedLocation => "fixed_location",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::invalid("scheme", format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockStatus {
    /// Output adopted.
    Accepted,
    /// Output computed but would have made the state worse.
    Rejected,
    /// The block problem had no solution; variables kept.
    Infeasible,
    /// Block disabled by the scheme.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub block: Block,
    pub status: BlockStatus,
    /// Total energy after the block.
    pub objective: f64,
    /// Scaled constraint violation after the block (0 when feasible).
    pub violation: f64,
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub blocks: Vec<BlockRecord>,
    pub objective: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub initial_objective: f64,
    pub initial_feasible: bool,
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
}

impl IterationTrace {
    /// Objective before the first iteration and after each one.
    pub fn objectives(&self) -> Vec<f64> {
        std::iter::once(self.initial_objective)
            .chain(self.iterations.iter().map(|it| it.objective))
            .collect()
    }

    /// Objective at every block boundary, starting from the initial state.
    pub fn block_objectives(&self) -> Vec<f64> {
        std::iter::once(self.initial_objective)
            .chain(
                self.iterations
                    .iter()
                    .flat_map(|it| it.blocks.iter().map(|b| b.objective)),
            )
            .collect()
    }

    /// Whether the objective never rises by more than `rel_tol` between
    /// consecutive block boundaries.
    pub fn is_monotone(&self, rel_tol: f64) -> bool {
        self.block_objectives()
            .windows(2)
            .all(|w| w[1] <= w[0] + rel_tol * w[0].abs())
    }

    /// Copy with wall-clock times zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        let mut t = self.clone();
        for it in &mut t.iterations {
            for b in &mut it.blocks {
                b.wall_time_s = 0.0;
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub scheme: SchemeId,
    pub state: SolutionState,
    pub energy: EnergyBreakdown,
    pub latency: LatencyBreakdown,
    pub trace: IterationTrace,
    pub feasible: bool,
}

impl SolveOutcome {
    pub fn iterations(&self) -> usize {
        self.trace.iterations.len()
    }
}

/// Equal resource split, no compression, UAV over the terminals' centroid at
/// the lowest altitude whose narrowest covering beam is admissible.
pub fn initialize(cfg: &ScenarioConfig) -> Result<SolutionState> {
    cfg.validate()?;
    let k = cfg.num_gts();
    let n = k as f64;
    let centroid = cfg
        .gt_positions
        .iter()
        .fold([0.0, 0.0], |acc, p| [acc[0] + p[0] / n, acc[1] + p[1] / n]);
    let l_max = physics::max_gt_distance(cfg, centroid);
    let [h_min, h_max] = cfg.altitude_range;
    let [t_min, t_max] = cfg.beamwidth_bounds();
    let mut theta = t_min.max((l_max / h_min).atan());
    let mut altitude = h_min;
    if theta > t_max {
        theta = t_max;
        altitude = l_max / t_max.tan();
        if altitude > h_max {
            return Err(Error::invalid(
                "altitude_range",
                "no admissible altitude and beamwidth cover every terminal",
            ));
        }
    }
    Ok(SolutionState {
        placement: Placement {
            uav_xy: centroid,
            altitude,
            half_beamwidth: theta,
        },
        allocation: Allocation {
            bandwidth: vec![cfg.uav_bandwidth_total / n; k],
            cpu: vec![0.0; k],
            power: vec![cfg.uav_power_budget / n; k],
            ratio: vec![1.0; k],
            task_sat: vec![false; k],
            task_uav: vec![false; k],
        },
    })
}

/// Which blocks a scheme runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockMask([bool; 6]);

impl BlockMask {
    pub const ALL: BlockMask = BlockMask([true; 6]);

    pub fn without(mut self, block: Block) -> Self {
        self.0[block_index(block)] = false;
        self
    }

    pub fn enabled(&self, block: Block) -> bool {
        self.0[block_index(block)]
    }
}

fn block_index(block: Block) -> usize {
    Block::ALL
        .iter()
        .position(|&b| b == block)
        .expect("known block")
}

/// Energy and scaled violation; `None` when the model cannot be evaluated.
fn merit(cfg: &ScenarioConfig, state: &SolutionState) -> Option<(f64, f64)> {
    let e = energy_breakdown(cfg, state).ok()?.total;
    Some((e, check_feasibility(cfg, state).measure()))
}

/// Adopt `cand` over `cur`? Feasible states only move to feasible states of
/// no higher energy; infeasible ones accept any reduction in violation.
fn accept(cur: (f64, f64), cand: (f64, f64)) -> bool {
    let (e0, v0) = cur;
    let (e1, v1) = cand;
    if v0 == 0.0 {
        v1 == 0.0 && e1 <= e0
    } else {
        v1 < v0 || (v1 <= v0 && e1 <= e0)
    }
}

fn run_block(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    block: Block,
    opts: &SolverOptions,
) -> Result<SolutionState> {
    let mut next = state.clone();
    match block {
        Block::TaskAllocation => {
            // Terminals without CPU get a provisional equal share so UAV
            // compression can be priced at all.
            let share = cfg.uav_cpu_total / cfg.num_gts() as f64;
            for f in next.allocation.cpu.iter_mut() {
                if *f <= 0.0 {
                    *f = share;
                }
            }
            // An uncompressed terminal usually sits at ratio 1, where
            // compression never pays. Also price it at each segment floor.
            let depth = cfg
                .overhead_curves
                .iter()
                .map(|c| c.num_segments())
                .max()
                .unwrap_or(0);
            let mut best: Option<(SolutionState, (f64, f64))> = None;
            let mut last_err = None;
            for d in std::iter::once(None).chain((0..depth).map(Some)) {
                let mut trial = next.clone();
                if let Some(d) = d {
                    for k in 0..cfg.num_gts() {
                        if !state.allocation.compressed(k) {
                            let floors = ratio_floors(&cfg.overhead_curves[k]);
                            trial.allocation.ratio[k] = floors[d.min(floors.len() - 1)];
                        }
                    }
                }
                let out = match solve_task_allocation(cfg, &trial, opts) {
                    Ok(out) => out,
                    Err(e) => {
                        last_err = Some(e);
                        continue;
                    }
                };
                for k in 0..cfg.num_gts() {
                    if !out.task_uav[k] {
                        trial.allocation.cpu[k] = 0.0;
                    }
                    if !(out.task_sat[k] || out.task_uav[k]) {
                        trial.allocation.ratio[k] = state.allocation.ratio[k];
                    }
                }
                trial.allocation.task_sat = out.task_sat;
                trial.allocation.task_uav = out.task_uav;
                let Some(m) = merit(cfg, &trial) else {
                    continue;
                };
                if best.as_ref().map_or(true, |(_, b)| (m.1, m.0) < (b.1, b.0)) {
                    best = Some((trial, m));
                }
            }
            match best {
                Some((trial, _)) => next = trial,
                None => {
                    return Err(last_err.unwrap_or_else(|| {
                        Error::Degenerate("no task candidate evaluates".into())
                    }))
                }
            }
        }
        Block::CompressionRatio => {
            let incumbent = current_segments(cfg, state)?;
            let mut choices = Vec::with_capacity(2);
            match select_segments(cfg, state, opts) {
                Ok(choice) => choices.push(choice.chosen_segment),
                Err(e) if e.is_infeasible() => {}
                Err(e) => return Err(e),
            }
            if !choices.contains(&incumbent) {
                choices.push(incumbent);
            }
            let mut best: Option<(Vec<f64>, f64)> = None;
            let mut last_err = None;
            for segs in &choices {
                match solve_ratio_lp(cfg, state, segs, opts) {
                    Ok(sol) => {
                        if best.as_ref().map_or(true, |(_, e)| sol.objective < *e) {
                            best = Some((sol.ratio, sol.objective));
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            match best {
                Some((ratio, _)) => next.allocation.ratio = ratio,
                None => return Err(last_err.expect("at least one segment choice was tried")),
            }
        }
        Block::CpuAllocation => {
            next.allocation.cpu = solve_cpu_allocation(cfg, state)?;
        }
        Block::PowerBandwidth => {
            let out = solve_power_bandwidth(cfg, state, opts)?;
            next.allocation.bandwidth = out.bandwidth;
            next.allocation.power = out.power;
        }
        Block::AltitudeBeamwidth => {
            let out = solve_altitude_beamwidth(cfg, state, opts)?;
            next.placement.altitude = out.altitude;
            next.placement.half_beamwidth = out.half_beamwidth;
        }
        Block::Location => {
            next.placement.uav_xy = solve_location(cfg, state, opts)?.uav_xy;
        }
    }
    Ok(next)
}

fn finish(
    cfg: &ScenarioConfig,
    scheme: SchemeId,
    state: SolutionState,
    trace: IterationTrace,
) -> Result<SolveOutcome> {
    let latency = latency_breakdown(cfg, &state)?;
    let energy = physics::energy_from_latency(cfg, &state, &latency);
    let feasible = check_feasibility(cfg, &state).is_feasible();
    let outcome = SolveOutcome {
        scheme,
        state,
        energy,
        latency,
        trace,
        feasible,
    };
    if feasible {
        Ok(outcome)
    } else {
        Err(Error::NeverFeasible(Box::new(outcome)))
    }
}

fn run_blocks(
    cfg: &ScenarioConfig,
    opts: &SolverOptions,
    init: SolutionState,
    mask: BlockMask,
    scheme: SchemeId,
) -> Result<SolveOutcome> {
    opts.validate()?;
    let mut state = init;
    let mut cur = merit(cfg, &state)
        .ok_or_else(|| Error::Degenerate("initial state cannot be evaluated".into()))?;
    let mut trace = IterationTrace {
        initial_objective: cur.0,
        initial_feasible: cur.1 == 0.0,
        iterations: Vec::new(),
        converged: false,
    };
    for _ in 0..opts.max_outer_iters {
        let before = cur;
        let before_alloc = state.allocation.clone();
        let mut blocks = Vec::with_capacity(6);
        for block in Block::ALL {
            let started = Instant::now();
            let (status, note) = if !mask.enabled(block) {
                (BlockStatus::Skipped, None)
            } else {
                match run_block(cfg, &state, block, opts) {
                    Ok(cand) => match merit(cfg, &cand) {
                        Some(m) if accept(cur, m) => {
                            state = cand;
                            cur = m;
                            (BlockStatus::Accepted, None)
                        }
                        _ => (BlockStatus::Rejected, None),
                    },
                    Err(e) => (BlockStatus::Infeasible, Some(e.to_string())),
                }
            };
            blocks.push(BlockRecord {
                block,
                status,
                objective: cur.0,
                violation: cur.1,
                wall_time_s: started.elapsed().as_secs_f64(),
                note,
            });
        }
        trace.iterations.push(IterationRecord {
            blocks,
            objective: cur.0,
            feasible: cur.1 == 0.0,
        });
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-300);
        let energy_settled = rel(before.0, cur.0) < opts.outer_tolerance;
        let violation_settled = before.1 == cur.1 || rel(before.1, cur.1) < opts.outer_tolerance;
        // A ratio move can leave the energy unchanged while enabling a better
        // assignment on the next pass, so the discrete pattern must settle too.
        let alloc = &state.allocation;
        let pattern_settled = alloc.task_sat == before_alloc.task_sat
            && alloc.task_uav == before_alloc.task_uav
            && alloc
                .ratio
                .iter()
                .zip(&before_alloc.ratio)
                .all(|(a, b)| (a - b).abs() < opts.outer_tolerance);
        if energy_settled && violation_settled && pattern_settled {
            trace.converged = true;
            break;
        }
    }
    finish(cfg, scheme, state, trace)
}

/// Runs every block in order until the objective settles.
pub fn run_algorithm1(
    cfg: &ScenarioConfig,
    opts: &SolverOptions,
    init: SolutionState,
) -> Result<SolveOutcome> {
    run_blocks(cfg, opts, init, BlockMask::ALL, SchemeId::SaginPsc)
}

/// The outcome of a run whether or not it reached feasibility.
pub fn best_effort(result: Result<SolveOutcome>) -> Result<SolveOutcome> {
    match result {
        Err(Error::NeverFeasible(outcome)) => Ok(*outcome),
        other => other,
    }
}

/// Lowest ratio of each segment, nudged inside the segment except for the
/// last one whose floor is attained.
fn ratio_floors(curve: &OverheadCurve) -> Vec<f64> {
    let last = curve.num_segments() - 1;
    (0..=last)
        .map(|d| {
            let lo = curve.lower(d);
            if d == last {
                lo
            } else {
                lo * (1.0 + BOUNDARY_OFFSET)
            }
        })
        .collect()
}

/// Per-terminal satellite compression that minimizes the shared latency,
/// used to start the full loop when the uncompressed solution misses the
/// deadline.
pub fn latency_start(cfg: &ScenarioConfig, base: &SolutionState) -> SolutionState {
    let mut state = base.clone();
    let r_su = physics::rate_sat_uav(cfg);
    for k in 0..cfg.num_gts() {
        let curve = &cfg.overhead_curves[k];
        let data = cfg.data_bits[k];
        let mut best = (data / r_su, false, 1.0);
        let mut candidates = vec![1.0];
        candidates.extend(ratio_floors(curve));
        for rho in candidates {
            let Ok(o) = curve.eval(rho) else { continue };
            let t = cfg.cycles_per_overhead * o / cfg.sat_cpu + rho * data / r_su;
            if t < best.0 {
                best = (t, true, rho);
            }
        }
        state.allocation.task_sat[k] = best.1;
        state.allocation.task_uav[k] = false;
        state.allocation.cpu[k] = 0.0;
        state.allocation.ratio[k] = best.2;
    }
    state
}

fn warm_started(
    cfg: &ScenarioConfig,
    opts: &SolverOptions,
    mask: BlockMask,
    scheme: SchemeId,
) -> Result<SolveOutcome> {
    let init = initialize(cfg)?;
    let baseline_mask = mask
        .without(Block::TaskAllocation)
        .without(Block::CompressionRatio)
        .without(Block::CpuAllocation);
    let baseline = best_effort(run_blocks(
        cfg,
        opts,
        init,
        baseline_mask,
        SchemeId::NonSemantic,
    ))?;
    let start = if baseline.feasible {
        baseline.state
    } else {
        let alt = latency_start(cfg, &baseline.state);
        match (merit(cfg, &baseline.state), merit(cfg, &alt)) {
            (Some(a), Some(b)) if (b.1, b.0) < (a.1, a.0) => alt,
            _ => baseline.state,
        }
    };
    run_blocks(cfg, opts, start, mask, scheme)
}

pub fn run_scheme(
    cfg: &ScenarioConfig,
    scheme: SchemeId,
    opts: &SolverOptions,
    seed: u64,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    opts.validate()?;
    match scheme {
        SchemeId::NonSemantic => {
            let mask = BlockMask::ALL
                .without(Block::TaskAllocation)
                .without(Block::CompressionRatio)
                .without(Block::CpuAllocation);
            run_blocks(cfg, opts, initialize(cfg)?, mask, scheme)
        }
        SchemeId::RandomComp => {
            let mut init = initialize(cfg)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = cfg.num_gts();
            for i in 0..k {
                match rng.gen_range(0..3) {
                    1 => init.allocation.task_sat[i] = true,
                    2 => init.allocation.task_uav[i] = true,
                    _ => {}
                }
            }
            let on_uav = init.allocation.task_uav.iter().filter(|u| **u).count();
            for i in 0..k {
                if init.allocation.task_uav[i] {
                    init.allocation.cpu[i] = cfg.uav_cpu_total / on_uav as f64;
                }
            }
            run_blocks(
                cfg,
                opts,
                init,
                BlockMask::ALL.without(Block::TaskAllocation),
                scheme,
            )
        }
        SchemeId::SaginPsc => warm_started(cfg, opts, BlockMask::ALL, scheme),
        SchemeId::FixedLocation => {
            warm_started(cfg, opts, BlockMask::ALL.without(Block::Location), scheme)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_layout_centers_uav() {
        let cfg = ScenarioConfig::reference(vec![
            [100.0, 100.0],
            [-100.0, 100.0],
            [-100.0, -100.0],
            [100.0, -100.0],
        ]);
        let s = initialize(&cfg).unwrap();
        assert!(s.placement.uav_xy[0].abs() < 1e-12 && s.placement.uav_xy[1].abs() < 1e-12);
        assert!(check_feasibility(&cfg, &s)
            .violations
            .iter()
            .all(|v| v.constraint == physics::Constraint::Latency));
    }

    #[test]
    fn single_terminal_init() {
        let cfg = ScenarioConfig::reference(vec![[12.0, -7.0]]);
        let s = initialize(&cfg).unwrap();
        assert_eq!(s.placement.uav_xy, [12.0, -7.0]);
        assert_eq!(s.placement.half_beamwidth, cfg.beamwidth_bounds()[0]);
        assert_eq!(s.placement.altitude, cfg.altitude_range[0]);
    }

    #[test]
    fn scheme_names_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.name().parse::<SchemeId>().unwrap(), id);
        }
        assert!("psc".parse::<SchemeId>().is_err());
    }

    #[test]
    fn acceptance_rule() {
        assert!(accept((1.0, 0.0), (0.9, 0.0)));
        assert!(!accept((1.0, 0.0), (0.5, 0.1)));
        assert!(accept((1.0, 0.3), (2.0, 0.1)));
        assert!(!accept((1.0, 0.3), (0.5, 0.4)));
    }
}
