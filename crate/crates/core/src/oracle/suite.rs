//! Randomized agreement checks between the block solvers and the oracles.
//! Each suite draws seeded instances, skips those its block cannot handle,
//! and tallies the instances that break a pinned tolerance.

use crate::error::Result;
use crate::physics::{self, latency_breakdown, Placement, SolutionState};
use crate::scenario::ScenarioConfig;
use crate::subsolvers::{
    altitude::coverage_altitude, current_segments, select_segments, solve_altitude_beamwidth,
    solve_cpu_allocation, solve_location, solve_power_bandwidth, solve_ratio_lp,
    solve_task_allocation, LocationLandscape, SolverOptions,
};

use super::enumerate::{enumerate_segments, enumerate_task_assignments};
use super::extended::{eval_extended, FormulaArgs, FormulaId};
use super::instances::InstanceGen;
use super::model;
use super::reference::{
    altitude_reference, cpu_reference, location_reference, power_reference, ratio_reference,
};

/// Closed-form CPU shares must meet the deadline this tightly.
pub const CPU_TIGHTNESS_TOL: f64 = 1e-12;
pub const CPU_GAP_TOL: f64 = 1e-4;
pub const POWER_RESIDUAL_TOL: f64 = 1e-6;
pub const POWER_GAP_TOL: f64 = 1e-4;
pub const LP_GAP_TOL: f64 = 1e-6;
pub const PLACEMENT_GAP_TOL: f64 = 1e-3;
pub const FORMULA_TOL: f64 = 1e-12;
/// Objectives closer than this count as the same discrete optimum.
pub const DISCRETE_TIE_TOL: f64 = 1e-9;

const GRID_POINTS: usize = 201;
const ZOOM_ROUNDS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub required: usize,
    pub instances: usize,
    /// Instances that broke a tolerance.
    pub failures: usize,
    /// Discrete disagreements the solver itself flagged as uncertified.
    pub flagged: usize,
    /// Largest value seen of each monitored quantity.
    pub worst: Vec<(&'static str, f64)>,
}

impl SuiteReport {
    fn new(name: &'static str, required: usize, metrics: &[&'static str]) -> Self {
        SuiteReport {
            name,
            required,
            instances: 0,
            failures: 0,
            flagged: 0,
            worst: metrics.iter().map(|&m| (m, 0.0)).collect(),
        }
    }

    fn record(&mut self, metric: &'static str, value: f64) {
        let slot = self
            .worst
            .iter_mut()
            .find(|(m, _)| *m == metric)
            .expect("declared metric");
        if value > slot.1 || value.is_nan() {
            slot.1 = value;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances >= self.required
    }

    pub fn summary(&self) -> String {
        let worst: Vec<String> = self
            .worst
            .iter()
            .map(|(m, v)| format!("{m}={v:.3e}"))
            .collect();
        format!(
            "{}: {}/{} instances, {} failures, {} flagged; worst {}",
            self.name,
            self.instances,
            self.required,
            self.failures,
            self.flagged,
            worst.join(" ")
        )
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Draws instances until `count` are accepted by `run` or the attempt cap
/// is reached. `run` returns `None` to skip an instance.
fn drive<F>(seed: u64, count: usize, k: usize, mut run: F)
where
    F: FnMut(&mut InstanceGen, ScenarioConfig, SolutionState) -> Option<()>,
{
    let mut gen = InstanceGen::new(seed);
    let mut accepted = 0;
    for _ in 0..count * 200 {
        if accepted == count {
            break;
        }
        let cfg = gen.scenario(k);
        let state = gen.state(&cfg);
        if run(&mut gen, cfg, state).is_some() {
            accepted += 1;
        }
    }
}

/// Closed-form UAV CPU shares: deadline tightness and agreement with a grid
/// over both shares.
pub fn cpu_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("cpu", count, &["tightness", "gap"]);
    drive(seed, count, 2, |_, cfg, mut state| {
        state.allocation.task_uav[0] = true;
        state.allocation.task_sat[0] = false;
        let cpu = solve_cpu_allocation(&cfg, &state).ok()?;
        let oracle = cpu_reference(&cfg, &state, GRID_POINTS, ZOOM_ROUNDS).ok()?;
        state.allocation.cpu = cpu;
        let lat = latency_breakdown(&cfg, &state).ok()?;
        let mut bad = false;
        for k in 0..2 {
            if state.allocation.task_uav[k] {
                let t = rel(lat.total[k], cfg.latency_budget);
                rep.record("tightness", t);
                bad |= t > CPU_TIGHTNESS_TOL;
            }
        }
        let ours = model::evaluate(&cfg, &state)?.e_uav;
        let gap = (ours - oracle.value) / oracle.value;
        rep.record("gap", gap.abs());
        bad |= gap > CPU_GAP_TOL;
        rep.instances += 1;
        rep.failures += bad as usize;
        Some(())
    });
    rep
}

/// Power and bandwidth: deadlines met with equality and agreement with a
/// grid over the bandwidth split.
pub fn power_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("power_bandwidth", count, &["residual", "gap"]);
    let opts = SolverOptions::default();
    drive(seed, count, 2, |_, cfg, state| {
        let out = solve_power_bandwidth(&cfg, &state, &opts).ok()?;
        let oracle = power_reference(&cfg, &state, GRID_POINTS, ZOOM_ROUNDS).ok()?;
        let mut next = state.clone();
        next.allocation.bandwidth = out.bandwidth.clone();
        next.allocation.power = out.power.clone();
        let lat = latency_breakdown(&cfg, &next).ok()?;
        let mut bad = false;
        for t in &lat.total {
            let r = rel(*t, cfg.latency_budget);
            rep.record("residual", r);
            bad |= r > POWER_RESIDUAL_TOL;
        }
        let gap = (out.objective - oracle.value) / oracle.value;
        rep.record("gap", gap.abs());
        bad |= gap > POWER_GAP_TOL;
        rep.instances += 1;
        rep.failures += bad as usize;
        Some(())
    });
    rep
}

/// Task assignment against enumeration of all 3^K assignments.
pub fn task_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("task_allocation", count, &["gap"]);
    let opts = SolverOptions::default();
    drive(seed, count, 2, |_, cfg, state| {
        let ours = solve_task_allocation(&cfg, &state, &opts);
        let oracle = enumerate_task_assignments(&cfg, &state);
        match (ours, oracle) {
            // Agreement on infeasibility says nothing about optimality.
            (Err(a), Err(b)) if a.is_infeasible() && b.is_infeasible() => return None,
            (Ok(ours), Ok(oracle)) => {
                let mut trial = state.clone();
                trial.allocation.task_sat = ours.task_sat.clone();
                trial.allocation.task_uav = ours.task_uav.clone();
                let energy = model::evaluate(&cfg, &trial).map_or(f64::INFINITY, |e| e.total);
                let gap = (energy - oracle.energy) / oracle.energy;
                rep.record("gap", gap.abs());
                let same = ours.task_sat == oracle.task_sat && ours.task_uav == oracle.task_uav;
                if !same && gap > DISCRETE_TIE_TOL {
                    if ours.certified {
                        rep.failures += 1;
                    } else {
                        rep.flagged += 1;
                    }
                }
            }
            _ => rep.failures += 1,
        }
        rep.instances += 1;
        Some(())
    });
    rep
}

/// Segment selection against enumeration of all D^K choices.
pub fn segment_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("segment_selection", count, &["gap"]);
    let opts = SolverOptions::default();
    drive(seed, count, 2, |gen, cfg, mut state| {
        for k in 0..2 {
            let sat = gen.uniform() < 0.5;
            state.allocation.task_sat[k] = sat;
            state.allocation.task_uav[k] = !sat;
        }
        let ours = select_segments(&cfg, &state, &opts);
        let oracle = enumerate_segments(&cfg, &state);
        match (ours, oracle) {
            // Agreement on infeasibility says nothing about optimality.
            (Err(a), Err(b)) if a.is_infeasible() && b.is_infeasible() => return None,
            (Ok(ours), Ok(oracle)) => {
                let gap = (ours.objective - oracle.energy) / oracle.energy;
                rep.record("gap", gap.abs());
                if ours.chosen_segment != oracle.segments && gap > DISCRETE_TIE_TOL {
                    if ours.certified {
                        rep.failures += 1;
                    } else {
                        rep.flagged += 1;
                    }
                }
            }
            _ => rep.failures += 1,
        }
        rep.instances += 1;
        Some(())
    });
    rep
}

/// Ratio LP against a zoomed grid over both ratios within fixed segments.
pub fn ratio_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("ratio_lp", count, &["gap"]);
    let opts = SolverOptions::default();
    drive(seed, count, 2, |gen, cfg, mut state| {
        for k in 0..2 {
            let sat = gen.uniform() < 0.5;
            state.allocation.task_sat[k] = sat;
            state.allocation.task_uav[k] = !sat;
        }
        let segments = current_segments(&cfg, &state).ok()?;
        let ours = solve_ratio_lp(&cfg, &state, &segments, &opts).ok()?;
        let oracle = ratio_reference(&cfg, &state, &segments, GRID_POINTS, ZOOM_ROUNDS).ok()?;
        let gap = (ours.objective - oracle.value) / oracle.value;
        rep.record("gap", gap.abs());
        rep.instances += 1;
        rep.failures += (gap > LP_GAP_TOL) as usize;
        Some(())
    });
    rep
}

/// Starts from a random state and runs the power block so the placement
/// blocks see the tight deadlines they meet inside the full loop.
fn placement_instance(cfg: &ScenarioConfig, state: SolutionState) -> Option<SolutionState> {
    let out = solve_power_bandwidth(cfg, &state, &SolverOptions::default()).ok()?;
    let mut s = state;
    // Loosen the links slightly so that placement has room to move.
    s.allocation.bandwidth = out.bandwidth;
    s.allocation.power = out.power.iter().map(|p| p * 1.5).collect();
    let total: f64 = s.allocation.power.iter().sum();
    if total > cfg.uav_power_budget {
        let scale = cfg.uav_power_budget / total;
        s.allocation.power.iter_mut().for_each(|p| *p *= scale);
    }
    Some(s)
}

/// Altitude and beamwidth against a zoomed grid over both.
pub fn altitude_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "altitude_beamwidth",
        count,
        &["theta_cells", "gap", "identity"],
    );
    let opts = SolverOptions::default();
    drive(seed, count, 3, |_, cfg, state| {
        let state = placement_instance(&cfg, state)?;
        let ours = solve_altitude_beamwidth(&cfg, &state, &opts).ok()?;
        let oracle = altitude_reference(&cfg, &state, GRID_POINTS, ZOOM_ROUNDS).ok()?;
        let l_max = physics::max_gt_distance(&cfg, state.placement.uav_xy);
        let exact = coverage_altitude(cfg.altitude_range[0], l_max, ours.half_beamwidth);
        let identity = (ours.altitude != exact) as u8 as f64;
        let cells = (ours.half_beamwidth - oracle.point[1]).abs() / opts.grid_step_theta;
        let gap = (ours.objective - oracle.value) / oracle.value;
        rep.record("theta_cells", cells);
        rep.record("gap", gap.abs());
        rep.record("identity", identity);
        rep.instances += 1;
        rep.failures += (identity > 0.0 || cells > 1.0 + 1e-9 || gap > PLACEMENT_GAP_TOL) as usize;
        Some(())
    });
    rep
}

/// UAV position against a zoomed grid over the coverage box.
pub fn location_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("location", count, &["cells", "gap"]);
    let opts = SolverOptions::default();
    drive(seed, count, 3, |_, cfg, state| {
        let state = placement_instance(&cfg, state)?;
        let ours = solve_location(&cfg, &state, &opts).ok()?;
        let oracle = location_reference(&cfg, &state, GRID_POINTS, ZOOM_ROUNDS).ok()?;
        let [lo, hi] = LocationLandscape::new(&cfg, &state).ok()?.bounding_box()?;
        let n = (opts.location_grid_points - 1) as f64;
        let cells = (0..2)
            .map(|i| (ours.uav_xy[i] - oracle.point[i]).abs() / ((hi[i] - lo[i]) / n))
            .fold(0.0, f64::max);
        let gap = (ours.objective - oracle.value) / oracle.value;
        rep.record("cells", cells);
        rep.record("gap", gap.abs());
        rep.instances += 1;
        rep.failures += (cells > 1.0 + 1e-9 || gap > PLACEMENT_GAP_TOL) as usize;
        Some(())
    });
    rep
}

/// Double-precision formulas against the double-double evaluations.
pub fn formula_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("formulas", count, &["r_SU", "t_P", "g_k", "r_k", "O_k"]);
    let mut gen = InstanceGen::new(seed);
    for _ in 0..count {
        let mut cfg = gen.scenario(2);
        cfg.sat_uav_distance = 1e5 + 9e5 * gen.uniform();
        cfg.sat_beam_gain = 10f64.powf(1.5 + 1.5 * gen.uniform());
        let placement = Placement {
            uav_xy: [300.0 * (gen.uniform() - 0.5), 300.0 * (gen.uniform() - 0.5)],
            altitude: 50.0 + 450.0 * gen.uniform(),
            half_beamwidth: 0.05 + 1.4 * gen.uniform(),
        };
        let args = FormulaArgs {
            gt: 1,
            placement,
            bandwidth: 1e5 + 1e7 * gen.uniform(),
            power: 1e-4 + gen.uniform(),
            ratio: 0.25 + 0.75 * gen.uniform(),
        };
        let ours = [
            physics::rate_sat_uav(&cfg),
            physics::propagation_delay(&cfg),
            physics::channel_gain_ug(&cfg, &placement, 1),
            physics::rate_uav_gt(&cfg, &placement, args.bandwidth, args.power, 1)?,
            cfg.cycles_per_overhead * cfg.overhead_curves[1].eval(args.ratio)?,
        ];
        let mut bad = false;
        for (id, value) in FormulaId::ALL.into_iter().zip(ours) {
            let reference = eval_extended(id, &cfg, &args)?.to_f64();
            let r = rel(value, reference);
            rep.record(id.name(), r);
            bad |= r > FORMULA_TOL;
        }
        rep.instances += 1;
        rep.failures += bad as usize;
    }
    Ok(rep)
}
