//! Grid references for the continuous blocks. Each one searches the
//! block's own variables directly, scoring points with [`super::model`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::physics::SolutionState;
use crate::scenario::ScenarioConfig;

use super::grid::{grid_minimize_zoom, Axis, GridMin, GridSpec};
use super::model::{self, MODEL_TOL};

/// Points per axis in each refinement round.
const ZOOM_POINTS: usize = 21;

fn uav_terminals(state: &SolutionState) -> Vec<usize> {
    (0..state.allocation.task_uav.len())
        .filter(|&k| state.allocation.task_uav[k])
        .collect()
}

/// UAV CPU shares of the UAV-compressed terminals minimizing UAV compute
/// energy under the deadlines and the CPU budget.
pub fn cpu_reference(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    points: usize,
    rounds: usize,
) -> Result<GridMin> {
    let uav = uav_terminals(state);
    if uav.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let axes = uav
        .iter()
        .map(|_| Axis::new(cfg.uav_cpu_total * 1e-9, cfg.uav_cpu_total, points))
        .collect::<Result<Vec<_>>>()?;
    let spec = GridSpec::new(axes, "deadlines met, CPU shares within budget");
    let mut trial = state.clone();
    grid_minimize_zoom(&spec, rounds, ZOOM_POINTS, |f| {
        for (i, &k) in uav.iter().enumerate() {
            trial.allocation.cpu[k] = f[i];
        }
        let used: f64 = trial.allocation.cpu.iter().sum();
        if used > cfg.uav_cpu_total * (1.0 + MODEL_TOL) {
            return None;
        }
        let eval = model::evaluate(cfg, &trial)?;
        model::meets_deadlines(cfg, &eval).then_some(eval.e_uav)
    })
}

/// Time each access link has once the shared and UAV compute delays are
/// paid, and its bit count.
fn access_budget(cfg: &ScenarioConfig, state: &SolutionState) -> Option<Vec<(f64, f64)>> {
    let eval = model::evaluate(cfg, state)?;
    let al = &state.allocation;
    let pl = &state.placement;
    Some(
        (0..cfg.num_gts())
            .map(|k| {
                let compressed = al.task_sat[k] || al.task_uav[k];
                let bits = if compressed { al.ratio[k] } else { 1.0 } * cfg.data_bits[k];
                let r = model::access_rate(
                    cfg,
                    pl.uav_xy,
                    pl.altitude,
                    pl.half_beamwidth,
                    k,
                    al.bandwidth[k],
                    al.power[k],
                );
                (cfg.latency_budget - (eval.latency[k] - bits / r), bits)
            })
            .collect(),
    )
}

/// Bandwidth split minimizing access-link energy. For a given bandwidth the
/// cheapest power is the one that just meets the deadline, since link
/// energy grows with power, so only bandwidths are gridded.
pub fn power_reference(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    points: usize,
    rounds: usize,
) -> Result<GridMin> {
    let budget = access_budget(cfg, state).ok_or(Error::EmptyGrid)?;
    if budget.iter().any(|&(slack, _)| !(slack > 0.0)) {
        return Err(Error::EmptyGrid);
    }
    let n = cfg.num_gts();
    let pl = state.placement;
    let axes = (0..n)
        .map(|_| {
            Axis::new(
                cfg.uav_bandwidth_total * 1e-6,
                cfg.uav_bandwidth_total,
                points,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = GridSpec::new(axes, "bandwidth and power within budget, deadlines met");
    let mut trial = state.clone();
    grid_minimize_zoom(&spec, rounds, ZOOM_POINTS, |b| {
        if b.iter().sum::<f64>() > cfg.uav_bandwidth_total * (1.0 + MODEL_TOL) {
            return None;
        }
        for k in 0..n {
            let (slack, bits) = budget[k];
            // Received SNR per watt at bandwidth b[k].
            let unit =
                model::access_rate(cfg, pl.uav_xy, pl.altitude, pl.half_beamwidth, k, b[k], 1.0);
            let per_watt = (unit * 2f64.ln() / b[k]).exp_m1();
            let need = (bits / (b[k] * slack) * 2f64.ln()).exp_m1();
            trial.allocation.bandwidth[k] = b[k];
            trial.allocation.power[k] = need / per_watt;
        }
        if trial.allocation.power.iter().sum::<f64>() > cfg.uav_power_budget * (1.0 + MODEL_TOL) {
            return None;
        }
        let eval = model::evaluate(cfg, &trial)?;
        model::meets_deadlines(cfg, &eval).then_some(eval.e_access)
    })
}

/// Ratios of the compressed terminals within the given segments minimizing
/// total energy under the deadlines.
pub fn ratio_reference(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    segments: &[usize],
    points: usize,
    rounds: usize,
) -> Result<GridMin> {
    let al = &state.allocation;
    let active: Vec<usize> = (0..cfg.num_gts())
        .filter(|&k| al.task_sat[k] || al.task_uav[k])
        .collect();
    if active.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let axes = active
        .iter()
        .map(|&k| {
            let segs = cfg.overhead_curves[k].segments();
            let d = segments[k];
            let upper = if d == 0 { 1.0 } else { segs[d - 1].lower };
            Axis::new(segs[d].lower, upper, points)
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = GridSpec::new(axes, "deadlines met");
    let mut trial = state.clone();
    grid_minimize_zoom(&spec, rounds, ZOOM_POINTS, |rho| {
        for (i, &k) in active.iter().enumerate() {
            trial.allocation.ratio[k] = rho[i];
        }
        let eval = model::evaluate_with(cfg, &trial, |k, r| {
            Some(model::workload_in(cfg, k, segments[k], r))
        })?;
        model::meets_deadlines(cfg, &eval).then_some(eval.total)
    })
}

/// Altitude and half-beamwidth, in that order, minimizing access-link
/// energy with every terminal covered and every deadline met.
pub fn altitude_reference(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    points: usize,
    rounds: usize,
) -> Result<GridMin> {
    let [t_lo, t_hi] = model::beamwidth_interval(cfg);
    let [h_lo, h_hi] = cfg.altitude_range;
    let xy = state.placement.uav_xy;
    let far = cfg
        .gt_positions
        .iter()
        .map(|g| (g[0] - xy[0]).hypot(g[1] - xy[1]))
        .fold(0.0, f64::max);
    // Search (theta, s) with the altitude running from the lowest covering
    // height at s = 0 to the ceiling at s = 1, so the curved coverage edge
    // becomes a grid line.
    let lift = |x: &[f64]| {
        let floor = h_lo.max(far / x[0].tan());
        (floor <= h_hi).then(|| floor + x[1] * (h_hi - floor))
    };
    let spec = GridSpec::new(
        vec![Axis::new(t_lo, t_hi, points)?, Axis::new(0.0, 1.0, points)?],
        "all terminals covered, deadlines met",
    );
    let mut trial = state.clone();
    let mut out = grid_minimize_zoom(&spec, rounds, ZOOM_POINTS, |x| {
        trial.placement.altitude = lift(x)?;
        trial.placement.half_beamwidth = x[0];
        if !model::covered(cfg, &trial) {
            return None;
        }
        let eval = model::evaluate(cfg, &trial)?;
        model::meets_deadlines(cfg, &eval).then_some(eval.e_access)
    })?;
    let h = lift(&out.point).expect("minimizer lies on an admissible column");
    out.point = vec![h, out.point[0]];
    Ok(out)
}

/// Horizontal UAV position minimizing access-link energy.
///
/// The admissible set is an intersection of disks centred on the terminals,
/// so the search runs in polar coordinates around each terminal in turn with
/// the radial axis ending on that terminal's disk edge. Every admissible
/// point is reached from every terminal; the best run wins.
pub fn location_reference(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    points: usize,
    rounds: usize,
) -> Result<GridMin> {
    let pl = state.placement;
    let cover = pl.altitude * pl.half_beamwidth.tan();
    let mut trial = state.clone();
    let mut best: Option<GridMin> = None;
    for (k, g) in cfg.gt_positions.iter().enumerate() {
        let Some(radius) = link_radius(cfg, &mut trial, k, cover) else {
            continue;
        };
        let spec = GridSpec::new(
            vec![Axis::new(-PI, PI, points)?, Axis::new(0.0, radius, points)?],
            "all terminals covered, deadlines met",
        );
        let at = |x: &[f64]| [g[0] + x[1] * x[0].cos(), g[1] + x[1] * x[0].sin()];
        let found = grid_minimize_zoom(&spec, rounds, ZOOM_POINTS, |x| {
            trial.placement.uav_xy = at(x);
            if !model::covered(cfg, &trial) {
                return None;
            }
            let eval = model::evaluate(cfg, &trial)?;
            model::meets_deadlines(cfg, &eval).then_some(eval.e_access)
        });
        if let Ok(mut m) = found {
            if best.as_ref().map_or(true, |b| m.value < b.value) {
                m.point = at(&m.point).to_vec();
                best = Some(m);
            }
        }
    }
    best.ok_or(Error::EmptyGrid)
}

/// Largest distance from terminal `k` at which it is covered and its own
/// link meets the deadline; `None` if not even the point overhead works.
fn link_radius(
    cfg: &ScenarioConfig,
    trial: &mut SolutionState,
    k: usize,
    cover: f64,
) -> Option<f64> {
    let g = cfg.gt_positions[k];
    let mut ok = |d: f64| {
        trial.placement.uav_xy = [g[0] + d, g[1]];
        model::evaluate(cfg, trial)
            .is_some_and(|e| e.latency[k] <= cfg.latency_budget * (1.0 + MODEL_TOL))
    };
    if !ok(0.0) {
        return None;
    }
    if ok(cover) {
        return Some(cover);
    }
    let (mut lo, mut hi) = (0.0, cover);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo > 0.0).then_some(lo)
}
