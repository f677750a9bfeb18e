//! A second, deliberately plain implementation of the system model. It
//! shares no code with [`crate::physics`] so the two can check each other.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::physics::SolutionState;
use crate::scenario::ScenarioConfig;

/// Relative slack granted on every inequality.
pub const MODEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelEval {
    pub e_sat: f64,
    pub e_link: f64,
    pub e_uav: f64,
    pub e_access: f64,
    pub total: f64,
    pub latency: Vec<f64>,
}

pub fn sat_rate(cfg: &ScenarioConfig) -> f64 {
    let path = 4.0 * PI * cfg.sat_uav_distance;
    let snr = cfg.sat_beam_gain * cfg.sat_wavelength.powi(2) * cfg.sat_tx_power
        / (path * path * cfg.sat_bandwidth * cfg.noise_psd);
    cfg.sat_bandwidth * (1.0 + snr).ln() / 2f64.ln() * correction(snr)
}

/// `ln_1p(x) / ln(1 + x)`: undoes the rounding of `1 + x` for small `x`.
fn correction(x: f64) -> f64 {
    let u = 1.0 + x;
    if u == 1.0 {
        1.0
    } else {
        x.ln_1p() / u.ln()
    }
}

/// Rate of the access link `k` at UAV position `xy`.
pub fn access_rate(
    cfg: &ScenarioConfig,
    xy: [f64; 2],
    altitude: f64,
    theta: f64,
    k: usize,
    b: f64,
    p: f64,
) -> f64 {
    let g = cfg.gt_positions[k];
    let dist2 = (xy[0] - g[0]).powi(2) + (xy[1] - g[1]).powi(2) + altitude * altitude;
    let snr = cfg.antenna_gain_const * cfg.ref_channel_gain * p
        / (dist2 * theta * theta * cfg.noise_psd * b);
    b * snr.ln_1p() / 2f64.ln()
}

/// Cycles for terminal `k` at ratio `rho` using segment `d` of its curve.
pub fn workload_in(cfg: &ScenarioConfig, k: usize, d: usize, rho: f64) -> f64 {
    let s = cfg.overhead_curves[k].segments()[d];
    cfg.cycles_per_overhead * (s.slope * rho + s.intercept)
}

/// Segment containing `rho`; a shared boundary counts toward the deeper one.
pub fn segment_at(cfg: &ScenarioConfig, k: usize, rho: f64) -> Option<usize> {
    let segs = cfg.overhead_curves[k].segments();
    let n = segs.len();
    if !(rho <= 1.0 && rho >= segs[n - 1].lower) {
        return None;
    }
    let mut d = 0;
    while d + 1 < n && rho <= segs[d].lower {
        d += 1;
    }
    Some(d)
}

pub fn workload(cfg: &ScenarioConfig, k: usize, rho: f64) -> Option<f64> {
    segment_at(cfg, k, rho).map(|d| workload_in(cfg, k, d, rho))
}

/// Energy and per-terminal latency of `state`, with `cycles(k, rho)` giving
/// compression workloads. `None` if some latency is undefined.
pub fn evaluate_with<W>(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    mut cycles: W,
) -> Option<ModelEval>
where
    W: FnMut(usize, f64) -> Option<f64>,
{
    let al = &state.allocation;
    let pl = &state.placement;
    let n = cfg.num_gts();
    let r_su = sat_rate(cfg);
    let tau = cfg.comp_energy_coeff;

    let mut sat_cycles = 0.0;
    let mut relay_bits = 0.0;
    let mut e_uav = 0.0;
    let mut e_access = 0.0;
    let mut own = vec![0.0; n];
    for k in 0..n {
        let rho = al.ratio[k];
        let compressed = al.task_sat[k] || al.task_uav[k];
        let work = if compressed { cycles(k, rho)? } else { 0.0 };
        if al.task_sat[k] {
            sat_cycles += work;
            relay_bits += rho * cfg.data_bits[k];
        } else {
            relay_bits += cfg.data_bits[k];
        }
        if al.task_uav[k] {
            let f = al.cpu[k];
            if !(f > 0.0) {
                return None;
            }
            own[k] += work / f;
            e_uav += tau * work * f * f;
        }
        let bits = if compressed {
            rho * cfg.data_bits[k]
        } else {
            cfg.data_bits[k]
        };
        let r = access_rate(
            cfg,
            pl.uav_xy,
            pl.altitude,
            pl.half_beamwidth,
            k,
            al.bandwidth[k],
            al.power[k],
        );
        if !(r > 0.0) {
            return None;
        }
        own[k] += bits / r;
        e_access += al.power[k] * bits / r;
    }
    let shared =
        sat_cycles / cfg.sat_cpu + relay_bits / r_su + cfg.sat_uav_distance / cfg.lightspeed;
    let e_sat = tau * sat_cycles * cfg.sat_cpu * cfg.sat_cpu;
    let e_link = cfg.sat_tx_power * relay_bits / r_su;
    Some(ModelEval {
        e_sat,
        e_link,
        e_uav,
        e_access,
        total: e_sat + e_link + e_uav + e_access,
        latency: own.iter().map(|t| shared + t).collect(),
    })
}

pub fn evaluate(cfg: &ScenarioConfig, state: &SolutionState) -> Option<ModelEval> {
    evaluate_with(cfg, state, |k, rho| workload(cfg, k, rho))
}

pub fn meets_deadlines(cfg: &ScenarioConfig, eval: &ModelEval) -> bool {
    eval.latency
        .iter()
        .all(|&t| t <= cfg.latency_budget * (1.0 + MODEL_TOL))
}

/// Working beamwidth interval: the configured range kept a milliradian away
/// from 0 and from a right angle.
pub fn beamwidth_interval(cfg: &ScenarioConfig) -> [f64; 2] {
    [
        cfg.beamwidth_range[0].max(1e-3),
        cfg.beamwidth_range[1].min(FRAC_PI_2 - 1e-3),
    ]
}

/// Every terminal lies inside the beam footprint.
pub fn covered(cfg: &ScenarioConfig, state: &SolutionState) -> bool {
    let pl = &state.placement;
    let radius = pl.altitude * pl.half_beamwidth.tan();
    cfg.gt_positions.iter().all(|g| {
        let d = ((pl.uav_xy[0] - g[0]).powi(2) + (pl.uav_xy[1] - g[1]).powi(2)).sqrt();
        d <= radius * (1.0 + MODEL_TOL)
    })
}

/// Budgets, ranges and deadlines all hold.
pub fn admissible(cfg: &ScenarioConfig, state: &SolutionState) -> bool {
    let al = &state.allocation;
    let pl = &state.placement;
    let within = |v: f64, hi: f64| v <= hi * (1.0 + MODEL_TOL);
    let [t_lo, t_hi] = beamwidth_interval(cfg);
    let ranges = pl.altitude >= cfg.altitude_range[0] * (1.0 - MODEL_TOL)
        && within(pl.altitude, cfg.altitude_range[1])
        && pl.half_beamwidth >= t_lo * (1.0 - MODEL_TOL)
        && within(pl.half_beamwidth, t_hi);
    let budgets = within(al.power.iter().sum(), cfg.uav_power_budget)
        && within(al.bandwidth.iter().sum(), cfg.uav_bandwidth_total)
        && within(al.cpu.iter().sum(), cfg.uav_cpu_total);
    let tasks = (0..cfg.num_gts()).all(|k| {
        let curve = cfg.overhead_curves[k].segments();
        !(al.task_sat[k] && al.task_uav[k])
            && al.ratio[k] <= 1.0
            && al.ratio[k] >= curve[curve.len() - 1].lower * (1.0 - MODEL_TOL)
    });
    ranges
        && budgets
        && tasks
        && covered(cfg, state)
        && evaluate(cfg, state).is_some_and(|e| meets_deadlines(cfg, &e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::initialize;
    use crate::physics;

    #[test]
    fn agrees_with_physics_on_initial_state() {
        let cfg = ScenarioConfig::reference_with_seed(4, 7).unwrap();
        let mut s = initialize(&cfg).unwrap();
        s.allocation.task_sat = vec![true, false, false, true];
        s.allocation.task_uav = vec![false, true, false, false];
        s.allocation.cpu = vec![0.0, 2e8, 0.0, 0.0];
        s.allocation.ratio = vec![0.3, 0.6, 1.0, 0.7];
        let m = evaluate(&cfg, &s).unwrap();
        let e = physics::energy_breakdown(&cfg, &s).unwrap();
        let l = physics::latency_breakdown(&cfg, &s).unwrap();
        for (a, b) in [
            (m.e_sat, e.sat_compute),
            (m.e_link, e.sat_uav_comm),
            (m.e_uav, e.uav_compute),
            (m.e_access, e.uav_gt_comm),
        ] {
            assert!((a - b).abs() <= 1e-12 * b.abs(), "{a} vs {b}");
        }
        for (a, b) in m.latency.iter().zip(&l.total) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn boundary_ratio_uses_deeper_segment() {
        let cfg = ScenarioConfig::reference(vec![[0.0, 0.0]]);
        assert_eq!(segment_at(&cfg, 0, 0.7), Some(1));
        assert_eq!(segment_at(&cfg, 0, 0.25), Some(2));
        assert_eq!(segment_at(&cfg, 0, 1.0), Some(0));
        assert_eq!(segment_at(&cfg, 0, 0.2), None);
    }
}
