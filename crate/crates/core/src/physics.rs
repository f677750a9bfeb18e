//! Channel, rate, latency and energy model for a fixed decision vector.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Relative tolerance used when classifying constraint slacks.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub uav_xy: [f64; 2],
    pub altitude: f64,
    pub half_beamwidth: f64,
}

impl Placement {
    pub fn coverage_radius(&self) -> f64 {
        self.altitude * self.half_beamwidth.tan()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub bandwidth: Vec<f64>,
    pub cpu: Vec<f64>,
    pub power: Vec<f64>,
    pub ratio: Vec<f64>,
    pub task_sat: Vec<bool>,
    pub task_uav: Vec<bool>,
}

impl Allocation {
    pub fn len(&self) -> usize {
        self.ratio.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratio.is_empty()
    }

    /// Whether terminal `k`'s data is compressed somewhere.
    pub fn compressed(&self, k: usize) -> bool {
        self.task_sat[k] || self.task_uav[k]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionState {
    pub placement: Placement,
    pub allocation: Allocation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyBreakdown {
    pub sat_compute: f64,
    pub sat_uav_tx: f64,
    pub sat_uav_prop: f64,
    pub uav_compute: Vec<f64>,
    pub uav_gt_tx: Vec<f64>,
    pub total: Vec<f64>,
}

impl LatencyBreakdown {
    /// Latency shared by every terminal (satellite compute plus the relay hop).
    pub fn shared(&self) -> f64 {
        self.sat_compute + self.sat_uav_tx + self.sat_uav_prop
    }

    pub fn max_total(&self) -> f64 {
        self.total.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub sat_compute: f64,
    pub sat_uav_comm: f64,
    pub uav_compute: f64,
    pub uav_gt_comm: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(sat_compute: f64, sat_uav_comm: f64, uav_compute: f64, uav_gt_comm: f64) -> Self {
        Self {
            sat_compute,
            sat_uav_comm,
            uav_compute,
            uav_gt_comm,
            total: sat_compute + sat_uav_comm + uav_compute + uav_gt_comm,
        }
    }
}

/// Satellite-to-UAV downlink rate in bit/s.
pub fn rate_sat_uav(cfg: &ScenarioConfig) -> f64 {
    let amplitude =
        cfg.sat_beam_gain.sqrt() * cfg.sat_wavelength / (4.0 * PI * cfg.sat_uav_distance);
    let snr = amplitude * amplitude * cfg.sat_tx_power / (cfg.sat_bandwidth * cfg.noise_psd);
    cfg.sat_bandwidth * snr.ln_1p() / LN_2
}

pub fn propagation_delay(cfg: &ScenarioConfig) -> f64 {
    cfg.sat_uav_distance / cfg.lightspeed
}

pub fn horizontal_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Largest horizontal distance from `xy` to any terminal.
pub fn max_gt_distance(cfg: &ScenarioConfig, xy: [f64; 2]) -> f64 {
    cfg.gt_positions
        .iter()
        .map(|&p| horizontal_distance(xy, p))
        .fold(0.0, f64::max)
}

pub fn channel_gain_ug(cfg: &ScenarioConfig, placement: &Placement, k: usize) -> f64 {
    let [dx, dy] = [
        placement.uav_xy[0] - cfg.gt_positions[k][0],
        placement.uav_xy[1] - cfg.gt_positions[k][1],
    ];
    cfg.ref_channel_gain / (dx * dx + dy * dy + placement.altitude * placement.altitude)
}

/// Received SNR per watt per hertz of allocated bandwidth, i.e. the factor
/// `V` with `snr = V * p / b`.
pub fn snr_factor(cfg: &ScenarioConfig, placement: &Placement, k: usize) -> f64 {
    let theta = placement.half_beamwidth;
    cfg.antenna_gain_const * channel_gain_ug(cfg, placement, k) / (theta * theta * cfg.noise_psd)
}

pub fn rate_uav_gt(
    cfg: &ScenarioConfig,
    placement: &Placement,
    b: f64,
    p: f64,
    k: usize,
) -> Result<f64> {
    if p == 0.0 {
        return Ok(0.0);
    }
    if b <= 0.0 {
        return Err(Error::Domain(format!(
            "terminal {k}: rate undefined with zero bandwidth and positive power"
        )));
    }
    let snr = snr_factor(cfg, placement, k) * p / b;
    Ok(b * snr.ln_1p() / LN_2)
}

/// Bits on the satellite-to-UAV link for terminal `k`.
pub fn sat_link_bits(cfg: &ScenarioConfig, alloc: &Allocation, k: usize) -> f64 {
    if alloc.task_sat[k] {
        alloc.ratio[k] * cfg.data_bits[k]
    } else {
        cfg.data_bits[k]
    }
}

/// Bits on the UAV-to-terminal link for terminal `k`.
pub fn access_link_bits(cfg: &ScenarioConfig, alloc: &Allocation, k: usize) -> f64 {
    if alloc.compressed(k) {
        alloc.ratio[k] * cfg.data_bits[k]
    } else {
        cfg.data_bits[k]
    }
}

/// Compression workload for terminal `k` in CPU cycles.
pub fn workload_cycles(cfg: &ScenarioConfig, alloc: &Allocation, k: usize) -> Result<f64> {
    Ok(cfg.cycles_per_overhead * cfg.overhead_curves[k].eval(alloc.ratio[k])?)
}

/// Satellite compute, relay transmission and propagation: the part of the
/// latency every terminal sees.
pub fn shared_latency(cfg: &ScenarioConfig, alloc: &Allocation) -> Result<f64> {
    let mut cycles = 0.0;
    let mut bits = 0.0;
    for k in 0..cfg.num_gts() {
        if alloc.task_sat[k] {
            cycles += workload_cycles(cfg, alloc, k)?;
        }
        bits += sat_link_bits(cfg, alloc, k);
    }
    Ok(cycles / cfg.sat_cpu + bits / rate_sat_uav(cfg) + propagation_delay(cfg))
}

/// UAV compute latency of terminal `k` (zero unless compressed on the UAV).
pub fn uav_compute_latency(cfg: &ScenarioConfig, alloc: &Allocation, k: usize) -> Result<f64> {
    if !alloc.task_uav[k] {
        return Ok(0.0);
    }
    if alloc.cpu[k] <= 0.0 {
        return Err(Error::Domain(format!(
            "terminal {k}: UAV compression assigned with zero CPU"
        )));
    }
    Ok(workload_cycles(cfg, alloc, k)? / alloc.cpu[k])
}

/// Time left for the access link of every terminal once everything else is
/// accounted for.
pub fn access_slack(cfg: &ScenarioConfig, alloc: &Allocation) -> Result<Vec<f64>> {
    let shared = shared_latency(cfg, alloc)?;
    (0..cfg.num_gts())
        .map(|k| Ok(cfg.latency_budget - shared - uav_compute_latency(cfg, alloc, k)?))
        .collect()
}

pub fn latency_breakdown(cfg: &ScenarioConfig, state: &SolutionState) -> Result<LatencyBreakdown> {
    let alloc = &state.allocation;
    let k_count = cfg.num_gts();
    if alloc.len() != k_count
        || alloc.bandwidth.len() != k_count
        || alloc.cpu.len() != k_count
        || alloc.power.len() != k_count
        || alloc.task_sat.len() != k_count
        || alloc.task_uav.len() != k_count
    {
        return Err(Error::Domain(
            "allocation length does not match terminal count".into(),
        ));
    }
    let r_su = rate_sat_uav(cfg);
    let mut sat_cycles = 0.0;
    let mut sat_bits = 0.0;
    for k in 0..k_count {
        if alloc.task_sat[k] {
            sat_cycles += workload_cycles(cfg, alloc, k)?;
        }
        sat_bits += sat_link_bits(cfg, alloc, k);
    }
    let sat_compute = sat_cycles / cfg.sat_cpu;
    let sat_uav_tx = sat_bits / r_su;
    let sat_uav_prop = propagation_delay(cfg);
    let shared = sat_compute + sat_uav_tx + sat_uav_prop;

    let mut uav_compute = Vec::with_capacity(k_count);
    let mut uav_gt_tx = Vec::with_capacity(k_count);
    let mut total = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let t_u = if alloc.task_uav[k] {
            if alloc.cpu[k] <= 0.0 {
                return Err(Error::Domain(format!(
                    "terminal {k}: UAV compression assigned with zero CPU"
                )));
            }
            workload_cycles(cfg, alloc, k)? / alloc.cpu[k]
        } else {
            0.0
        };
        let r_k = rate_uav_gt(cfg, &state.placement, alloc.bandwidth[k], alloc.power[k], k)?;
        if r_k <= 0.0 {
            return Err(Error::Domain(format!(
                "terminal {k}: zero access-link rate"
            )));
        }
        let t_ug = access_link_bits(cfg, alloc, k) / r_k;
        uav_compute.push(t_u);
        uav_gt_tx.push(t_ug);
        total.push(shared + t_u + t_ug);
    }
    Ok(LatencyBreakdown {
        sat_compute,
        sat_uav_tx,
        sat_uav_prop,
        uav_compute,
        uav_gt_tx,
        total,
    })
}

pub fn energy_from_latency(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    lat: &LatencyBreakdown,
) -> EnergyBreakdown {
    let alloc = &state.allocation;
    let e_s = cfg.comp_energy_coeff * lat.sat_compute * cfg.sat_cpu.powi(3);
    let e_su = lat.sat_uav_tx * cfg.sat_tx_power;
    let e_u = cfg.comp_energy_coeff
        * lat
            .uav_compute
            .iter()
            .zip(&alloc.cpu)
            .map(|(t, f)| if *t == 0.0 { 0.0 } else { t * f.powi(3) })
            .sum::<f64>();
    let e_ug = lat
        .uav_gt_tx
        .iter()
        .zip(&alloc.power)
        .map(|(t, p)| t * p)
        .sum();
    EnergyBreakdown::new(e_s, e_su, e_u, e_ug)
}

pub fn energy_breakdown(cfg: &ScenarioConfig, state: &SolutionState) -> Result<EnergyBreakdown> {
    let lat = latency_breakdown(cfg, state)?;
    Ok(energy_from_latency(cfg, state, &lat))
}

/// Constraint families of the energy-minimization problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Latency,
    PowerBudget,
    Coverage,
    Altitude,
    BandwidthBudget,
    CpuBudget,
    RatioBounds,
    TaskExclusive,
    Beamwidth,
    Nonnegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub gt: Option<usize>,
    /// `limit - value`; negative when violated.
    pub slack: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn latency_feasible(&self) -> bool {
        !self
            .violations
            .iter()
            .any(|v| v.constraint == Constraint::Latency)
    }

    /// Sum of violations, each scaled by its limit. Zero iff feasible.
    pub fn measure(&self) -> f64 {
        self.violations
            .iter()
            .map(|v| (-v.slack / v.limit.abs().max(1e-300)).min(1e6))
            .fold(0.0, |a, b| a + b)
    }
}

struct Checker {
    violations: Vec<Violation>,
}

impl Checker {
    /// Records `value <= limit` with a relative tolerance.
    fn upper(&mut self, constraint: Constraint, gt: Option<usize>, value: f64, limit: f64) {
        let slack = limit - value;
        if !(slack >= -FEASIBILITY_TOL * limit.abs().max(value.abs())) {
            self.violations.push(Violation {
                constraint,
                gt,
                slack: if slack.is_nan() {
                    f64::NEG_INFINITY
                } else {
                    slack
                },
                limit,
            });
        }
    }

    /// Records `value >= limit`.
    fn lower(&mut self, constraint: Constraint, gt: Option<usize>, value: f64, limit: f64) {
        let slack = value - limit;
        if !(slack >= -FEASIBILITY_TOL * limit.abs().max(value.abs())) {
            self.violations.push(Violation {
                constraint,
                gt,
                slack: if slack.is_nan() {
                    f64::NEG_INFINITY
                } else {
                    slack
                },
                limit,
            });
        }
    }
}

pub fn check_feasibility(cfg: &ScenarioConfig, state: &SolutionState) -> FeasibilityReport {
    let mut c = Checker {
        violations: Vec::new(),
    };
    let alloc = &state.allocation;
    let pl = &state.placement;
    let k_count = cfg.num_gts();

    match latency_breakdown(cfg, state) {
        Ok(lat) => {
            for (k, &t) in lat.total.iter().enumerate() {
                c.upper(Constraint::Latency, Some(k), t, cfg.latency_budget);
            }
        }
        Err(_) => {
            for k in 0..k_count {
                c.violations.push(Violation {
                    constraint: Constraint::Latency,
                    gt: Some(k),
                    slack: f64::NEG_INFINITY,
                    limit: cfg.latency_budget,
                });
            }
            return FeasibilityReport {
                violations: c.violations,
            };
        }
    }
    c.upper(
        Constraint::PowerBudget,
        None,
        alloc.power.iter().sum(),
        cfg.uav_power_budget,
    );
    let radius = pl.coverage_radius();
    for k in 0..k_count {
        let dist = horizontal_distance(pl.uav_xy, cfg.gt_positions[k]);
        c.upper(Constraint::Coverage, Some(k), dist, radius);
    }
    let [h_min, h_max] = cfg.altitude_range;
    c.lower(Constraint::Altitude, None, pl.altitude, h_min);
    c.upper(Constraint::Altitude, None, pl.altitude, h_max);
    c.upper(
        Constraint::BandwidthBudget,
        None,
        alloc.bandwidth.iter().sum(),
        cfg.uav_bandwidth_total,
    );
    c.upper(
        Constraint::CpuBudget,
        None,
        alloc.cpu.iter().sum(),
        cfg.uav_cpu_total,
    );
    for k in 0..k_count {
        let curve = &cfg.overhead_curves[k];
        c.lower(
            Constraint::RatioBounds,
            Some(k),
            alloc.ratio[k],
            curve.min_ratio(),
        );
        c.upper(Constraint::RatioBounds, Some(k), alloc.ratio[k], 1.0);
        if alloc.task_sat[k] && alloc.task_uav[k] {
            c.violations.push(Violation {
                constraint: Constraint::TaskExclusive,
                gt: Some(k),
                slack: -1.0,
                limit: 1.0,
            });
        }
    }
    let [t_min, t_max] = cfg.beamwidth_bounds();
    c.lower(Constraint::Beamwidth, None, pl.half_beamwidth, t_min);
    c.upper(Constraint::Beamwidth, None, pl.half_beamwidth, t_max);
    for k in 0..k_count {
        for v in [alloc.bandwidth[k], alloc.cpu[k], alloc.power[k]] {
            if !(v >= 0.0) {
                c.violations.push(Violation {
                    constraint: Constraint::Nonnegative,
                    gt: Some(k),
                    slack: v,
                    limit: 0.0,
                });
            }
        }
    }
    FeasibilityReport {
        violations: c.violations,
    }
}
