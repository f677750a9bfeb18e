//! UAV altitude and antenna half-beamwidth with the horizontal position
//! fixed.

use crate::error::{Block, Error, Result};
use crate::physics::{self, SolutionState};
use crate::scenario::ScenarioConfig;

use super::SolverOptions;

/// Relative slack allowed on rate requirements when screening candidates.
pub(crate) const SCREEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AltitudeCase {
    /// Lowest altitude with the narrowest covering beam.
    LowestAltitude,
    /// Altitude tied to the beamwidth through the coverage edge.
    CoverageEdge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltitudeBeamwidth {
    pub altitude: f64,
    pub half_beamwidth: f64,
    /// UAV-to-terminal transmit energy at the returned pair.
    pub objective: f64,
    pub case: AltitudeCase,
    pub candidates: usize,
}

/// Fixed per-link quantities for the placement blocks. A placement is
/// latency-feasible iff `theta^2 (dist_k^2 + H^2) <= reach_k` for every link.
#[derive(Debug, Clone)]
pub(crate) struct LinkBudget {
    /// `p_k * bits_k`: energy numerator of each link.
    pub weight: Vec<f64>,
    pub bandwidth: Vec<f64>,
    /// `G_0 g_0 p_k / N_0`.
    pub gain_power: Vec<f64>,
    pub reach: Vec<f64>,
}

impl LinkBudget {
    pub fn build(cfg: &ScenarioConfig, state: &SolutionState) -> Result<Self> {
        let alloc = &state.allocation;
        let slack = physics::access_slack(cfg, alloc)?;
        let k_count = cfg.num_gts();
        let mut lb = LinkBudget {
            weight: Vec::with_capacity(k_count),
            bandwidth: alloc.bandwidth.clone(),
            gain_power: Vec::with_capacity(k_count),
            reach: Vec::with_capacity(k_count),
        };
        for k in 0..k_count {
            let bits = physics::access_link_bits(cfg, alloc, k);
            let (b, p) = (alloc.bandwidth[k], alloc.power[k]);
            if !(b > 0.0 && p > 0.0) {
                return Err(Error::Degenerate(format!(
                    "terminal {k}: needs positive bandwidth and power"
                )));
            }
            let gp = cfg.antenna_gain_const * cfg.ref_channel_gain * p / cfg.noise_psd;
            // Required spectral efficiency; no time left means unreachable.
            let reach = if slack[k] > 0.0 {
                let eff = bits / (b * slack[k]);
                gp / (b * (eff * std::f64::consts::LN_2).exp_m1())
            } else {
                -1.0
            };
            lb.weight.push(p * bits);
            lb.gain_power.push(gp);
            lb.reach.push(reach);
        }
        Ok(lb)
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    /// Access-link energy with squared horizontal distances `dist2`.
    pub fn energy(&self, dist2: &[f64], altitude: f64, theta: f64) -> f64 {
        let t2 = theta * theta;
        (0..self.len())
            .map(|k| {
                let b = self.bandwidth[k];
                let snr = self.gain_power[k] / (t2 * b * (dist2[k] + altitude * altitude));
                self.weight[k] * std::f64::consts::LN_2 / (b * snr.ln_1p())
            })
            .sum()
    }

    pub fn meets_deadlines(&self, dist2: &[f64], altitude: f64, theta: f64) -> bool {
        let t2 = theta * theta;
        (0..self.len())
            .all(|k| t2 * (dist2[k] + altitude * altitude) <= self.reach[k] * (1.0 + SCREEN_TOL))
    }
}

/// Altitude implied by a beamwidth: as low as allowed while still covering
/// the farthest terminal.
pub fn coverage_altitude(h_min: f64, max_dist: f64, theta: f64) -> f64 {
    h_min.max(max_dist / theta.tan())
}

pub fn solve_altitude_beamwidth(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    opts: &SolverOptions,
) -> Result<AltitudeBeamwidth> {
    let links = LinkBudget::build(cfg, state)?;
    let xy = state.placement.uav_xy;
    let dist2: Vec<f64> = cfg
        .gt_positions
        .iter()
        .map(|&g| physics::horizontal_distance(xy, g).powi(2))
        .collect();
    let l_max = physics::max_gt_distance(cfg, xy);
    let [h_min, h_max] = cfg.altitude_range;
    let [t_min, t_max] = cfg.beamwidth_bounds();

    let mut best: Option<AltitudeBeamwidth> = None;
    let mut count = 0;
    let mut consider = |theta: f64, case: AltitudeCase| {
        if !(theta >= t_min && theta <= t_max) {
            return;
        }
        let h = coverage_altitude(h_min, l_max, theta);
        if h > h_max {
            return;
        }
        count += 1;
        if !links.meets_deadlines(&dist2, h, theta) {
            return;
        }
        let e = links.energy(&dist2, h, theta);
        if best.map_or(true, |b| e < b.objective) {
            best = Some(AltitudeBeamwidth {
                altitude: h,
                half_beamwidth: theta,
                objective: e,
                case,
                candidates: 0,
            });
        }
    };

    // Lowest altitude and the narrowest beam that still covers everyone.
    let theta_low = t_min.max((l_max / h_min).atan());
    consider(theta_low, AltitudeCase::LowestAltitude);
    consider(state.placement.half_beamwidth, AltitudeCase::CoverageEdge);
    let steps = ((t_max - t_min) / opts.grid_step_theta).floor() as usize;
    for i in 0..=steps {
        consider(
            t_min + i as f64 * opts.grid_step_theta,
            AltitudeCase::CoverageEdge,
        );
    }
    consider(t_max, AltitudeCase::CoverageEdge);

    match best {
        Some(mut b) => {
            if b.altitude == h_min && b.half_beamwidth == theta_low {
                b.case = AltitudeCase::LowestAltitude;
            }
            b.candidates = count;
            Ok(b)
        }
        None => Err(Error::infeasible(
            Block::AltitudeBeamwidth,
            "no altitude/beamwidth pair covers every terminal within its deadline",
        )),
    }
}
