//! Compression ratios inside fixed overhead-curve segments, as a linear
//! program.

use crate::error::{Block, Error, Result};
use crate::physics::{self, SolutionState};
use crate::scenario::ScenarioConfig;

use super::lp::{solve_lp, LpError};
use super::SolverOptions;

/// Relative offset that keeps a ratio strictly above its segment's lower
/// boundary, where the curve already belongs to the deeper segment.
pub const BOUNDARY_OFFSET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSolution {
    pub ratio: Vec<f64>,
    /// Total energy at the returned ratios.
    pub objective: f64,
    pub pivots: usize,
}

/// Linear-in-ratio description of energy and latency for a fixed segment
/// per terminal.
#[derive(Debug, Clone)]
pub(crate) struct RatioModel {
    pub energy_const: f64,
    pub energy_coef: Vec<f64>,
    pub latency_const: Vec<f64>,
    pub shared_coef: Vec<f64>,
    pub own_coef: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl RatioModel {
    pub fn build(cfg: &ScenarioConfig, state: &SolutionState, segments: &[usize]) -> Result<Self> {
        let alloc = &state.allocation;
        let k_count = cfg.num_gts();
        if segments.len() != k_count {
            return Err(Error::Domain("one segment per terminal required".into()));
        }
        let r_su = physics::rate_sat_uav(cfg);
        let tau = cfg.comp_energy_coeff;
        let kappa = cfg.cycles_per_overhead;
        let f_s = cfg.sat_cpu;

        let mut m = RatioModel {
            energy_const: 0.0,
            energy_coef: vec![0.0; k_count],
            latency_const: vec![physics::propagation_delay(cfg); k_count],
            shared_coef: vec![0.0; k_count],
            own_coef: vec![0.0; k_count],
            lower: Vec::with_capacity(k_count),
            upper: Vec::with_capacity(k_count),
        };
        let mut shared_const = 0.0;
        for k in 0..k_count {
            let curve = &cfg.overhead_curves[k];
            let d = segments[k];
            if d >= curve.num_segments() {
                return Err(Error::Domain(format!(
                    "terminal {k}: segment {d} out of range"
                )));
            }
            let seg = curve.segments()[d];
            let (a, b) = (kappa * seg.slope, kappa * seg.intercept);
            let data = cfg.data_bits[k];
            let p = alloc.power[k];
            let r_k = physics::rate_uav_gt(cfg, &state.placement, alloc.bandwidth[k], p, k)?;
            if r_k <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "terminal {k}: zero access-link rate"
                )));
            }
            let (sat, uav) = (alloc.task_sat[k], alloc.task_uav[k]);

            if sat {
                m.energy_coef[k] += tau * a * f_s * f_s + cfg.sat_tx_power * data / r_su;
                m.energy_const += tau * b * f_s * f_s;
                m.shared_coef[k] += a / f_s + data / r_su;
                shared_const += b / f_s;
            } else {
                m.energy_const += cfg.sat_tx_power * data / r_su;
                shared_const += data / r_su;
            }
            if uav {
                let f = alloc.cpu[k];
                if f <= 0.0 {
                    return Err(Error::Degenerate(format!(
                        "terminal {k}: UAV compression assigned with zero CPU"
                    )));
                }
                m.energy_coef[k] += tau * a * f * f;
                m.energy_const += tau * b * f * f;
                m.own_coef[k] += a / f;
                m.latency_const[k] += b / f;
            }
            if sat || uav {
                m.energy_coef[k] += p * data / r_k;
                m.own_coef[k] += data / r_k;
            } else {
                m.energy_const += p * data / r_k;
                m.latency_const[k] += data / r_k;
            }
            let last = d + 1 == curve.num_segments();
            let lo = curve.lower(d);
            m.lower.push(if last {
                lo
            } else {
                lo * (1.0 + BOUNDARY_OFFSET)
            });
            m.upper.push(curve.upper(d));
        }
        for c in m.latency_const.iter_mut() {
            *c += shared_const;
        }
        Ok(m)
    }

    pub fn energy(&self, rho: &[f64]) -> f64 {
        self.energy_const
            + self
                .energy_coef
                .iter()
                .zip(rho)
                .map(|(c, r)| c * r)
                .sum::<f64>()
    }

    pub fn latencies(&self, rho: &[f64]) -> Vec<f64> {
        let shared: f64 = self.shared_coef.iter().zip(rho).map(|(c, r)| c * r).sum();
        (0..rho.len())
            .map(|j| self.latency_const[j] + shared + self.own_coef[j] * rho[j])
            .collect()
    }
}

/// Optimal ratios with every terminal's ratio confined to `segments[k]`.
pub fn solve_ratio_lp(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    segments: &[usize],
    opts: &SolverOptions,
) -> Result<RatioSolution> {
    let model = RatioModel::build(cfg, state, segments)?;
    let k_count = cfg.num_gts();
    let rows: Vec<Vec<f64>> = (0..k_count)
        .map(|j| {
            let mut row = model.shared_coef.clone();
            row[j] += model.own_coef[j];
            row
        })
        .collect();
    let rhs: Vec<f64> = model
        .latency_const
        .iter()
        .map(|c| cfg.latency_budget - c)
        .collect();
    let sol = solve_lp(&model.energy_coef, &rows, &rhs, &model.lower, &model.upper).map_err(
        |e| match e {
            LpError::Infeasible { row, excess } => Error::infeasible(
                Block::CompressionRatio,
                format!(
                    "terminal {row} latency exceeds the budget by {excess:e} s at the box center"
                ),
            ),
            other => Error::infeasible(Block::CompressionRatio, other.to_string()),
        },
    )?;
    let worst = model
        .latencies(&sol.x)
        .iter()
        .map(|l| (l - cfg.latency_budget) / cfg.latency_budget)
        .fold(f64::NEG_INFINITY, f64::max);
    if worst > opts.kkt_tolerance {
        return Err(Error::infeasible(
            Block::CompressionRatio,
            format!("simplex returned a point violating latency by {worst:e} (relative)"),
        ));
    }
    Ok(RatioSolution {
        objective: model.energy(&sol.x),
        ratio: sol.x,
        pivots: sol.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::initialize;
    use crate::physics::{energy_breakdown, latency_breakdown};

    fn scenario() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::reference(vec![[0.0, 0.0], [120.0, 40.0]]);
        cfg.latency_budget = 2.0;
        cfg
    }

    #[test]
    fn uncompressed_returns_lower_corner() {
        let cfg = scenario();
        let state = initialize(&cfg).unwrap();
        let sol = solve_ratio_lp(&cfg, &state, &[0, 1], &SolverOptions::default()).unwrap();
        assert_eq!(sol.ratio[0], 0.70 * (1.0 + BOUNDARY_OFFSET));
        assert_eq!(sol.ratio[1], 0.45 * (1.0 + BOUNDARY_OFFSET));
        // The offset keeps each ratio inside its own segment.
        assert_eq!(cfg.overhead_curves[0].segment_of(sol.ratio[0]).unwrap(), 0);
    }

    #[test]
    fn cheap_compression_goes_to_floor() {
        let cfg = scenario();
        let mut state = initialize(&cfg).unwrap();
        state.allocation.task_sat = vec![true, true];
        let sol = solve_ratio_lp(&cfg, &state, &[2, 2], &SolverOptions::default()).unwrap();
        assert_eq!(sol.ratio, vec![0.25, 0.25]);
    }

    #[test]
    fn model_matches_physics() {
        let cfg = scenario();
        let mut state = initialize(&cfg).unwrap();
        state.allocation.task_sat = vec![true, false];
        state.allocation.task_uav = vec![false, true];
        state.allocation.cpu = vec![0.0, 2e8];
        let model = RatioModel::build(&cfg, &state, &[1, 2]).unwrap();
        let rho = [0.6, 0.3];
        state.allocation.ratio = rho.to_vec();
        let e = energy_breakdown(&cfg, &state).unwrap().total;
        assert!((model.energy(&rho) - e).abs() <= 1e-12 * e);
        let lat = latency_breakdown(&cfg, &state).unwrap().total;
        for (a, b) in model.latencies(&rho).iter().zip(&lat) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn impossible_budget_reports_terminal() {
        let mut cfg = scenario();
        cfg.latency_budget = 0.01;
        let mut state = initialize(&cfg).unwrap();
        state.allocation.task_sat = vec![true, true];
        let err = solve_ratio_lp(&cfg, &state, &[2, 2], &SolverOptions::default()).unwrap_err();
        assert!(err.is_infeasible());
        assert!(err.to_string().contains("at the box center"), "{err}");
    }
}
