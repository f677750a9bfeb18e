//! Choice of the overhead-curve segment for every terminal, with each
//! segment represented by its midpoint ratio.

use crate::error::{Block, Error, Result};
use crate::physics::{self, SolutionState, FEASIBILITY_TOL};
use crate::scenario::ScenarioConfig;

use super::dual::{dual_subgradient, DualAdapter};
use super::SolverOptions;

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentChoice {
    /// Zero-based segment index per terminal.
    pub chosen_segment: Vec<usize>,
    pub midpoints: Vec<Vec<f64>>,
    pub objective: f64,
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    pub certified: bool,
}

impl SegmentChoice {
    /// One-hot selection matrix.
    pub fn alpha(&self) -> Vec<Vec<bool>> {
        self.midpoints
            .iter()
            .zip(&self.chosen_segment)
            .map(|(mids, &d)| (0..mids.len()).map(|j| j == d).collect())
            .collect()
    }
}

/// Energy and latency contributions of every (terminal, segment) pair,
/// evaluated at the segment midpoints.
#[derive(Debug, Clone)]
pub(crate) struct SegmentModel {
    pub base_energy: f64,
    pub energy: Vec<Vec<f64>>,
    pub base_latency: Vec<f64>,
    pub shared: Vec<Vec<f64>>,
    pub own: Vec<Vec<f64>>,
    pub midpoints: Vec<Vec<f64>>,
    pub budget: f64,
}

impl SegmentModel {
    pub fn build(cfg: &ScenarioConfig, state: &SolutionState) -> Result<Self> {
        let alloc = &state.allocation;
        let k_count = cfg.num_gts();
        let r_su = physics::rate_sat_uav(cfg);
        let t_p = physics::propagation_delay(cfg);
        let tau = cfg.comp_energy_coeff;
        let kappa = cfg.cycles_per_overhead;

        let mut rates = Vec::with_capacity(k_count);
        for k in 0..k_count {
            let r =
                physics::rate_uav_gt(cfg, &state.placement, alloc.bandwidth[k], alloc.power[k], k)?;
            if r <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "terminal {k}: zero access-link rate"
                )));
            }
            if alloc.task_uav[k] && alloc.cpu[k] <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "terminal {k}: UAV compression assigned with zero CPU"
                )));
            }
            rates.push(r);
        }
        let uncompressed_sat: f64 = (0..k_count)
            .filter(|&k| !alloc.task_sat[k])
            .map(|k| cfg.data_bits[k])
            .sum();

        let mut m = SegmentModel {
            base_energy: uncompressed_sat * cfg.sat_tx_power / r_su,
            energy: Vec::with_capacity(k_count),
            base_latency: Vec::with_capacity(k_count),
            shared: Vec::with_capacity(k_count),
            own: Vec::with_capacity(k_count),
            midpoints: Vec::with_capacity(k_count),
            budget: cfg.latency_budget,
        };
        for k in 0..k_count {
            let d_k = cfg.data_bits[k];
            let (sat, uav) = (alloc.task_sat[k], alloc.task_uav[k]);
            let p = alloc.power[k];
            let curve = &cfg.overhead_curves[k];
            let mids: Vec<f64> = (0..curve.num_segments())
                .map(|d| curve.midpoint(d))
                .collect();
            let mut energy = Vec::with_capacity(mids.len());
            let mut shared = Vec::with_capacity(mids.len());
            let mut own = Vec::with_capacity(mids.len());
            for (d, &rho) in mids.iter().enumerate() {
                let cycles = kappa * curve.segments()[d].value(rho);
                let (mut e, mut sh, mut ow) = (0.0, 0.0, 0.0);
                if sat {
                    e += tau * cycles * cfg.sat_cpu.powi(2) + cfg.sat_tx_power * rho * d_k / r_su;
                    sh += cycles / cfg.sat_cpu + rho * d_k / r_su;
                }
                if uav {
                    let f = alloc.cpu[k];
                    e += tau * cycles * f * f;
                    ow += cycles / f;
                }
                if sat || uav {
                    e += p * rho * d_k / rates[k];
                    ow += rho * d_k / rates[k];
                }
                energy.push(e);
                shared.push(sh);
                own.push(ow);
            }
            if !(sat || uav) {
                m.base_energy += p * d_k / rates[k];
            }
            let own_base = if sat || uav { 0.0 } else { d_k / rates[k] };
            m.base_latency
                .push(t_p + uncompressed_sat / r_su + own_base);
            m.energy.push(energy);
            m.shared.push(shared);
            m.own.push(own);
            m.midpoints.push(mids);
        }
        Ok(m)
    }

    pub fn energy_of(&self, choice: &[usize]) -> f64 {
        self.base_energy
            + choice
                .iter()
                .enumerate()
                .map(|(k, &d)| self.energy[k][d])
                .sum::<f64>()
    }

    pub fn latencies(&self, choice: &[usize]) -> Vec<f64> {
        let shared: f64 = choice
            .iter()
            .enumerate()
            .map(|(k, &d)| self.shared[k][d])
            .sum();
        (0..choice.len())
            .map(|j| self.base_latency[j] + shared + self.own[j][choice[j]])
            .collect()
    }
}

struct Adapter<'a> {
    model: &'a SegmentModel,
    scale: f64,
}

impl DualAdapter for Adapter<'_> {
    type Primal = Vec<usize>;

    fn num_constraints(&self) -> usize {
        self.model.base_latency.len()
    }

    fn multiplier_scale(&self) -> f64 {
        self.scale
    }

    fn minimize_lagrangian(&self, gamma: &[f64]) -> Vec<usize> {
        let m = self.model;
        let total: f64 = gamma.iter().sum();
        (0..gamma.len())
            .map(|k| {
                let mut best = 0;
                let mut best_val = f64::INFINITY;
                for d in 0..m.energy[k].len() {
                    let v = m.energy[k][d] + total * m.shared[k][d] + gamma[k] * m.own[k][d];
                    // Strict comparison keeps the shallower segment on ties.
                    if v < best_val {
                        best = d;
                        best_val = v;
                    }
                }
                best
            })
            .collect()
    }

    fn objective(&self, x: &Vec<usize>) -> f64 {
        self.model.energy_of(x)
    }

    fn residuals(&self, x: &Vec<usize>) -> Vec<f64> {
        self.model
            .latencies(x)
            .into_iter()
            .map(|l| l - self.model.budget)
            .collect()
    }

    fn feasibility_tol(&self) -> f64 {
        FEASIBILITY_TOL * self.model.budget
    }
}

pub fn select_segments(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    opts: &SolverOptions,
) -> Result<SegmentChoice> {
    let model = SegmentModel::build(cfg, state)?;
    let scale = model.base_energy.abs().max(1e-300) / cfg.latency_budget;
    let out = dual_subgradient(
        &Adapter {
            model: &model,
            scale,
        },
        opts,
    );
    let certified = out.certified(1e-9);
    match out.best {
        Some((chosen_segment, objective)) => Ok(SegmentChoice {
            chosen_segment,
            midpoints: model.midpoints,
            objective,
            multipliers: out.lambda,
            iterations: out.iterations,
            certified,
        }),
        None => Err(Error::infeasible(
            Block::CompressionRatio,
            "midpoint latency exceeds the budget for every segment choice visited",
        )),
    }
}

/// Segment currently occupied by each terminal's ratio.
pub fn current_segments(cfg: &ScenarioConfig, state: &SolutionState) -> Result<Vec<usize>> {
    (0..cfg.num_gts())
        .map(|k| cfg.overhead_curves[k].segment_of(state.allocation.ratio[k]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::initialize;
    use crate::scenario::{OverheadCurve, Segment};

    fn scenario() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::reference(vec![[0.0, 0.0], [120.0, 40.0]]);
        cfg.latency_budget = 2.0;
        cfg
    }

    #[test]
    fn single_segment_is_forced() {
        let mut cfg = scenario();
        let single = OverheadCurve::new(vec![Segment {
            slope: -1e7,
            intercept: 2e7,
            lower: 0.3,
        }])
        .unwrap();
        cfg.overhead_curves = vec![single; 2];
        let mut state = initialize(&cfg).unwrap();
        state.allocation.task_sat = vec![true, false];
        let out = select_segments(&cfg, &state, &SolverOptions::default()).unwrap();
        assert_eq!(out.chosen_segment, vec![0, 0]);
        assert_eq!(out.alpha(), vec![vec![true], vec![true]]);
    }

    #[test]
    fn uncompressed_terminal_takes_first_segment() {
        let cfg = scenario();
        let mut state = initialize(&cfg).unwrap();
        state.allocation.task_sat = vec![true, false];
        let out = select_segments(&cfg, &state, &SolverOptions::default()).unwrap();
        assert_eq!(out.chosen_segment[1], 0);
        // Compression is cheap at the default energy scale, so go deep.
        assert_eq!(out.chosen_segment[0], 2);
        for row in out.alpha() {
            assert_eq!(row.iter().filter(|a| **a).count(), 1);
        }
    }

    #[test]
    fn uav_task_without_cpu_is_degenerate() {
        let cfg = scenario();
        let mut state = initialize(&cfg).unwrap();
        state.allocation.task_uav = vec![true, false];
        assert!(matches!(
            select_segments(&cfg, &state, &SolverOptions::default()),
            Err(Error::Degenerate(_))
        ));
    }
}
