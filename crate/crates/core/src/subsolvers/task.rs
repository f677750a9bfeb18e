//! Which terminals get compressed, and where (satellite or UAV).

use crate::error::{Block, Error, Result};
use crate::physics::{self, SolutionState, FEASIBILITY_TOL};
use crate::scenario::ScenarioConfig;

use super::dual::{dual_subgradient, DualAdapter};
use super::SolverOptions;

#[derive(Debug, Clone, PartialEq)]
pub struct TaskAssignment {
    pub task_sat: Vec<bool>,
    pub task_uav: Vec<bool>,
    /// Total energy with this assignment and everything else unchanged.
    pub objective: f64,
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    /// The dual bound proves the assignment optimal.
    pub certified: bool,
    /// Terminals barred from UAV compression because their CPU share is zero.
    pub uav_blocked: Vec<usize>,
}

/// Energy and latency written as affine functions of the binary task
/// variables, everything else held fixed.
#[derive(Debug, Clone)]
pub(crate) struct TaskModel {
    pub base_energy: f64,
    pub energy_sat: Vec<f64>,
    /// `None` where UAV compression is unavailable.
    pub energy_uav: Vec<Option<f64>>,
    pub base_latency: Vec<f64>,
    /// Latency change seen by every terminal when `k` is compressed on board.
    pub shared_sat: Vec<f64>,
    /// Latency change seen only by `k` itself.
    pub own_sat: Vec<f64>,
    pub own_uav: Vec<Option<f64>>,
    pub budget: f64,
}

impl TaskModel {
    pub fn build(cfg: &ScenarioConfig, state: &SolutionState) -> Result<Self> {
        let alloc = &state.allocation;
        let k_count = cfg.num_gts();
        let r_su = physics::rate_sat_uav(cfg);
        let t_p = physics::propagation_delay(cfg);
        let tau = cfg.comp_energy_coeff;
        let total_bits: f64 = cfg.data_bits.iter().sum();

        let mut m = TaskModel {
            base_energy: total_bits * cfg.sat_tx_power / r_su,
            energy_sat: Vec::with_capacity(k_count),
            energy_uav: Vec::with_capacity(k_count),
            base_latency: Vec::with_capacity(k_count),
            shared_sat: Vec::with_capacity(k_count),
            own_sat: Vec::with_capacity(k_count),
            own_uav: Vec::with_capacity(k_count),
            budget: cfg.latency_budget,
        };
        for k in 0..k_count {
            let d = cfg.data_bits[k];
            let p = alloc.power[k];
            let r_k = physics::rate_uav_gt(cfg, &state.placement, alloc.bandwidth[k], p, k)?;
            if r_k <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "terminal {k}: zero access-link rate"
                )));
            }
            let cycles = physics::workload_cycles(cfg, alloc, k)?;
            let saved = d * (1.0 - alloc.ratio[k]);
            m.base_energy += p * d / r_k;
            m.base_latency.push(t_p + total_bits / r_su + d / r_k);
            m.energy_sat.push(
                tau * cycles * cfg.sat_cpu.powi(2) - saved * (cfg.sat_tx_power / r_su + p / r_k),
            );
            m.shared_sat.push(cycles / cfg.sat_cpu - saved / r_su);
            m.own_sat.push(-saved / r_k);
            let f = alloc.cpu[k];
            if f > 0.0 {
                m.energy_uav
                    .push(Some(tau * cycles * f * f - saved * p / r_k));
                m.own_uav.push(Some(cycles / f - saved / r_k));
            } else {
                m.energy_uav.push(None);
                m.own_uav.push(None);
            }
        }
        Ok(m)
    }

    pub fn energy(&self, sat: &[bool], uav: &[bool]) -> f64 {
        let mut e = self.base_energy;
        for k in 0..sat.len() {
            if sat[k] {
                e += self.energy_sat[k];
            } else if uav[k] {
                e += self.energy_uav[k].unwrap_or(f64::INFINITY);
            }
        }
        e
    }

    pub fn latencies(&self, sat: &[bool], uav: &[bool]) -> Vec<f64> {
        let shared: f64 = (0..sat.len())
            .filter(|&k| sat[k])
            .map(|k| self.shared_sat[k])
            .sum();
        (0..sat.len())
            .map(|j| {
                let own = if sat[j] {
                    self.own_sat[j]
                } else if uav[j] {
                    self.own_uav[j].unwrap_or(f64::INFINITY)
                } else {
                    0.0
                };
                self.base_latency[j] + shared + own
            })
            .collect()
    }
}

struct Adapter<'a> {
    model: &'a TaskModel,
    scale: f64,
}

impl DualAdapter for Adapter<'_> {
    type Primal = (Vec<bool>, Vec<bool>);

    fn num_constraints(&self) -> usize {
        self.model.base_latency.len()
    }

    fn multiplier_scale(&self) -> f64 {
        self.scale
    }

    fn minimize_lagrangian(&self, lambda: &[f64]) -> Self::Primal {
        let m = self.model;
        let total: f64 = lambda.iter().sum();
        let k_count = lambda.len();
        let mut sat = vec![false; k_count];
        let mut uav = vec![false; k_count];
        for k in 0..k_count {
            let a_s = m.energy_sat[k] + total * m.shared_sat[k] + lambda[k] * m.own_sat[k];
            let a_u = match (m.energy_uav[k], m.own_uav[k]) {
                (Some(e), Some(t)) => e + lambda[k] * t,
                _ => f64::INFINITY,
            };
            // Ties go to no compression, then to the satellite.
            if a_s < 0.0 || a_u < 0.0 {
                if a_s <= a_u {
                    sat[k] = true;
                } else {
                    uav[k] = true;
                }
            }
        }
        (sat, uav)
    }

    fn objective(&self, x: &Self::Primal) -> f64 {
        self.model.energy(&x.0, &x.1)
    }

    fn residuals(&self, x: &Self::Primal) -> Vec<f64> {
        self.model
            .latencies(&x.0, &x.1)
            .into_iter()
            .map(|l| l - self.model.budget)
            .collect()
    }

    fn feasibility_tol(&self) -> f64 {
        FEASIBILITY_TOL * self.model.budget
    }
}

/// Chooses the compression site for every terminal by dual decomposition
/// over the per-terminal latency constraints.
pub fn solve_task_allocation(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    opts: &SolverOptions,
) -> Result<TaskAssignment> {
    let model = TaskModel::build(cfg, state)?;
    let scale = model.base_energy.abs().max(1e-300) / cfg.latency_budget;
    let out = dual_subgradient(
        &Adapter {
            model: &model,
            scale,
        },
        opts,
    );
    let certified = out.certified(1e-9);
    let uav_blocked = (0..cfg.num_gts())
        .filter(|&k| model.energy_uav[k].is_none())
        .collect();
    match out.best {
        Some(((task_sat, task_uav), objective)) => Ok(TaskAssignment {
            task_sat,
            task_uav,
            objective,
            multipliers: out.lambda,
            iterations: out.iterations,
            certified,
            uav_blocked,
        }),
        None => Err(Error::infeasible(
            Block::TaskAllocation,
            format!(
                "no dual iterate met every latency budget in {} steps",
                out.iterations
            ),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::initialize;
    use crate::physics::energy_breakdown;
    use crate::scenario::ScenarioConfig;

    fn scenario() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::reference(vec![[0.0, 0.0], [120.0, 40.0]]);
        cfg.latency_budget = 2.0;
        cfg
    }

    #[test]
    fn uncompressed_ratio_gives_no_compression() {
        let cfg = scenario();
        let mut state = initialize(&cfg).unwrap();
        state.allocation.cpu = vec![1e8; 2];
        let out = solve_task_allocation(&cfg, &state, &SolverOptions::default()).unwrap();
        assert_eq!(out.task_sat, vec![false; 2]);
        assert_eq!(out.task_uav, vec![false; 2]);
        assert!(out.certified);
    }

    #[test]
    fn cheap_satellite_compression_is_chosen() {
        let cfg = scenario();
        let mut state = initialize(&cfg).unwrap();
        state.allocation.ratio = vec![0.3; 2];
        state.allocation.cpu = vec![1e8; 2];
        let model = TaskModel::build(&cfg, &state).unwrap();
        for k in 0..2 {
            assert!(model.energy_sat[k] < model.energy_uav[k].unwrap());
            assert!(model.energy_sat[k] < 0.0);
        }
        let out = solve_task_allocation(&cfg, &state, &SolverOptions::default()).unwrap();
        assert_eq!(out.task_sat, vec![true; 2]);
    }

    #[test]
    fn zero_cpu_blocks_uav_compression() {
        let cfg = scenario();
        let mut state = initialize(&cfg).unwrap();
        state.allocation.ratio = vec![0.3; 2];
        let out = solve_task_allocation(&cfg, &state, &SolverOptions::default()).unwrap();
        assert_eq!(out.uav_blocked, vec![0, 1]);
        assert!(out.task_uav.iter().all(|u| !u));
    }

    #[test]
    fn affine_model_matches_physics() {
        let cfg = scenario();
        let mut state = initialize(&cfg).unwrap();
        state.allocation.ratio = vec![0.5, 0.3];
        state.allocation.cpu = vec![2e8, 1e8];
        let model = TaskModel::build(&cfg, &state).unwrap();
        for (sat, uav) in [
            ([true, false], [false, true]),
            ([false, false], [true, false]),
            ([true, true], [false, false]),
        ] {
            let mut s = state.clone();
            s.allocation.task_sat = sat.to_vec();
            s.allocation.task_uav = uav.to_vec();
            let e = energy_breakdown(&cfg, &s).unwrap().total;
            let lat = physics::latency_breakdown(&cfg, &s).unwrap().total;
            assert!((model.energy(&sat, &uav) - e).abs() <= 1e-12 * e);
            for (a, b) in model.latencies(&sat, &uav).iter().zip(&lat) {
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn tight_budget_is_infeasible() {
        let mut cfg = scenario();
        cfg.latency_budget = 1e-3;
        let state = initialize(&cfg).unwrap();
        let err = solve_task_allocation(&cfg, &state, &SolverOptions::default()).unwrap_err();
        assert!(err.is_infeasible());
    }
}
