//! Joint bandwidth and transmit-power split over the UAV-to-terminal links.
//!
//! Every link runs at exactly the rate that fills its remaining latency
//! budget, so power is a function of bandwidth alone:
//! `p_k = q_k(b_k) / V_k` with `q_k(b) = b (2^(U_k/b) - 1)`. The convex
//! program `min sum slack_k p_k` over `sum b <= B`, `sum p <= P` is solved
//! through its two multipliers.

use std::f64::consts::LN_2;

use crate::error::{Block, Error, Result};
use crate::physics::{self, SolutionState};
use crate::scenario::ScenarioConfig;

use super::SolverOptions;

/// Upper end of the exponent search; keeps `exp` finite.
const Y_MAX: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerBandwidth {
    pub bandwidth: Vec<f64>,
    pub power: Vec<f64>,
    /// UAV-to-terminal transmit energy.
    pub objective: f64,
    pub bandwidth_price: f64,
    pub power_price: f64,
    /// Largest scaled stationarity / complementarity / primal residual.
    pub kkt_residual: f64,
    /// Largest relative gap between each link's delivery time and its slack.
    pub rate_residual: f64,
}

/// `1 + (y - 1) e^y`, increasing from 0 on `y > 0`.
fn phi(y: f64) -> f64 {
    if y < 1e-3 {
        y * y * (0.5 + y * (1.0 / 3.0 + y * (0.125 + y * (1.0 / 30.0 + y / 144.0))))
    } else {
        y * y.exp() - y.exp_m1()
    }
}

/// Solves `phi(y) = c` for `y > 0`.
fn solve_exponent(c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    if phi(Y_MAX) <= c {
        return Y_MAX;
    }
    let (mut lo, mut hi) = (0.0, Y_MAX);
    let mut y = if c < 1.0 {
        (2.0 * c).sqrt()
    } else {
        c.ln().max(1.0)
    };
    y = y.clamp(1e-300, Y_MAX);
    for _ in 0..200 {
        let f = phi(y);
        if f < c {
            lo = y;
        } else {
            hi = y;
        }
        // Newton on ln(phi) - ln(c); phi' = y e^y.
        let step = (f.ln() - c.ln()) * f / (y * y.exp());
        let mut next = y - step;
        if !(next > lo && next < hi) {
            next = if lo > 0.0 {
                0.5 * (lo + hi)
            } else {
                0.5 * hi.min(2.0 * y)
            };
        }
        if (next - y).abs() <= 1e-15 * y {
            return next;
        }
        y = next;
    }
    y
}

struct Links {
    /// Required rate per link.
    rate: Vec<f64>,
    /// SNR per watt per hertz.
    gain: Vec<f64>,
    slack: Vec<f64>,
}

impl Links {
    fn len(&self) -> usize {
        self.rate.len()
    }

    /// Bandwidth minimizing the weighted power at prices (`nu`, `mu`).
    fn bandwidth_at(&self, nu: f64, mu: f64) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let c = nu * self.gain[k] / (self.slack[k] + mu);
                self.rate[k] * LN_2 / solve_exponent(c)
            })
            .collect()
    }

    fn power_of(&self, k: usize, b: f64) -> f64 {
        b * (self.rate[k] * LN_2 / b).exp_m1() / self.gain[k]
    }

    /// Bandwidth price that exactly exhausts `total` at power price `mu`.
    fn fill_bandwidth(&self, total: f64, mu: f64) -> (Vec<f64>, f64) {
        let n = self.len() as f64;
        let price =
            |k: usize| phi(self.rate[k] * LN_2 * n / total) * (self.slack[k] + mu) / self.gain[k];
        let mut lo = (0..self.len()).map(price).fold(f64::INFINITY, f64::min);
        let mut hi = (0..self.len()).map(price).fold(0.0, f64::max);
        for _ in 0..200 {
            if hi <= lo * (1.0 + 1e-15) {
                break;
            }
            let mid = (lo * hi).sqrt();
            let used: f64 = self.bandwidth_at(mid, mu).iter().sum();
            if used > total {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let nu = (lo * hi).sqrt();
        let mut b = self.bandwidth_at(nu, mu);
        let used: f64 = b.iter().sum();
        for v in b.iter_mut() {
            *v *= total / used;
        }
        (b, nu)
    }

    fn total_power(&self, b: &[f64]) -> f64 {
        b.iter()
            .enumerate()
            .map(|(k, &bk)| self.power_of(k, bk))
            .sum()
    }
}

pub fn solve_power_bandwidth(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    opts: &SolverOptions,
) -> Result<PowerBandwidth> {
    let _ = opts;
    let alloc = &state.allocation;
    let slack = physics::access_slack(cfg, alloc)?;
    let k_count = cfg.num_gts();
    let mut links = Links {
        rate: Vec::with_capacity(k_count),
        gain: Vec::with_capacity(k_count),
        slack,
    };
    for k in 0..k_count {
        if links.slack[k] <= 0.0 {
            return Err(Error::infeasible(
                Block::PowerBandwidth,
                format!(
                    "terminal {k} has no time left for the access link ({:e} s)",
                    links.slack[k]
                ),
            ));
        }
        links
            .rate
            .push(physics::access_link_bits(cfg, alloc, k) / links.slack[k]);
        links
            .gain
            .push(physics::snr_factor(cfg, &state.placement, k));
    }

    let total_b = cfg.uav_bandwidth_total;
    let budget = cfg.uav_power_budget;
    let (mut b, mut nu) = links.fill_bandwidth(total_b, 0.0);
    let mut mu = 0.0;
    if links.total_power(&b) > budget {
        let base = links.slack.iter().copied().fold(0.0, f64::max);
        let mut hi = base;
        let mut lo = 0.0;
        loop {
            let (bh, _) = links.fill_bandwidth(total_b, hi);
            if links.total_power(&bh) <= budget {
                break;
            }
            if hi > 1e15 * base {
                return Err(Error::infeasible(
                    Block::PowerBandwidth,
                    format!(
                        "minimum transmit power {:e} W exceeds the {budget:e} W budget",
                        links.total_power(&bh)
                    ),
                ));
            }
            lo = hi;
            hi *= 4.0;
        }
        for _ in 0..200 {
            let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
            if hi - lo <= 1e-15 * hi {
                break;
            }
            let (bm, _) = links.fill_bandwidth(total_b, mid);
            if links.total_power(&bm) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        mu = hi;
        (b, nu) = links.fill_bandwidth(total_b, mu);
    }

    let power: Vec<f64> = (0..k_count).map(|k| links.power_of(k, b[k])).collect();
    let objective = (0..k_count).map(|k| links.slack[k] * power[k]).sum();

    // Stationarity: (slack + mu) q'(b) / V + nu = 0, with q'(b) = -phi(y).
    let mut kkt: f64 = 0.0;
    for k in 0..k_count {
        let y = links.rate[k] * LN_2 / b[k];
        let grad = -(links.slack[k] + mu) * phi(y) / links.gain[k];
        kkt = kkt.max(((grad + nu) / nu).abs());
    }
    let total_power: f64 = power.iter().sum();
    kkt = kkt.max(((b.iter().sum::<f64>() - total_b) / total_b).abs());
    kkt = kkt.max(((total_power - budget) / budget).max(0.0));
    if mu > 0.0 {
        kkt = kkt.max(((total_power - budget) / budget).abs());
    }

    let mut rate_residual: f64 = 0.0;
    for k in 0..k_count {
        let r = physics::rate_uav_gt(cfg, &state.placement, b[k], power[k], k)?;
        let t = physics::access_link_bits(cfg, alloc, k) / r;
        rate_residual = rate_residual.max(((t - links.slack[k]) / links.slack[k]).abs());
    }

    Ok(PowerBandwidth {
        bandwidth: b,
        power,
        objective,
        bandwidth_price: nu,
        power_price: mu,
        kkt_residual: kkt,
        rate_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::initialize;
    use crate::physics::latency_breakdown;

    #[test]
    fn exponent_solver_inverts_phi() {
        for &c in &[1e-20, 1e-9, 1e-3, 0.5, 1.0, 3.0, 1e3, 1e30, 1e200] {
            let y = solve_exponent(c);
            assert!(
                ((phi(y) - c) / c).abs() < 1e-12,
                "c={c} y={y} phi={}",
                phi(y)
            );
        }
    }

    #[test]
    fn phi_series_joins_closed_form() {
        let y: f64 = 1e-3;
        let closed = y * y.exp() - y.exp_m1();
        assert!(((phi(y * (1.0 - 1e-12)) - closed) / closed).abs() < 1e-8);
    }

    #[test]
    fn single_terminal_uses_all_bandwidth_and_meets_deadline() {
        let cfg = ScenarioConfig::reference(vec![[30.0, -20.0]]);
        let state = initialize(&cfg).unwrap();
        let out = solve_power_bandwidth(&cfg, &state, &SolverOptions::default()).unwrap();
        assert!(
            (out.bandwidth[0] - cfg.uav_bandwidth_total).abs() <= 1e-12 * cfg.uav_bandwidth_total
        );
        assert!(out.power[0] <= cfg.uav_power_budget);
        let mut s = state.clone();
        s.allocation.bandwidth = out.bandwidth;
        s.allocation.power = out.power;
        let lat = latency_breakdown(&cfg, &s).unwrap();
        assert!((lat.total[0] - cfg.latency_budget).abs() <= 1e-9 * cfg.latency_budget);
    }

    #[test]
    fn symmetric_terminals_get_equal_shares() {
        let mut cfg = ScenarioConfig::reference(vec![
            [100.0, 0.0],
            [-100.0, 0.0],
            [0.0, 100.0],
            [0.0, -100.0],
        ]);
        cfg.latency_budget = 2.0;
        let state = initialize(&cfg).unwrap();
        let out = solve_power_bandwidth(&cfg, &state, &SolverOptions::default()).unwrap();
        for k in 1..4 {
            assert!((out.bandwidth[k] - out.bandwidth[0]).abs() <= 1e-9 * out.bandwidth[0]);
            assert!((out.power[k] - out.power[0]).abs() <= 1e-9 * out.power[0]);
        }
        assert!(out.kkt_residual < 1e-9);
    }

    #[test]
    fn power_budget_binds_when_tight() {
        let mut cfg = ScenarioConfig::reference(vec![[250.0, 0.0], [0.0, 10.0]]);
        cfg.data_bits = vec![524_288.0, 524_288.0];
        let mut state = initialize(&cfg).unwrap();
        // Terminal 1 spends most of its budget computing, which skews the
        // energy weights away from pure power.
        state.allocation.task_uav[1] = true;
        state.allocation.ratio[1] = 0.5;
        cfg.latency_budget = physics::shared_latency(&cfg, &state.allocation).unwrap() + 0.05;
        let cycles = physics::workload_cycles(&cfg, &state.allocation, 1).unwrap();
        state.allocation.cpu[1] = cycles / 0.045;
        let free = solve_power_bandwidth(&cfg, &state, &SolverOptions::default()).unwrap();
        assert_eq!(free.power_price, 0.0);

        cfg.uav_power_budget = 0.99 * free.power.iter().sum::<f64>();
        let out = solve_power_bandwidth(&cfg, &state, &SolverOptions::default()).unwrap();
        assert!(out.power_price > 0.0);
        let total: f64 = out.power.iter().sum();
        assert!((total - cfg.uav_power_budget).abs() <= 1e-9 * cfg.uav_power_budget);
        assert!(out.objective > free.objective);
        assert!(out.kkt_residual < 1e-9, "{}", out.kkt_residual);
    }

    #[test]
    fn no_slack_is_infeasible() {
        let mut cfg = ScenarioConfig::reference(vec![[0.0, 0.0]]);
        cfg.latency_budget = 1e-3;
        let state = initialize(&cfg).unwrap();
        assert!(
            solve_power_bandwidth(&cfg, &state, &SolverOptions::default())
                .unwrap_err()
                .is_infeasible()
        );
    }
}
