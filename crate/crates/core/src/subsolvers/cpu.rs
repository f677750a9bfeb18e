use crate::error::{Block, Error, Result};
use crate::physics::{self, SolutionState};
use crate::scenario::ScenarioConfig;

/// UAV CPU shares that make every UAV-compressed terminal meet the budget
/// exactly; terminals not compressed on the UAV get zero.
pub fn solve_cpu_allocation(cfg: &ScenarioConfig, state: &SolutionState) -> Result<Vec<f64>> {
    let alloc = &state.allocation;
    let shared = physics::shared_latency(cfg, alloc)?;
    let mut cpu = vec![0.0; cfg.num_gts()];
    for k in 0..cfg.num_gts() {
        if !alloc.task_uav[k] {
            continue;
        }
        let r_k =
            physics::rate_uav_gt(cfg, &state.placement, alloc.bandwidth[k], alloc.power[k], k)?;
        if r_k <= 0.0 {
            return Err(Error::Degenerate(format!(
                "terminal {k}: zero access-link rate"
            )));
        }
        let access = physics::access_link_bits(cfg, alloc, k) / r_k;
        let slack = cfg.latency_budget - shared - access;
        if slack <= 0.0 {
            return Err(Error::infeasible(
                Block::CpuAllocation,
                format!("terminal {k} has no time left for UAV compute ({slack:e} s)"),
            ));
        }
        cpu[k] = physics::workload_cycles(cfg, alloc, k)? / slack;
    }
    let total: f64 = cpu.iter().sum();
    if total > cfg.uav_cpu_total {
        return Err(Error::infeasible(
            Block::CpuAllocation,
            format!(
                "required UAV CPU {total:e} Hz exceeds {:e} Hz",
                cfg.uav_cpu_total
            ),
        ));
    }
    Ok(cpu)
}
