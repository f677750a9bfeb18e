//! Whole-problem brute force for a single terminal.
//!
//! With one terminal the UAV geometry only matters through the access-link
//! gain, so the best coverage-admissible geometry is found first on a coarse
//! grid. The remaining variables (task choice, ratio, UAV CPU, transmit
//! power) are then searched per task choice with a zoomed grid.

use crate::error::{Error, Result};
use crate::physics::{Allocation, Placement, SolutionState};
use crate::scenario::ScenarioConfig;

use super::grid::{grid_minimize, grid_minimize_zoom, Axis, GridSpec};
use super::model;

/// Half-width of the horizontal offset window around the terminal, meters.
const OFFSET_WINDOW: f64 = 100.0;
const ZOOM_POINTS: usize = 21;

#[derive(Debug, Clone, PartialEq)]
pub struct JointOracle {
    pub state: SolutionState,
    pub energy: f64,
}

pub fn joint_reference(
    cfg: &ScenarioConfig,
    geometry_points: usize,
    points: usize,
    rounds: usize,
) -> Result<JointOracle> {
    if cfg.num_gts() != 1 {
        return Err(Error::Size(format!(
            "joint oracle takes one terminal, got {}",
            cfg.num_gts()
        )));
    }
    let g = cfg.gt_positions[0];
    let bw = cfg.uav_bandwidth_total;
    let [t_lo, t_hi] = model::beamwidth_interval(cfg);
    let geo = GridSpec::new(
        vec![
            Axis::new(
                cfg.altitude_range[0],
                cfg.altitude_range[1],
                geometry_points,
            )?,
            Axis::new(t_lo, t_hi, geometry_points)?,
            Axis::new(g[0] - OFFSET_WINDOW, g[0] + OFFSET_WINDOW, geometry_points)?,
            Axis::new(g[1] - OFFSET_WINDOW, g[1] + OFFSET_WINDOW, geometry_points)?,
        ],
        "terminal inside the footprint",
    );
    let best_geo = grid_minimize(&geo, |x| {
        let d = (x[2] - g[0]).hypot(x[3] - g[1]);
        (d <= x[0] * x[1].tan()).then(|| {
            -model::access_rate(cfg, [x[2], x[3]], x[0], x[1], 0, bw, cfg.uav_power_budget)
        })
    })?;
    let placement = Placement {
        uav_xy: [best_geo.point[2], best_geo.point[3]],
        altitude: best_geo.point[0],
        half_beamwidth: best_geo.point[1],
    };
    let curve = cfg.overhead_curves[0].segments();
    let rho_min = curve[curve.len() - 1].lower;
    let p_axis = Axis::new(cfg.uav_power_budget * 1e-9, cfg.uav_power_budget, points)?;
    let rho_axis = Axis::new(rho_min, 1.0, points)?;
    let f_axis = Axis::new(cfg.uav_cpu_total * 1e-9, cfg.uav_cpu_total, points)?;

    let mut best: Option<JointOracle> = None;
    // 0: uncompressed, 1: satellite, 2: UAV.
    for task in 0..3 {
        let axes = match task {
            0 => vec![p_axis],
            1 => vec![rho_axis, p_axis],
            _ => vec![rho_axis, f_axis, p_axis],
        };
        let spec = GridSpec::new(axes, "admissible and within the deadline");
        let build = |x: &[f64]| {
            let (rho, f, p) = match task {
                0 => (1.0, 0.0, x[0]),
                1 => (x[0], 0.0, x[1]),
                _ => (x[0], x[1], x[2]),
            };
            SolutionState {
                placement,
                allocation: Allocation {
                    bandwidth: vec![bw],
                    cpu: vec![f],
                    power: vec![p],
                    ratio: vec![rho],
                    task_sat: vec![task == 1],
                    task_uav: vec![task == 2],
                },
            }
        };
        let Ok(found) = grid_minimize_zoom(&spec, rounds, ZOOM_POINTS, |x| {
            let s = build(x);
            if !model::admissible(cfg, &s) {
                return None;
            }
            model::evaluate(cfg, &s).map(|e| e.total)
        }) else {
            continue;
        };
        if best.as_ref().map_or(true, |b| found.value < b.energy) {
            best = Some(JointOracle {
                state: build(&found.point),
                energy: found.value,
            });
        }
    }
    best.ok_or(Error::EmptyGrid)
}
