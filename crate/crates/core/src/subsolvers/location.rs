//! Horizontal UAV position with altitude, beam and radio resources fixed.
//!
//! Each terminal confines the UAV to a disk around it whose radius is the
//! smaller of the coverage radius and the distance at which its link would
//! miss the deadline. The search runs over the bounding box of all disks.

use crate::error::{Block, Error, Result};
use crate::physics::SolutionState;
use crate::scenario::ScenarioConfig;

use super::altitude::{LinkBudget, SCREEN_TOL};
use super::SolverOptions;

const MAX_RECENTER: usize = 256;
const EDGE_ROUNDS: usize = 40;
const EDGE_HALF: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationResult {
    pub uav_xy: [f64; 2],
    pub objective: f64,
    pub evaluated: usize,
}

/// Objective and feasibility of UAV positions for a fixed state.
#[derive(Debug, Clone)]
pub struct LocationLandscape {
    links: LinkBudget,
    gts: Vec<[f64; 2]>,
    altitude: f64,
    theta: f64,
    /// Admissible distance from each terminal; `None` when no position works.
    radius: Vec<Option<f64>>,
}

impl LocationLandscape {
    pub fn new(cfg: &ScenarioConfig, state: &SolutionState) -> Result<Self> {
        let links = LinkBudget::build(cfg, state)?;
        let h = state.placement.altitude;
        let theta = state.placement.half_beamwidth;
        let cover = h * theta.tan();
        let radius = links
            .reach
            .iter()
            .map(|&reach| {
                let q2 = reach / (theta * theta) - h * h;
                if q2 >= 0.0 {
                    Some(cover.min(q2.sqrt()))
                } else {
                    None
                }
            })
            .collect();
        Ok(Self {
            links,
            gts: cfg.gt_positions.clone(),
            altitude: h,
            theta,
            radius,
        })
    }

    pub fn radii(&self) -> &[Option<f64>] {
        &self.radius
    }

    fn dist2(&self, xy: [f64; 2]) -> Vec<f64> {
        self.gts
            .iter()
            .map(|g| (xy[0] - g[0]).powi(2) + (xy[1] - g[1]).powi(2))
            .collect()
    }

    /// Access-link energy at `xy`, whether or not the position is admissible.
    pub fn objective(&self, xy: [f64; 2]) -> f64 {
        self.links
            .energy(&self.dist2(xy), self.altitude, self.theta)
    }

    pub fn feasible(&self, xy: [f64; 2]) -> bool {
        let d2 = self.dist2(xy);
        self.radius.iter().zip(&d2).all(|(r, &d)| match r {
            Some(r) => d <= r * r * (1.0 + SCREEN_TOL),
            None => false,
        })
    }

    /// Bounding box of the disk intersection, `None` when provably empty.
    pub fn bounding_box(&self) -> Option<[[f64; 2]; 2]> {
        let mut lo = [f64::NEG_INFINITY; 2];
        let mut hi = [f64::INFINITY; 2];
        for (g, r) in self.gts.iter().zip(&self.radius) {
            let r = (*r)?;
            for i in 0..2 {
                lo[i] = lo[i].max(g[i] - r);
                hi[i] = hi[i].min(g[i] + r);
            }
        }
        (lo[0] <= hi[0] && lo[1] <= hi[1]).then_some([lo, hi])
    }
}

pub fn solve_location(
    cfg: &ScenarioConfig,
    state: &SolutionState,
    opts: &SolverOptions,
) -> Result<LocationResult> {
    let land = LocationLandscape::new(cfg, state)?;
    let [lo, hi] = land.bounding_box().ok_or_else(|| {
        Error::infeasible(
            Block::Location,
            "the admissible disks around the terminals do not intersect",
        )
    })?;

    let mut evaluated = 0;
    let mut best: Option<([f64; 2], f64)> = None;
    let mut visit = |xy: [f64; 2], best: &mut Option<([f64; 2], f64)>| {
        if !land.feasible(xy) {
            return;
        }
        evaluated += 1;
        let e = land.objective(xy);
        if best.map_or(true, |(_, b)| e < b) {
            *best = Some((xy, e));
        }
    };

    visit(state.placement.uav_xy, &mut best);
    let n = opts.location_grid_points;
    let step = [
        (hi[0] - lo[0]) / (n - 1) as f64,
        (hi[1] - lo[1]) / (n - 1) as f64,
    ];
    for i in 0..n {
        for j in 0..n {
            visit(
                [lo[0] + i as f64 * step[0], lo[1] + j as f64 * step[1]],
                &mut best,
            );
        }
    }
    let mut h = step;
    for _ in 0..opts.refinement_levels {
        h = [h[0] / 2.0, h[1] / 2.0];
        // Re-center until the incumbent stops moving so an optimum on a disk
        // edge can be followed past the first window.
        for _ in 0..MAX_RECENTER {
            let Some((center, _)) = best else { break };
            for i in -2i32..=2 {
                for j in -2i32..=2 {
                    visit(
                        [center[0] + i as f64 * h[0], center[1] + j as f64 * h[1]],
                        &mut best,
                    );
                }
            }
            if best.map(|(c, _)| c) == Some(center) {
                break;
            }
        }
    }
    if let Some((center, _)) = best {
        slide_along_edge(&land, center, h[0].max(h[1]), &mut |xy| {
            visit(xy, &mut best)
        });
    }
    match best {
        Some((uav_xy, objective)) => Ok(LocationResult {
            uav_xy,
            objective,
            evaluated,
        }),
        None => Err(Error::infeasible(
            Block::Location,
            "no grid point lies in every admissible disk",
        )),
    }
}

/// Local search in polar coordinates around the terminal whose disk edge is
/// nearest to `center`. A curved edge is a coordinate line there, so an
/// optimum pressed against it is followed instead of stalling on the
/// Cartesian lattice.
fn slide_along_edge(
    land: &LocationLandscape,
    center: [f64; 2],
    cell: f64,
    visit: &mut impl FnMut([f64; 2]),
) {
    let d2 = land.dist2(center);
    let Some((k, r)) = land
        .radius
        .iter()
        .enumerate()
        .filter_map(|(k, r)| r.map(|r| (k, r)))
        .filter(|&(_, r)| r > 0.0)
        .max_by(|a, b| (d2[a.0].sqrt() / a.1).total_cmp(&(d2[b.0].sqrt() / b.1)))
    else {
        return;
    };
    let g = land.gts[k];
    let at = |phi: f64, rad: f64| [g[0] + rad * phi.cos(), g[1] + rad * phi.sin()];
    let mut phi = (center[1] - g[1]).atan2(center[0] - g[0]);
    let mut rad = d2[k].sqrt();
    let mut span = [4.0 * cell / r, 4.0 * cell];
    let mut best = (land.feasible(center)).then(|| land.objective(center));
    for _ in 0..EDGE_ROUNDS {
        let mut moved = None;
        for i in -EDGE_HALF..=EDGE_HALF {
            for j in -EDGE_HALF..=EDGE_HALF {
                let p = phi + span[0] * i as f64 / EDGE_HALF as f64;
                let q = (rad + span[1] * j as f64 / EDGE_HALF as f64).clamp(0.0, r);
                let xy = at(p, q);
                if !land.feasible(xy) {
                    continue;
                }
                let e = land.objective(xy);
                if best.map_or(true, |b| e < b) {
                    best = Some(e);
                    moved = Some((p, q));
                }
            }
        }
        if let Some((p, q)) = moved {
            phi = p;
            rad = q;
            visit(at(p, q));
        }
        span = [span[0] / 2.0, span[1] / 2.0];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::initialize;

    #[test]
    fn single_terminal_pulls_uav_overhead() {
        let mut cfg = ScenarioConfig::reference(vec![[40.0, -25.0]]);
        cfg.latency_budget = 1.0;
        let mut state = initialize(&cfg).unwrap();
        state.placement.uav_xy = [10.0, 0.0];
        state.placement.half_beamwidth = 1.2;
        state.placement.altitude = 60.0;
        let out = solve_location(&cfg, &state, &SolverOptions::default()).unwrap();
        let land = LocationLandscape::new(&cfg, &state).unwrap();
        let r = land.radii()[0].unwrap();
        let cell = 2.0 * r / 200.0;
        assert!((out.uav_xy[0] - 40.0).abs() <= cell && (out.uav_xy[1] + 25.0).abs() <= cell);
    }

    #[test]
    fn mirrored_pair_lands_on_bisector() {
        let mut cfg = ScenarioConfig::reference(vec![[-120.0, 30.0], [120.0, 30.0]]);
        cfg.latency_budget = 1.0;
        let mut state = initialize(&cfg).unwrap();
        state.placement.uav_xy = [0.0, 100.0];
        state.placement.altitude = 100.0;
        state.placement.half_beamwidth = 1.3;
        let land = LocationLandscape::new(&cfg, &state).unwrap();
        let [lo, hi] = land.bounding_box().unwrap();
        let out = solve_location(&cfg, &state, &SolverOptions::default()).unwrap();
        assert!(out.uav_xy[0].abs() <= (hi[0] - lo[0]) / 200.0);
    }

    #[test]
    fn unreachable_deadline_is_infeasible() {
        let mut cfg = ScenarioConfig::reference(vec![[0.0, 0.0], [250.0, 0.0]]);
        cfg.latency_budget = 0.7;
        let mut state = initialize(&cfg).unwrap();
        // A tiny power makes the access link miss the deadline everywhere.
        state.allocation.power = vec![1e-15; 2];
        assert!(solve_location(&cfg, &state, &SolverOptions::default())
            .unwrap_err()
            .is_infeasible());
    }
}
