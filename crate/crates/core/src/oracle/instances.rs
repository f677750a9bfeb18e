//! Seeded random scenarios and states for exercising the block solvers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithm::initialize;
use crate::physics::{self, SolutionState};
use crate::scenario::{generate_gt_positions, ScenarioConfig};

#[derive(Debug, Clone)]
pub struct InstanceGen {
    rng: ChaCha8Rng,
}

impl InstanceGen {
    pub fn new(seed: u64) -> Self {
        InstanceGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Reference parameters with `k` terminals in a 300 m disk, per-terminal
    /// data between 8 and 96 KB, and a randomized deadline and satellite CPU.
    pub fn scenario(&mut self, k: usize) -> ScenarioConfig {
        let positions = generate_gt_positions(k, 300.0, self.rng.gen()).expect("positive radius");
        let mut cfg = ScenarioConfig::reference(positions);
        cfg.data_bits = (0..k)
            .map(|_| self.rng.gen_range(8.0..96.0_f64).round() * 8192.0)
            .collect();
        cfg.latency_budget = self.rng.gen_range(0.4..1.5);
        cfg.sat_cpu = self.rng.gen_range(0.5e9..2e9);
        cfg
    }

    fn split(&mut self, k: usize, total: f64, fill: f64) -> Vec<f64> {
        let w: Vec<f64> = (0..k).map(|_| self.rng.gen_range(0.2..1.0)).collect();
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s * total * fill).collect()
    }

    /// A covering placement with random tasks, ratios and resource shares.
    /// Every terminal gets a positive UAV CPU share.
    pub fn state(&mut self, cfg: &ScenarioConfig) -> SolutionState {
        let k = cfg.num_gts();
        let mut s = initialize(cfg).expect("reference scenario is valid");
        for i in 0..k {
            match self.rng.gen_range(0..3) {
                1 => s.allocation.task_sat[i] = true,
                2 => s.allocation.task_uav[i] = true,
                _ => {}
            }
            let min = cfg.overhead_curves[i].min_ratio();
            s.allocation.ratio[i] = self.rng.gen_range(min..=1.0);
        }
        let fill = self.rng.gen_range(0.5..1.0);
        s.allocation.cpu = self.split(k, cfg.uav_cpu_total, fill);
        let fill = self.rng.gen_range(0.3..1.0);
        s.allocation.bandwidth = self.split(k, cfg.uav_bandwidth_total, fill);
        let fill = self.rng.gen_range(0.3..1.0);
        s.allocation.power = self.split(k, cfg.uav_power_budget, fill);

        // Move the UAV a little and widen the beam enough to keep coverage.
        let shift = [
            self.rng.gen_range(-60.0..60.0),
            self.rng.gen_range(-60.0..60.0),
        ];
        let xy = [
            s.placement.uav_xy[0] + shift[0],
            s.placement.uav_xy[1] + shift[1],
        ];
        let l_max = physics::max_gt_distance(cfg, xy);
        let [h_min, h_max] = cfg.altitude_range;
        let h = self.rng.gen_range(h_min..h_max);
        let theta = (l_max / h).atan() * self.rng.gen_range(1.0..1.05);
        if theta < cfg.beamwidth_bounds()[1] {
            s.placement.uav_xy = xy;
            s.placement.altitude = h;
            s.placement.half_beamwidth = theta;
        }
        s
    }

    /// A uniform draw from [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen()
    }
}
