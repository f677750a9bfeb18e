//! Double-double evaluation of the closed-form link and workload formulas,
//! good to roughly 30 significant digits for the inputs they see here.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::physics::Placement;
use crate::scenario::ScenarioConfig;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    pub const LN_2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };
    pub const LN_10: Dd = Dd {
        hi: std::f64::consts::LN_10,
        lo: -2.1707562233822494e-16,
    };

    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Dd {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    fn scale(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::new(self.hi.sqrt());
        }
        let s = Dd::new(self.hi.sqrt());
        s + (self - s.sqr()) / s.scale(1)
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / Dd::LN_2.hi).round();
        // |r| <= ln2 / 2, then shrink further before the series.
        let r = (self - Dd::LN_2 * Dd::new(k)).scale(-5);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..=27 {
            term = term * r / Dd::new(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 * sum.hi.abs() {
                break;
            }
        }
        for _ in 0..5 {
            sum = sum.sqr();
        }
        sum.scale(k as i32)
    }

    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::new(f64::NAN);
        }
        let mut y = Dd::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    /// `ln(1 + x)` without forming `1 + x` in working precision first.
    pub fn ln_1p(self) -> Dd {
        if self.hi.abs() > 0.5 {
            return (Dd::ONE + self).ln();
        }
        // ln(1+x) = 2 atanh(x / (2 + x)), series in z^2.
        let z = self / (Dd::new(2.0) + self);
        let z2 = z.sqr();
        let mut pow = z;
        let mut sum = z;
        for n in 1..200 {
            pow = pow * z2;
            let term = pow / Dd::new((2 * n + 1) as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 * sum.hi.abs() {
                break;
            }
        }
        sum.scale(1)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::renorm(s, e + f)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::renorm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaId {
    /// Satellite-to-UAV rate.
    RateSatUav,
    /// Satellite-to-UAV propagation delay.
    PropagationDelay,
    /// UAV-to-terminal channel power gain.
    ChannelGain,
    /// UAV-to-terminal rate.
    RateUavGt,
    /// Compression workload in cycles.
    Overhead,
}

impl FormulaId {
    pub const ALL: [FormulaId; 5] = [
        FormulaId::RateSatUav,
        FormulaId::PropagationDelay,
        FormulaId::ChannelGain,
        FormulaId::RateUavGt,
        FormulaId::Overhead,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaId::RateSatUav => "r_SU",
            FormulaId::PropagationDelay => "t_P",
            FormulaId::ChannelGain => "g_k",
            FormulaId::RateUavGt => "r_k",
            FormulaId::Overhead => "O_k",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownFormula(s.to_string()))
    }
}

/// Per-terminal inputs; fields a formula does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormulaArgs {
    pub gt: usize,
    pub placement: Placement,
    pub bandwidth: f64,
    pub power: f64,
    pub ratio: f64,
}

impl Default for FormulaArgs {
    fn default() -> Self {
        FormulaArgs {
            gt: 0,
            placement: Placement {
                uav_xy: [0.0, 0.0],
                altitude: 100.0,
                half_beamwidth: std::f64::consts::FRAC_PI_4,
            },
            bandwidth: 1.0,
            power: 0.0,
            ratio: 1.0,
        }
    }
}

fn gain(cfg: &ScenarioConfig, a: &FormulaArgs) -> Result<Dd> {
    let g = cfg
        .gt_positions
        .get(a.gt)
        .ok_or_else(|| Error::Domain(format!("no terminal {}", a.gt)))?;
    let dx = Dd::new(a.placement.uav_xy[0]) - Dd::new(g[0]);
    let dy = Dd::new(a.placement.uav_xy[1]) - Dd::new(g[1]);
    let h = Dd::new(a.placement.altitude);
    Ok(Dd::new(cfg.ref_channel_gain) / (dx.sqr() + dy.sqr() + h.sqr()))
}

pub fn eval_extended(id: FormulaId, cfg: &ScenarioConfig, a: &FormulaArgs) -> Result<Dd> {
    let v = match id {
        FormulaId::RateSatUav => {
            let b = Dd::new(cfg.sat_bandwidth);
            let four_pi_d = Dd::new(4.0) * Dd::PI * Dd::new(cfg.sat_uav_distance);
            let lambda = Dd::new(cfg.sat_wavelength);
            let snr = Dd::new(cfg.sat_beam_gain) * lambda.sqr() * Dd::new(cfg.sat_tx_power)
                / (four_pi_d.sqr() * b * Dd::new(cfg.noise_psd));
            b * snr.ln_1p() / Dd::LN_2
        }
        FormulaId::PropagationDelay => Dd::new(cfg.sat_uav_distance) / Dd::new(cfg.lightspeed),
        FormulaId::ChannelGain => gain(cfg, a)?,
        FormulaId::RateUavGt => {
            if a.bandwidth <= 0.0 {
                return Err(Error::Domain("bandwidth must be positive".into()));
            }
            let b = Dd::new(a.bandwidth);
            let theta = Dd::new(a.placement.half_beamwidth);
            let snr = Dd::new(cfg.antenna_gain_const) * gain(cfg, a)? * Dd::new(a.power)
                / (theta.sqr() * Dd::new(cfg.noise_psd) * b);
            b * snr.ln_1p() / Dd::LN_2
        }
        FormulaId::Overhead => {
            let curve = cfg
                .overhead_curves
                .get(a.gt)
                .ok_or_else(|| Error::Domain(format!("no terminal {}", a.gt)))?;
            let segs = curve.segments();
            let rho = a.ratio;
            if !(rho >= segs[segs.len() - 1].lower && rho <= 1.0) {
                return Err(Error::Domain(format!("ratio {rho} outside the curve")));
            }
            // A shared boundary belongs to the deeper segment.
            let seg = segs
                .iter()
                .enumerate()
                .find(|(d, s)| rho > s.lower || (*d == segs.len() - 1))
                .map(|(_, s)| s)
                .expect("last segment always matches");
            Dd::new(cfg.cycles_per_overhead)
                * (Dd::new(seg.slope) * Dd::new(rho) + Dd::new(seg.intercept))
        }
    };
    Ok(v)
}

/// Evaluates the formula named `id` (`r_SU`, `t_P`, `g_k`, `r_k`, `O_k`).
pub fn eval_formula_extended(id: &str, cfg: &ScenarioConfig, args: &FormulaArgs) -> Result<f64> {
    Ok(eval_extended(id.parse()?, cfg, args)?.to_f64())
}
