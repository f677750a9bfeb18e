//! Problem instances: physical parameters, ground-terminal layout and the
//! per-terminal computation-overhead curves.
//!
//! Everything is stored in SI units. The JSON document accepted by
//! [`ScenarioConfig::from_json`] may give gains in dB, noise in dBm/Hz and
//! data sizes in bytes; those are converted on load. [`ScenarioConfig::to_json`]
//! always writes the linear/SI spelling so that a load/serialize/load cycle
//! is exact.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
pub const DEFAULT_ANTENNA_GAIN: f64 = 2.2846;

/// Margin kept away from 0 and π/2 when clamping the beamwidth range.
pub const BEAMWIDTH_CLAMP: f64 = 1e-3;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_per_hz_to_watts_per_hz(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

/// One linear piece `slope * rho + intercept`, valid for
/// `lower < rho <= upper` where `upper` is the previous segment's `lower`
/// (or 1 for the first segment).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub slope: f64,
    pub intercept: f64,
    pub lower: f64,
}

impl Segment {
    #[inline]
    pub fn value(&self, rho: f64) -> f64 {
        self.slope * rho + self.intercept
    }
}

/// Piecewise-linear computation overhead as a function of the compression
/// ratio. Segments are ordered from the shallowest (`rho` near 1) to the
/// deepest (`rho` near the minimum ratio).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct OverheadCurve {
    segments: Vec<Segment>,
}

impl TryFrom<Vec<Segment>> for OverheadCurve {
    type Error = Error;

    fn try_from(segments: Vec<Segment>) -> Result<Self> {
        OverheadCurve::new(segments)
    }
}

impl From<OverheadCurve> for Vec<Segment> {
    fn from(curve: OverheadCurve) -> Self {
        curve.segments
    }
}

impl OverheadCurve {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let field = "overhead_curves";
        if segments.is_empty() {
            return Err(Error::invalid(field, "curve needs at least one segment"));
        }
        let mut upper = 1.0;
        let mut prev_magnitude = 0.0;
        for (d, seg) in segments.iter().enumerate() {
            if !(seg.slope.is_finite() && seg.slope < 0.0) {
                return Err(Error::invalid(
                    field,
                    format!("segment {d}: slope must be negative"),
                ));
            }
            if !(seg.intercept.is_finite() && seg.intercept > 0.0) {
                return Err(Error::invalid(
                    field,
                    format!("segment {d}: intercept must be positive"),
                ));
            }
            if !(seg.lower > 0.0 && seg.lower < upper) {
                return Err(Error::invalid(field, "boundaries not strictly decreasing"));
            }
            if seg.slope.abs() < prev_magnitude {
                return Err(Error::invalid(
                    field,
                    format!("segment {d}: slope magnitude must not shrink toward small ratios"),
                ));
            }
            // Linear and decreasing, so the minimum sits at the upper end.
            if seg.value(upper) <= 0.0 {
                return Err(Error::invalid(
                    field,
                    format!("segment {d}: overhead must stay positive"),
                ));
            }
            prev_magnitude = seg.slope.abs();
            upper = seg.lower;
        }
        Ok(Self { segments })
    }

    /// Three-level default curve. In cycles (with `cycles_per_overhead = 1`)
    /// it runs from 2e6 at `rho = 1` up to 4.2e7 at the minimum ratio 0.25,
    /// stepping up at each boundary.
    pub fn default_curve() -> Self {
        Self::new(vec![
            Segment {
                slope: -1.0e7,
                intercept: 1.2e7,
                lower: 0.70,
            },
            Segment {
                slope: -4.0e7,
                intercept: 3.4e7,
                lower: 0.45,
            },
            Segment {
                slope: -1.2e8,
                intercept: 7.2e7,
                lower: 0.25,
            },
        ])
        .expect("default overhead curve is valid")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    /// Smallest admissible compression ratio.
    pub fn min_ratio(&self) -> f64 {
        self.segments[self.segments.len() - 1].lower
    }

    /// Upper boundary of segment `d` (zero-based); 1 for the first segment.
    pub fn upper(&self, d: usize) -> f64 {
        if d == 0 {
            1.0
        } else {
            self.segments[d - 1].lower
        }
    }

    pub fn lower(&self, d: usize) -> f64 {
        self.segments[d].lower
    }

    pub fn midpoint(&self, d: usize) -> f64 {
        0.5 * (self.lower(d) + self.upper(d))
    }

    /// Segment containing `rho`. Interior boundaries belong to the deeper
    /// segment; the minimum ratio belongs to the last one.
    pub fn segment_of(&self, rho: f64) -> Result<usize> {
        if !(rho >= self.min_ratio() && rho <= 1.0) {
            return Err(Error::Domain(format!(
                "compression ratio {rho} outside [{}, 1]",
                self.min_ratio()
            )));
        }
        let last = self.segments.len() - 1;
        Ok(self
            .segments
            .iter()
            .position(|s| rho > s.lower)
            .unwrap_or(last))
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        let d = self.segment_of(rho)?;
        Ok(self.segments[d].value(rho))
    }

    /// Whether each boundary steps up when moving to the deeper segment.
    pub fn has_upward_jumps(&self) -> bool {
        self.segments
            .windows(2)
            .all(|w| w[1].value(w[0].lower) >= w[0].value(w[0].lower))
    }
}

/// A fully validated problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub data_bits: Vec<f64>,
    pub gt_positions: Vec<[f64; 2]>,
    pub sat_uav_distance: f64,
    pub sat_beam_gain: f64,
    pub sat_wavelength: f64,
    pub sat_bandwidth: f64,
    pub sat_tx_power: f64,
    pub noise_psd: f64,
    pub ref_channel_gain: f64,
    pub antenna_gain_const: f64,
    pub sidelobe_gain: f64,
    pub comp_energy_coeff: f64,
    pub cycles_per_overhead: f64,
    pub sat_cpu: f64,
    pub uav_cpu_total: f64,
    pub latency_budget: f64,
    pub uav_power_budget: f64,
    pub uav_bandwidth_total: f64,
    pub altitude_range: [f64; 2],
    /// Half-beamwidth range as written; see [`ScenarioConfig::beamwidth_bounds`].
    pub beamwidth_range: [f64; 2],
    pub lightspeed: f64,
    pub overhead_curves: Vec<OverheadCurve>,
}

impl ScenarioConfig {
    /// Main parameter set of the reference evaluation: 64 KB per terminal,
    /// 200 km satellite link, 700 ms budget. Terminal positions are supplied
    /// by the caller.
    pub fn reference(gt_positions: Vec<[f64; 2]>) -> Self {
        let k = gt_positions.len();
        ScenarioConfig {
            data_bits: vec![64.0 * 1024.0 * 8.0; k],
            gt_positions,
            sat_uav_distance: 200e3,
            sat_beam_gain: db_to_linear(25.0),
            sat_wavelength: 10e-3,
            sat_bandwidth: 1e9,
            sat_tx_power: 1.0,
            noise_psd: dbm_per_hz_to_watts_per_hz(-174.0),
            ref_channel_gain: 1.42e-4,
            antenna_gain_const: DEFAULT_ANTENNA_GAIN,
            sidelobe_gain: 0.0,
            comp_energy_coeff: 1e-28,
            cycles_per_overhead: 1.0,
            sat_cpu: 1e9,
            uav_cpu_total: 0.5e9,
            latency_budget: 0.7,
            uav_power_budget: 1.0,
            uav_bandwidth_total: 10e6,
            altitude_range: [50.0, 500.0],
            beamwidth_range: [0.0, FRAC_PI_2],
            lightspeed: SPEED_OF_LIGHT,
            overhead_curves: vec![OverheadCurve::default_curve(); k],
        }
    }

    /// Reference parameters with `num_gts` terminals dropped uniformly in a
    /// 300 m disk.
    pub fn reference_with_seed(num_gts: usize, seed: u64) -> Result<Self> {
        let positions = generate_gt_positions(num_gts, 300.0, seed)?;
        let cfg = Self::reference(positions);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn num_gts(&self) -> usize {
        self.gt_positions.len()
    }

    /// Working half-beamwidth range, clamped away from 0 and π/2.
    pub fn beamwidth_bounds(&self) -> [f64; 2] {
        [
            self.beamwidth_range[0].max(BEAMWIDTH_CLAMP),
            self.beamwidth_range[1].min(FRAC_PI_2 - BEAMWIDTH_CLAMP),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.gt_positions.len();
        if k == 0 {
            return Err(Error::invalid(
                "gt_positions",
                "at least one terminal required",
            ));
        }
        if self.data_bits.len() != k {
            return Err(Error::invalid(
                "data_bits",
                "length must match gt_positions",
            ));
        }
        if self.overhead_curves.len() != k {
            return Err(Error::invalid(
                "overhead_curves",
                "length must match gt_positions",
            ));
        }
        for (i, &d) in self.data_bits.iter().enumerate() {
            positive(&format!("data_bits[{i}]"), d)?;
        }
        for (i, p) in self.gt_positions.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::invalid(
                    format!("gt_positions[{i}]"),
                    "must be finite",
                ));
            }
        }
        positive("sat_uav_distance", self.sat_uav_distance)?;
        positive("sat_beam_gain", self.sat_beam_gain)?;
        positive("sat_wavelength", self.sat_wavelength)?;
        positive("sat_bandwidth", self.sat_bandwidth)?;
        positive("sat_tx_power", self.sat_tx_power)?;
        positive("noise_psd", self.noise_psd)?;
        positive("ref_channel_gain", self.ref_channel_gain)?;
        positive("antenna_gain_const", self.antenna_gain_const)?;
        if !(self.sidelobe_gain.is_finite() && self.sidelobe_gain >= 0.0) {
            return Err(Error::invalid("sidelobe_gain", "must be nonnegative"));
        }
        positive("comp_energy_coeff", self.comp_energy_coeff)?;
        positive("cycles_per_overhead", self.cycles_per_overhead)?;
        positive("sat_cpu", self.sat_cpu)?;
        positive("uav_cpu_total", self.uav_cpu_total)?;
        positive("latency_budget", self.latency_budget)?;
        positive("uav_power_budget", self.uav_power_budget)?;
        positive("uav_bandwidth_total", self.uav_bandwidth_total)?;
        positive("lightspeed", self.lightspeed)?;

        let [h_min, h_max] = self.altitude_range;
        positive("altitude_range", h_min)?;
        if !(h_max.is_finite() && h_min <= h_max) {
            return Err(Error::invalid("altitude_range", "need 0 < min <= max"));
        }
        let [t_min, t_max] = self.beamwidth_bounds();
        if !(t_min.is_finite()
            && t_max.is_finite()
            && 0.0 < t_min
            && t_min < t_max
            && t_max < FRAC_PI_2)
        {
            return Err(Error::invalid(
                "beamwidth_range",
                "need 0 < min < max < pi/2 after clamping",
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ScenarioDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_config()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioDoc::from_config(self)).expect("scenario serializes")
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            "must be finite and strictly positive",
        ))
    }
}

/// On-disk scenario document. Quantities with two spellings accept either,
/// but not both.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    num_gts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    data_bytes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    data_bits: Option<Vec<f64>>,
    gt_positions: Vec<[f64; 2]>,
    sat_uav_distance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sat_beam_gain_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sat_beam_gain: Option<f64>,
    sat_wavelength: f64,
    sat_bandwidth: f64,
    sat_tx_power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise_psd_dbm_per_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise_psd: Option<f64>,
    ref_channel_gain: f64,
    #[serde(default = "default_antenna_gain")]
    antenna_gain_const: f64,
    #[serde(default)]
    sidelobe_gain: f64,
    comp_energy_coeff: f64,
    #[serde(default = "default_cycles")]
    cycles_per_overhead: f64,
    sat_cpu: f64,
    uav_cpu_total: f64,
    latency_budget: f64,
    uav_power_budget: f64,
    uav_bandwidth_total: f64,
    altitude_range: [f64; 2],
    beamwidth_range: [f64; 2],
    #[serde(default = "default_lightspeed")]
    lightspeed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    overhead_curves: Option<Vec<OverheadCurve>>,
}

fn default_antenna_gain() -> f64 {
    DEFAULT_ANTENNA_GAIN
}

fn default_cycles() -> f64 {
    1.0
}

fn default_lightspeed() -> f64 {
    SPEED_OF_LIGHT
}

fn exactly_one<T>(field: &str, a: Option<T>, b: Option<T>) -> Result<Option<(bool, T)>> {
    match (a, b) {
        (Some(_), Some(_)) => Err(Error::invalid(field, "given in two units; pick one")),
        (Some(x), None) => Ok(Some((true, x))),
        (None, Some(x)) => Ok(Some((false, x))),
        (None, None) => Ok(None),
    }
}

impl ScenarioDoc {
    fn into_config(self) -> Result<ScenarioConfig> {
        let k = self.gt_positions.len();
        if let Some(n) = self.num_gts {
            if n != k {
                return Err(Error::invalid(
                    "num_gts",
                    "must equal the number of gt_positions",
                ));
            }
        }
        let data_bits = match exactly_one("data_bits", self.data_bytes, self.data_bits)? {
            Some((true, bytes)) => bytes.into_iter().map(|b| b * 8.0).collect(),
            Some((false, bits)) => bits,
            None => {
                return Err(Error::invalid(
                    "data_bits",
                    "missing (data_bytes or data_bits)",
                ))
            }
        };
        let sat_beam_gain =
            match exactly_one("sat_beam_gain", self.sat_beam_gain_db, self.sat_beam_gain)? {
                Some((true, db)) => db_to_linear(db),
                Some((false, lin)) => lin,
                None => return Err(Error::invalid("sat_beam_gain", "missing")),
            };
        let noise_psd = match exactly_one("noise_psd", self.noise_psd_dbm_per_hz, self.noise_psd)? {
            Some((true, dbm)) => dbm_per_hz_to_watts_per_hz(dbm),
            Some((false, w)) => w,
            None => return Err(Error::invalid("noise_psd", "missing")),
        };
        let overhead_curves = self
            .overhead_curves
            .unwrap_or_else(|| vec![OverheadCurve::default_curve(); k]);

        let cfg = ScenarioConfig {
            data_bits,
            gt_positions: self.gt_positions,
            sat_uav_distance: self.sat_uav_distance,
            sat_beam_gain,
            sat_wavelength: self.sat_wavelength,
            sat_bandwidth: self.sat_bandwidth,
            sat_tx_power: self.sat_tx_power,
            noise_psd,
            ref_channel_gain: self.ref_channel_gain,
            antenna_gain_const: self.antenna_gain_const,
            sidelobe_gain: self.sidelobe_gain,
            comp_energy_coeff: self.comp_energy_coeff,
            cycles_per_overhead: self.cycles_per_overhead,
            sat_cpu: self.sat_cpu,
            uav_cpu_total: self.uav_cpu_total,
            latency_budget: self.latency_budget,
            uav_power_budget: self.uav_power_budget,
            uav_bandwidth_total: self.uav_bandwidth_total,
            altitude_range: self.altitude_range,
            beamwidth_range: self.beamwidth_range,
            lightspeed: self.lightspeed,
            overhead_curves,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_config(cfg: &ScenarioConfig) -> Self {
        ScenarioDoc {
            num_gts: Some(cfg.num_gts()),
            data_bytes: None,
            data_bits: Some(cfg.data_bits.clone()),
            gt_positions: cfg.gt_positions.clone(),
            sat_uav_distance: cfg.sat_uav_distance,
            sat_beam_gain_db: None,
            sat_beam_gain: Some(cfg.sat_beam_gain),
            sat_wavelength: cfg.sat_wavelength,
            sat_bandwidth: cfg.sat_bandwidth,
            sat_tx_power: cfg.sat_tx_power,
            noise_psd_dbm_per_hz: None,
            noise_psd: Some(cfg.noise_psd),
            ref_channel_gain: cfg.ref_channel_gain,
            antenna_gain_const: cfg.antenna_gain_const,
            sidelobe_gain: cfg.sidelobe_gain,
            comp_energy_coeff: cfg.comp_energy_coeff,
            cycles_per_overhead: cfg.cycles_per_overhead,
            sat_cpu: cfg.sat_cpu,
            uav_cpu_total: cfg.uav_cpu_total,
            latency_budget: cfg.latency_budget,
            uav_power_budget: cfg.uav_power_budget,
            uav_bandwidth_total: cfg.uav_bandwidth_total,
            altitude_range: cfg.altitude_range,
            beamwidth_range: cfg.beamwidth_range,
            lightspeed: cfg.lightspeed,
            overhead_curves: Some(cfg.overhead_curves.clone()),
        }
    }
}

/// Terminals dropped uniformly (by area) over a disk of `radius` meters
/// centered at the origin.
pub fn generate_gt_positions(count: usize, radius: f64, seed: u64) -> Result<Vec<[f64; 2]>> {
    if count == 0 {
        return Err(Error::invalid("count", "at least one terminal required"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid("radius", "radius must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let phi = 2.0 * PI * rng.gen::<f64>();
            [r * phi.cos(), r * phi.sin()]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const TABLE_ONE: &str = r#"{
        "num_gts": 4,
        "data_bytes": [65536, 65536, 65536, 65536],
        "gt_positions": [[10, 20], [-100, 50], [0, -200], [150, 150]],
        "sat_uav_distance": 200000,
        "sat_beam_gain_db": 25,
        "sat_wavelength": 0.01,
        "sat_bandwidth": 1e9,
        "sat_tx_power": 1,
        "noise_psd_dbm_per_hz": -174,
        "ref_channel_gain": 1.42e-4,
        "comp_energy_coeff": 1e-28,
        "sat_cpu": 1e9,
        "uav_cpu_total": 5e8,
        "latency_budget": 0.7,
        "uav_power_budget": 1,
        "uav_bandwidth_total": 1e7,
        "altitude_range": [50, 500],
        "beamwidth_range": [0, 1.5707963267948966]
    }"#;

    #[test]
    fn loads_reference_document_with_unit_conversion() {
        let cfg = ScenarioConfig::from_json(TABLE_ONE).unwrap();
        assert_relative_eq!(
            cfg.sat_beam_gain,
            316.227_766_016_837_9,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            cfg.noise_psd,
            3.981_071_705_534_97e-21,
            max_relative = 1e-12
        );
        assert_eq!(cfg.data_bits, vec![524_288.0; 4]);
        assert_eq!(cfg.lightspeed, 2.997_924_58e8);
        assert_eq!(cfg.antenna_gain_const, DEFAULT_ANTENNA_GAIN);
        assert_eq!(cfg.sidelobe_gain, 0.0);
        assert_eq!(cfg.overhead_curves[0], OverheadCurve::default_curve());
    }

    #[test]
    fn beamwidth_is_clamped() {
        let cfg = ScenarioConfig::from_json(TABLE_ONE).unwrap();
        let [lo, hi] = cfg.beamwidth_bounds();
        assert_eq!(lo, 1e-3);
        assert_eq!(hi, FRAC_PI_2 - 1e-3);
        // The raw range survives for serialization.
        assert_eq!(cfg.beamwidth_range[0], 0.0);
    }

    #[test]
    fn equal_boundaries_rejected() {
        let doc = TABLE_ONE.replace(
            r#""altitude_range""#,
            r#""overhead_curves": [
                [{"slope": -1, "intercept": 3, "lower": 0.5}, {"slope": -2, "intercept": 4, "lower": 0.5}],
                [{"slope": -1, "intercept": 3, "lower": 0.5}],
                [{"slope": -1, "intercept": 3, "lower": 0.5}],
                [{"slope": -1, "intercept": 3, "lower": 0.5}]
            ],
            "altitude_range""#,
        );
        let err = ScenarioConfig::from_json(&doc).unwrap_err();
        assert!(
            err.to_string()
                .contains("boundaries not strictly decreasing"),
            "{err}"
        );
    }

    #[test]
    fn both_spellings_rejected() {
        let doc = TABLE_ONE.replace(
            r#""sat_tx_power""#,
            r#""sat_beam_gain": 3.0, "sat_tx_power""#,
        );
        let err = ScenarioConfig::from_json(&doc).unwrap_err();
        assert!(matches!(err, Error::Invalid { ref field, .. } if field == "sat_beam_gain"));
    }

    #[test]
    fn length_mismatch_rejected() {
        let doc = TABLE_ONE.replace("[65536, 65536, 65536, 65536]", "[65536, 65536]");
        let err = ScenarioConfig::from_json(&doc).unwrap_err();
        assert!(matches!(err, Error::Invalid { ref field, .. } if field == "data_bits"));
    }

    #[test]
    fn nonpositive_parameter_rejected() {
        let doc = TABLE_ONE.replace(r#""sat_cpu": 1e9"#, r#""sat_cpu": 0"#);
        let err = ScenarioConfig::from_json(&doc).unwrap_err();
        assert!(matches!(err, Error::Invalid { ref field, .. } if field == "sat_cpu"));
    }

    #[test]
    fn malformed_document_is_parse_error() {
        assert!(matches!(
            ScenarioConfig::from_json("{ nope"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn default_curve_invariants() {
        let c = OverheadCurve::default_curve();
        assert_eq!(c.num_segments(), 3);
        assert_eq!(c.min_ratio(), 0.25);
        assert!(c.has_upward_jumps());
        for d in 0..3 {
            assert!(c.segments()[d].slope < 0.0 && c.segments()[d].intercept > 0.0);
        }
        // Overhead magnitudes in cycles across the domain.
        assert_relative_eq!(c.eval(1.0).unwrap(), 2e6);
        assert_relative_eq!(c.eval(0.25).unwrap(), 4.2e7);
    }

    #[test]
    fn overhead_endpoints_and_domain() {
        let c = OverheadCurve::default_curve();
        let s0 = c.segments()[0];
        assert_eq!(c.eval(1.0).unwrap(), s0.slope + s0.intercept);
        assert!(matches!(c.eval(0.25 - 1e-9), Err(Error::Domain(_))));
        assert!(matches!(c.eval(1.0 + 1e-12), Err(Error::Domain(_))));
        // Interior boundary belongs to the deeper segment, the floor to the last.
        assert_eq!(c.segment_of(0.70).unwrap(), 1);
        assert_eq!(c.segment_of(0.45).unwrap(), 2);
        assert_eq!(c.segment_of(0.25).unwrap(), 2);
        assert_eq!(c.segment_of(0.7000001).unwrap(), 0);
    }

    #[test]
    fn overhead_midpoint_of_second_segment() {
        // Direct scalar evaluation, written out independently of the lookup.
        let c = OverheadCurve::default_curve();
        let rho = 0.5 * (0.70 + 0.45);
        assert_eq!(c.midpoint(1), rho);
        let expected = -4.0e7 * 0.575 + 3.4e7;
        assert_relative_eq!(c.eval(rho).unwrap(), expected, max_relative = 1e-15);
    }

    #[test]
    fn positions_are_deterministic() {
        let a = generate_gt_positions(4, 300.0, 7).unwrap();
        let b = generate_gt_positions(4, 300.0, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p[0].hypot(p[1]) <= 300.0));
    }

    #[test]
    fn zero_radius_rejected() {
        let err = generate_gt_positions(1, 0.0, 1).unwrap_err();
        assert!(err.to_string().contains("radius must be positive"));
    }

    #[test]
    fn positions_are_area_uniform() {
        // Mean distance of an area-uniform draw over a disk is 2R/3.
        let pts = generate_gt_positions(10_000, 300.0, 42).unwrap();
        let mean = pts.iter().map(|p| p[0].hypot(p[1])).sum::<f64>() / pts.len() as f64;
        assert!((mean - 200.0).abs() / 200.0 < 0.02, "mean radius {mean}");
    }

    fn arb_curve() -> impl Strategy<Value = OverheadCurve> {
        (
            1usize..5,
            prop::collection::vec((0.05f64..1.0, 1.0f64..3.0, 0.1f64..2.0), 4),
        )
            .prop_map(|(n, raw)| {
                let mut lower = 1.0;
                let mut mag = 1e6;
                let mut segs = Vec::new();
                for &(frac, grow, lift) in raw.iter().take(n) {
                    lower *= 1.0 - 0.5 * frac;
                    mag *= grow;
                    let upper = if segs.is_empty() {
                        1.0
                    } else {
                        lower / (1.0 - 0.5 * frac)
                    };
                    segs.push(Segment {
                        slope: -mag,
                        intercept: mag * upper + lift * 1e6,
                        lower,
                    });
                }
                OverheadCurve::new(segs).unwrap()
            })
    }

    proptest! {
        #[test]
        fn json_round_trip_is_exact(
            seed in 0u64..1000,
            k in 1usize..6,
            beam_db in 0.0f64..40.0,
            noise_dbm in -180.0f64..-150.0,
            curve in arb_curve(),
        ) {
            let mut cfg = ScenarioConfig::reference(generate_gt_positions(k, 300.0, seed).unwrap());
            cfg.sat_beam_gain = db_to_linear(beam_db);
            cfg.noise_psd = dbm_per_hz_to_watts_per_hz(noise_dbm);
            cfg.overhead_curves = vec![curve; k];
            let once = ScenarioConfig::from_json(&cfg.to_json()).unwrap();
            prop_assert_eq!(&once, &cfg);
            let twice = ScenarioConfig::from_json(&once.to_json()).unwrap();
            prop_assert_eq!(twice, once);
        }

        #[test]
        fn overhead_decreasing_within_segments(curve in arb_curve(), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            for d in 0..curve.num_segments() {
                let (lo, hi) = (curve.lower(d), curve.upper(d));
                // Open lower end: stay strictly inside.
                let a = lo + (hi - lo) * (0.001 + 0.998 * t1.min(t2));
                let b = lo + (hi - lo) * (0.001 + 0.998 * t1.max(t2));
                prop_assert_eq!(curve.segment_of(a).unwrap(), d);
                prop_assert_eq!(curve.segment_of(b).unwrap(), d);
                if b > a {
                    prop_assert!(curve.eval(a).unwrap() > curve.eval(b).unwrap());
                }
            }
        }

        #[test]
        fn segment_lookup_is_exhaustive_and_exclusive(curve in arb_curve(), t in 0.0f64..=1.0) {
            let rho = curve.min_ratio() + (1.0 - curve.min_ratio()) * t;
            let d = curve.segment_of(rho).unwrap();
            let hits = (0..curve.num_segments())
                .filter(|&j| {
                    let last = j + 1 == curve.num_segments();
                    let above_lower = rho > curve.lower(j) || (last && rho == curve.lower(j));
                    above_lower && rho <= curve.upper(j)
                })
                .collect::<Vec<_>>();
            prop_assert_eq!(hits, vec![d]);
            prop_assert!(curve.eval(rho).unwrap() > 0.0);
        }
    }
}
