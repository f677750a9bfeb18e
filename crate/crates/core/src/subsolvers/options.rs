use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration budgets, step sizes and grid resolutions for the block solvers
/// and the outer loop. Missing fields in an options document fall back to
/// the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub dual_max_iters: usize,
    pub dual_step_scale: f64,
    pub dual_tolerance: f64,
    /// Beamwidth grid step in radians.
    pub grid_step_theta: f64,
    /// Points per axis of the location grid.
    pub location_grid_points: usize,
    pub refinement_levels: usize,
    pub kkt_tolerance: f64,
    pub outer_tolerance: f64,
    pub max_outer_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dual_max_iters: 500,
            dual_step_scale: 1.0,
            dual_tolerance: 1e-6,
            grid_step_theta: 1e-3,
            location_grid_points: 201,
            refinement_levels: 1,
            kkt_tolerance: 1e-9,
            outer_tolerance: 1e-4,
            max_outer_iters: 20,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let pos = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    field,
                    "must be finite and strictly positive",
                ))
            }
        };
        pos("dual_step_scale", self.dual_step_scale)?;
        pos("dual_tolerance", self.dual_tolerance)?;
        pos("grid_step_theta", self.grid_step_theta)?;
        pos("kkt_tolerance", self.kkt_tolerance)?;
        pos("outer_tolerance", self.outer_tolerance)?;
        if self.dual_max_iters == 0 {
            return Err(Error::invalid("dual_max_iters", "must be at least 1"));
        }
        if self.location_grid_points < 2 {
            return Err(Error::invalid("location_grid_points", "must be at least 2"));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::invalid("max_outer_iters", "must be at least 1"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let opts: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        opts.validate()?;
        Ok(opts)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_document_keeps_defaults() {
        let opts = SolverOptions::from_json(r#"{"max_outer_iters": 5}"#).unwrap();
        assert_eq!(opts.max_outer_iters, 5);
        assert_eq!(opts.dual_max_iters, 500);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SolverOptions::from_json(r#"{"grid_step_theta": 0}"#).is_err());
        assert!(SolverOptions::from_json(r#"{"location_grid_points": 1}"#).is_err());
        assert!(matches!(
            SolverOptions::from_json(r#"{"bogus": 1}"#),
            Err(Error::Parse(_))
        ));
    }
}
