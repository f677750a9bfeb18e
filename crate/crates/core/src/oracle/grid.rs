//! Exhaustive search over rectangular grids.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(lower: f64, upper: f64, points: usize) -> Result<Axis> {
        if points < 2 {
            return Err(Error::invalid(
                "points",
                "need at least two points per dimension",
            ));
        }
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::invalid(
                "bounds",
                format!("need finite lower < upper, got [{lower}, {upper}]"),
            ));
        }
        Ok(Axis {
            lower,
            upper,
            points,
        })
    }

    pub fn step(&self) -> f64 {
        (self.upper - self.lower) / (self.points - 1) as f64
    }

    /// The `i`-th point; the last one is `upper` exactly.
    pub fn at(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.upper
        } else {
            self.lower + i as f64 * self.step()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    /// Human-readable description of which points count as admissible.
    pub filter: String,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>, filter: impl Into<String>) -> GridSpec {
        GridSpec {
            axes,
            filter: filter.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMin {
    pub point: Vec<f64>,
    pub value: f64,
    /// Per-axis index of the minimizer.
    pub index: Vec<usize>,
    pub admissible: usize,
}

/// Minimum of `f` over the grid, where `f` returns `None` off the admissible
/// set. Ties keep the lowest index in row-major order (last axis fastest).
pub fn grid_minimize<F>(spec: &GridSpec, mut f: F) -> Result<GridMin>
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let n = spec.axes.len();
    let mut idx = vec![0usize; n];
    let mut point: Vec<f64> = spec.axes.iter().map(|a| a.at(0)).collect();
    let mut best: Option<GridMin> = None;
    let mut admissible = 0;
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    loop {
        if let Some(v) = f(&point) {
            admissible += 1;
            if best.as_ref().map_or(true, |b| v < b.value) {
                best = Some(GridMin {
                    point: point.clone(),
                    value: v,
                    index: idx.clone(),
                    admissible: 0,
                });
            }
        }
        let mut d = n;
        loop {
            if d == 0 {
                let mut b = best.ok_or(Error::EmptyGrid)?;
                b.admissible = admissible;
                return Ok(b);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < spec.axes[d].points {
                point[d] = spec.axes[d].at(idx[d]);
                break;
            }
            idx[d] = 0;
            point[d] = spec.axes[d].at(0);
        }
    }
}

/// Grid search followed by `rounds` refinements. Each refinement grids the
/// box of half the previous width centred on the incumbent (clipped to the
/// original box) with `zoom_points` per axis. Halving rather than shrinking
/// to a few cells lets the incumbent travel along constraint boundaries.
pub fn grid_minimize_zoom<F>(
    spec: &GridSpec,
    rounds: usize,
    zoom_points: usize,
    mut f: F,
) -> Result<GridMin>
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let mut best = grid_minimize(spec, &mut f)?;
    let mut width: Vec<f64> = spec.axes.iter().map(|a| a.upper - a.lower).collect();
    for _ in 0..rounds {
        let mut axes = Vec::with_capacity(width.len());
        for (i, w) in width.iter_mut().enumerate() {
            let orig = spec.axes[i];
            *w *= 0.5;
            let lo = (best.point[i] - 0.5 * *w).max(orig.lower);
            let hi = (best.point[i] + 0.5 * *w).min(orig.upper);
            if !(lo < hi) {
                return Ok(best);
            }
            axes.push(Axis::new(lo, hi, zoom_points)?);
        }
        let next = match grid_minimize(&GridSpec::new(axes, spec.filter.clone()), &mut f) {
            Ok(next) => next,
            Err(Error::EmptyGrid) => continue,
            Err(e) => return Err(e),
        };
        if next.value <= best.value {
            best = next;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_center() {
        let spec = GridSpec::new(vec![Axis::new(-1.0, 1.0, 21).unwrap()], "all");
        let m = grid_minimize(&spec, |x| Some((x[0] - 0.0).powi(2))).unwrap();
        assert_eq!(m.index, vec![10]);
        assert!(m.point[0].abs() < 1e-15);
        assert_eq!(m.admissible, 21);
    }

    #[test]
    fn empty_filter() {
        let spec = GridSpec::new(vec![Axis::new(0.0, 1.0, 5).unwrap()], "none");
        assert!(matches!(
            grid_minimize(&spec, |_| None),
            Err(Error::EmptyGrid)
        ));
    }

    #[test]
    fn ties_keep_lowest_index() {
        let spec = GridSpec::new(
            vec![
                Axis::new(0.0, 1.0, 3).unwrap(),
                Axis::new(0.0, 1.0, 3).unwrap(),
            ],
            "all",
        );
        let m = grid_minimize(&spec, |_| Some(1.0)).unwrap();
        assert_eq!(m.index, vec![0, 0]);
    }

    #[test]
    fn bad_axes() {
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        assert!(Axis::new(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn zoom_finds_off_grid_corner() {
        // x + y subject to x + 2y >= 1 has its minimum at (0, 0.5), off the 42-point grid.
        let spec = GridSpec::new(
            vec![
                Axis::new(0.0, 1.0, 42).unwrap(),
                Axis::new(0.0, 1.0, 42).unwrap(),
            ],
            "x+2y>=1",
        );
        let m = grid_minimize_zoom(&spec, 40, 21, |p| {
            (p[0] + 2.0 * p[1] >= 1.0).then_some(p[0] + p[1])
        })
        .unwrap();
        assert!((m.value - 0.5).abs() < 1e-9, "{m:?}");
    }
}
