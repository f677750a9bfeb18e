//! Dense bounded-variable primal simplex with Bland's rule.
//!
//! Solves `min c'x  s.t.  A x <= b,  lower <= x <= upper` with finite bounds.
//! Meant for the small ratio subproblem; no sparsity, no presolve.

use std::fmt;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    /// No point satisfies the rows; `row` is the most violated one at the box
    /// center, by `excess` in the row's own units.
    Infeasible {
        row: usize,
        excess: f64,
    },
    BadInput(String),
    IterationLimit,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Infeasible { row, excess } => {
                write!(
                    f,
                    "infeasible; row {row} exceeds its bound by {excess:e} at the box center"
                )
            }
            LpError::BadInput(s) => write!(f, "bad input: {s}"),
            LpError::IterationLimit => f.write_str("pivot limit reached"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    /// `rows x cols`, kept equal to B^{-1} [A I art].
    tab: Vec<Vec<f64>>,
    value: Vec<f64>,
    basis: Vec<usize>,
    status: Vec<Status>,
    upper: Vec<f64>,
    /// Columns allowed to enter the basis.
    eligible: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (i, row) in self.tab.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Runs primal simplex on `cost` until optimal.
    fn optimize(&mut self, cost: &[f64]) -> Result<(), LpError> {
        let n = cost.len();
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(LpError::IterationLimit);
            }
            let d = self.reduced_costs(cost);
            let entering = (0..n).find(|&j| {
                self.eligible[j]
                    && match self.status[j] {
                        Status::AtLower => d[j] < -COST_TOL,
                        Status::AtUpper => d[j] > COST_TOL,
                        Status::Basic => false,
                    }
            });
            let Some(j) = entering else { return Ok(()) };
            // +1 moves the entering variable up from its lower bound.
            let dir = if self.status[j] == Status::AtLower {
                1.0
            } else {
                -1.0
            };

            let mut step = self.upper[j];
            let mut leave: Option<(usize, Status)> = None;
            for i in 0..self.tab.len() {
                let a = dir * self.tab[i][j];
                let b = self.basis[i];
                let (limit, to) = if a > PIVOT_TOL {
                    (self.value[i].max(0.0) / a, Status::AtLower)
                } else if a < -PIVOT_TOL && self.upper[b].is_finite() {
                    (
                        (self.upper[b] - self.value[i]).max(0.0) / -a,
                        Status::AtUpper,
                    )
                } else {
                    continue;
                };
                let better = match leave {
                    None => limit < step,
                    Some((r, _)) => limit < step || (limit == step && b < self.basis[r]),
                };
                if better {
                    step = limit;
                    leave = Some((i, to));
                }
            }
            if step.is_infinite() {
                return Err(LpError::BadInput("unbounded direction".into()));
            }
            self.pivots += 1;
            for i in 0..self.tab.len() {
                self.value[i] -= dir * step * self.tab[i][j];
            }
            match leave {
                None => {
                    self.status[j] = if dir > 0.0 {
                        Status::AtUpper
                    } else {
                        Status::AtLower
                    };
                }
                Some((r, to)) => {
                    let entering_value = if dir > 0.0 {
                        step
                    } else {
                        self.upper[j] - step
                    };
                    let leaving = self.basis[r];
                    self.status[leaving] = to;
                    self.status[j] = Status::Basic;
                    self.basis[r] = j;
                    self.value[r] = entering_value;
                    self.pivot(r, j);
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.tab[r][j];
        for a in self.tab[r].iter_mut() {
            *a /= p;
        }
        let pivot_row = self.tab[r].clone();
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[j];
            if factor != 0.0 {
                for (a, pr) in row.iter_mut().zip(&pivot_row) {
                    *a -= factor * pr;
                }
                row[j] = 0.0;
            }
        }
    }

    fn column_value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::AtLower => 0.0,
            Status::AtUpper => self.upper[j],
            Status::Basic => {
                let r = self
                    .basis
                    .iter()
                    .position(|&b| b == j)
                    .expect("basic column in basis");
                self.value[r]
            }
        }
    }
}

pub fn solve_lp(
    c: &[f64],
    a: &[Vec<f64>],
    b: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = a.len();
    if lower.len() != n || upper.len() != n || b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(LpError::BadInput("dimension mismatch".into()));
    }
    for j in 0..n {
        if !(lower[j].is_finite() && upper[j].is_finite() && lower[j] <= upper[j]) {
            return Err(LpError::BadInput(format!(
                "variable {j} has an invalid box"
            )));
        }
    }
    let all_finite = c
        .iter()
        .chain(b)
        .chain(a.iter().flatten())
        .all(|v| v.is_finite());
    if !all_finite {
        return Err(LpError::BadInput("non-finite coefficient".into()));
    }

    // Shift to y = x - lower and scale every row to unit max coefficient.
    let width: Vec<f64> = (0..n).map(|j| upper[j] - lower[j]).collect();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let shifted = b[i] - a[i].iter().zip(lower).map(|(x, l)| x * l).sum::<f64>();
        let scale = a[i]
            .iter()
            .fold(0.0f64, |s, v| s.max(v.abs()))
            .max(shifted.abs())
            .max(1e-300);
        rows.push(a[i].iter().map(|v| v / scale).collect::<Vec<_>>());
        rhs.push(shifted / scale);
    }
    let c_scale = c.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let c_scaled: Vec<f64> = if c_scale > 0.0 {
        c.iter().map(|v| v / c_scale).collect()
    } else {
        vec![0.0; n]
    };

    // Columns: structural y (n), slacks (m), artificials (one per negative row).
    let negative: Vec<usize> = (0..m).filter(|&i| rhs[i] < 0.0).collect();
    let cols = n + m + negative.len();
    let mut tab = vec![vec![0.0; cols]; m];
    let mut value = vec![0.0; m];
    let mut basis = vec![0; m];
    let mut status = vec![Status::AtLower; cols];
    let mut upper_all = vec![f64::INFINITY; cols];
    upper_all[..n].copy_from_slice(&width);
    for i in 0..m {
        let sign = if rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[i][j] = sign * rows[i][j];
        }
        tab[i][n + i] = sign;
        value[i] = sign * rhs[i];
    }
    for (q, &i) in negative.iter().enumerate() {
        let col = n + m + q;
        tab[i][col] = 1.0;
        basis[i] = col;
        status[col] = Status::Basic;
    }
    for i in 0..m {
        if rhs[i] >= 0.0 {
            basis[i] = n + i;
            status[n + i] = Status::Basic;
        }
    }
    let mut t = Tableau {
        tab,
        value,
        basis,
        status,
        upper: upper_all,
        eligible: vec![true; cols],
        pivots: 0,
    };

    if !negative.is_empty() {
        let mut phase_one = vec![0.0; cols];
        for q in 0..negative.len() {
            phase_one[n + m + q] = 1.0;
        }
        t.optimize(&phase_one)?;
        let residual: f64 = (0..negative.len()).map(|q| t.column_value(n + m + q)).sum();
        if residual > 1e-9 {
            return Err(center_violation(a, b, lower, upper));
        }
        // Artificials are pinned at zero from here on.
        for q in 0..negative.len() {
            let col = n + m + q;
            t.upper[col] = 0.0;
            t.eligible[col] = false;
        }
    }
    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&c_scaled);
    t.optimize(&cost)?;

    let x: Vec<f64> = (0..n)
        .map(|j| (lower[j] + t.column_value(j)).clamp(lower[j], upper[j]))
        .collect();
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution {
        x,
        objective,
        pivots: t.pivots,
    })
}

fn center_violation(a: &[Vec<f64>], b: &[f64], lower: &[f64], upper: &[f64]) -> LpError {
    let center: Vec<f64> = lower
        .iter()
        .zip(upper)
        .map(|(l, u)| 0.5 * (l + u))
        .collect();
    let (row, excess) = a
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().zip(&center).map(|(x, y)| x * y).sum::<f64>() - bi)
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, e)| if e > acc.1 { (i, e) } else { acc },
        );
    LpError::Infeasible { row, excess }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn box_only_goes_to_cheap_corner() {
        let sol = solve_lp(&[1.0, -2.0], &[], &[], &[0.0, 1.0], &[3.0, 4.0]).unwrap();
        assert_eq!(sol.x, vec![0.0, 4.0]);
        assert_eq!(sol.objective, -8.0);
    }

    #[test]
    fn zero_cost_stays_at_lower_corner() {
        let sol = solve_lp(
            &[0.0, 0.0],
            &[vec![1.0, 1.0]],
            &[10.0],
            &[0.2, 0.3],
            &[1.0, 1.0],
        )
        .unwrap();
        assert_eq!(sol.x, vec![0.2, 0.3]);
    }

    #[test]
    fn coupled_constraint_binds() {
        // max x + y  s.t. x + 2y <= 4, 3x + y <= 6, 0 <= x,y <= 10  ->  (1.6, 1.2)
        let sol = solve_lp(
            &[-1.0, -1.0],
            &[vec![1.0, 2.0], vec![3.0, 1.0]],
            &[4.0, 6.0],
            &[0.0, 0.0],
            &[10.0, 10.0],
        )
        .unwrap();
        assert!((sol.x[0] - 1.6).abs() < 1e-12 && (sol.x[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_violation_needs_phase_one() {
        // x + y >= 3 written as -x - y <= -3.
        let sol = solve_lp(
            &[1.0, 2.0],
            &[vec![-1.0, -1.0]],
            &[-3.0],
            &[0.0, 0.0],
            &[2.0, 2.0],
        )
        .unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_reports_worst_row() {
        let err = solve_lp(
            &[1.0, 1.0],
            &[vec![1.0, 0.0], vec![-1.0, -1.0]],
            &[5.0, -10.0],
            &[0.0, 0.0],
            &[1.0, 1.0],
        )
        .unwrap_err();
        assert_eq!(
            err,
            LpError::Infeasible {
                row: 1,
                excess: 9.0
            }
        );
    }

    /// Brute force over all vertices of a 2-variable problem's box/row
    /// arrangement is awkward; a dense scan is enough at this size.
    fn scan(c: &[f64], a: &[Vec<f64>], b: &[f64], lo: &[f64], hi: &[f64]) -> Option<f64> {
        let n = 400;
        let mut best: Option<f64> = None;
        for i in 0..=n {
            for j in 0..=n {
                let x = [
                    lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64,
                ];
                if a.iter()
                    .zip(b)
                    .all(|(r, bi)| r[0] * x[0] + r[1] * x[1] <= bi + 1e-12)
                {
                    let v = c[0] * x[0] + c[1] * x[1];
                    best = Some(best.map_or(v, |bv: f64| bv.min(v)));
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn never_worse_than_scan(
            c in prop::collection::vec(-1.0f64..1.0, 2),
            a in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 0..4),
            b in prop::collection::vec(-0.5f64..1.5, 4),
        ) {
            let b = &b[..a.len()];
            let lo = [0.0, 0.0];
            let hi = [1.0, 1.0];
            match (solve_lp(&c, &a, b, &lo, &hi), scan(&c, &a, b, &lo, &hi)) {
                (Ok(sol), Some(v)) => {
                    prop_assert!(sol.objective <= v + 1e-9);
                    for (row, bi) in a.iter().zip(b) {
                        prop_assert!(row[0] * sol.x[0] + row[1] * sol.x[1] <= bi + 1e-9);
                    }
                }
                (Err(LpError::Infeasible { .. }), None) => {}
                // Thin feasible slivers can escape the scan.
                (Ok(_), None) => {}
                (r, s) => prop_assert!(false, "lp {:?} vs scan {:?}", r, s),
            }
        }
    }
}
