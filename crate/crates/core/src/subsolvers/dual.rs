//! Projected subgradient ascent on Lagrange multipliers with primal recovery.

use super::SolverOptions;

/// A problem `min f(x) s.t. g_j(x) <= 0` whose Lagrangian can be minimized
/// exactly for fixed multipliers.
pub trait DualAdapter {
    type Primal: Clone + PartialEq;

    fn num_constraints(&self) -> usize;

    /// Converts the internal dimensionless multipliers into objective units
    /// per unit of residual.
    fn multiplier_scale(&self) -> f64;

    /// Minimizer of the Lagrangian at multipliers `lambda` (objective units).
    fn minimize_lagrangian(&self, lambda: &[f64]) -> Self::Primal;

    fn objective(&self, x: &Self::Primal) -> f64;

    /// Constraint values `g_j(x)`; feasible when all are `<= feasibility_tol`.
    fn residuals(&self, x: &Self::Primal) -> Vec<f64>;

    fn feasibility_tol(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct DualOutcome<P> {
    /// Best feasible primal iterate, if any iterate was feasible.
    pub best: Option<(P, f64)>,
    /// Primal iterate at the last multipliers.
    pub last: P,
    pub lambda: Vec<f64>,
    /// Largest Lagrangian dual value seen; a lower bound on the optimum.
    pub dual_bound: f64,
    pub iterations: usize,
    /// Stopped because the projected subgradient vanished.
    pub stationary: bool,
}

impl<P> DualOutcome<P> {
    /// Whether the best feasible iterate is provably optimal: its objective
    /// meets the dual bound within `rel_tol`.
    pub fn certified(&self, rel_tol: f64) -> bool {
        match &self.best {
            Some((_, obj)) => {
                obj - self.dual_bound <= rel_tol * obj.abs().max(self.dual_bound.abs()).max(1e-300)
            }
            None => false,
        }
    }
}

/// Runs `xi_t = xi_0 / sqrt(t)` steps along the normalized projected
/// subgradient, starting from zero multipliers.
pub fn dual_subgradient<A: DualAdapter>(
    adapter: &A,
    opts: &SolverOptions,
) -> DualOutcome<A::Primal> {
    let m = adapter.num_constraints();
    let scale = adapter.multiplier_scale();
    let mut mu = vec![0.0; m];
    let mut best: Option<(A::Primal, f64)> = None;
    let mut dual_bound = f64::NEG_INFINITY;
    let mut last;
    let mut t = 0;
    let mut stationary = false;
    loop {
        let lambda: Vec<f64> = mu.iter().map(|u| u * scale).collect();
        let x = adapter.minimize_lagrangian(&lambda);
        let obj = adapter.objective(&x);
        let g = adapter.residuals(&x);
        let lagrangian = obj + lambda.iter().zip(&g).map(|(l, gj)| l * gj).sum::<f64>();
        dual_bound = dual_bound.max(lagrangian);
        if g.iter().all(|&gj| gj <= adapter.feasibility_tol())
            && best.as_ref().map_or(true, |(_, b)| obj < *b)
        {
            best = Some((x.clone(), obj));
        }
        last = x;
        t += 1;

        // Components pushing a zero multiplier negative are projected out.
        let proj: Vec<f64> = mu
            .iter()
            .zip(&g)
            .map(|(&u, &gj)| if u <= 0.0 && gj < 0.0 { 0.0 } else { gj })
            .collect();
        let norm = proj.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < opts.dual_tolerance {
            stationary = true;
            break;
        }
        if t >= opts.dual_max_iters {
            break;
        }
        let step = opts.dual_step_scale / (t as f64).sqrt();
        for (u, v) in mu.iter_mut().zip(&proj) {
            *u = (*u + step * v / norm).max(0.0);
        }
    }
    DualOutcome {
        best,
        last,
        lambda: mu.iter().map(|u| u * scale).collect(),
        dual_bound,
        iterations: t,
        stationary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One scalar constraint with a fixed residual, independent of x.
    struct Constant(f64);

    impl DualAdapter for Constant {
        type Primal = ();
        fn num_constraints(&self) -> usize {
            1
        }
        fn multiplier_scale(&self) -> f64 {
            1.0
        }
        fn minimize_lagrangian(&self, _: &[f64]) {}
        fn objective(&self, _: &()) -> f64 {
            0.0
        }
        fn residuals(&self, _: &()) -> Vec<f64> {
            vec![self.0]
        }
    }

    #[test]
    fn zero_residual_returns_immediately() {
        let out = dual_subgradient(&Constant(0.0), &SolverOptions::default());
        assert_eq!(out.iterations, 1);
        assert!(out.stationary);
        assert_eq!(out.lambda, vec![0.0]);
    }

    #[test]
    fn constant_residual_accumulates_steps() {
        let opts = SolverOptions {
            dual_max_iters: 10,
            dual_step_scale: 0.5,
            ..Default::default()
        };
        let out = dual_subgradient(&Constant(3.0), &opts);
        let expected: f64 = (1..10).map(|t| 0.5 / (t as f64).sqrt()).sum();
        assert!((out.lambda[0] - expected).abs() < 1e-12);
        assert!(out.best.is_none());
        assert!(!out.stationary);
    }

    /// min x^2 - 4x over integers 0..=5 subject to x <= 1.
    struct Integer;

    impl DualAdapter for Integer {
        type Primal = i32;
        fn num_constraints(&self) -> usize {
            1
        }
        fn multiplier_scale(&self) -> f64 {
            1.0
        }
        fn minimize_lagrangian(&self, l: &[f64]) -> i32 {
            (0..=5)
                .min_by(|a, b| {
                    let f = |x: i32| (x * x - 4 * x) as f64 + l[0] * (x - 1) as f64;
                    f(*a).total_cmp(&f(*b))
                })
                .unwrap()
        }
        fn objective(&self, x: &i32) -> f64 {
            (x * x - 4 * x) as f64
        }
        fn residuals(&self, x: &i32) -> Vec<f64> {
            vec![(x - 1) as f64]
        }
    }

    #[test]
    fn recovers_constrained_integer_optimum() {
        let out = dual_subgradient(&Integer, &SolverOptions::default());
        let (x, obj) = out.best.clone().unwrap();
        assert_eq!(x, 1);
        assert_eq!(obj, -3.0);
        assert!(out.dual_bound <= -3.0 + 1e-12);
        assert!(out.certified(1e-2));
    }
}
