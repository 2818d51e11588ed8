//! Matrix-free preconditioned conjugate gradients.
//!
//! The implicit operators assembled in `mechanics` and `thermal` are
//! symmetric positive definite by construction (mass term plus exact
//! adjoint pairs), so plain CG with a Jacobi-style diagonal estimate is
//! sufficient. Reductions run in fixed order; results are independent of
//! the worker count.

use crate::error::{Result, SimError};
use crate::fields::pairwise_sum;

pub struct CgOutcome {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let prods: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
    pairwise_sum(&prods)
}

/// Solves A x = b with `apply` computing y = A x. `x` is used as the
/// initial guess (warm start). `diag` approximates diag(A) for Jacobi
/// preconditioning; entries must be positive.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    diag: &[f64],
    tol_rel: f64,
    max_iter: usize,
    what: &'static str,
) -> Result<CgOutcome> {
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok(CgOutcome {
            iterations: 0,
            residual: 0.0,
        });
    }
    let tol = tol_rel * b_norm;

    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(ax.iter()).map(|(bi, ai)| bi - ai).collect();
    let mut z: Vec<f64> = r.iter().zip(diag.iter()).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt();
    if res <= tol {
        return Ok(CgOutcome {
            iterations: 0,
            residual: res,
        });
    }

    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(SimError::LinearSolveFailure {
                what,
                iterations: it,
                residual: res,
            });
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        res = dot(&r, &r).sqrt();
        if res <= tol {
            return Ok(CgOutcome {
                iterations: it,
                residual: res,
            });
        }
        for k in 0..n {
            z[k] = r[k] / diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(SimError::LinearSolveFailure {
        what,
        iterations: max_iter,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_tridiagonal() {
        // -u'' discretization plus mass; solution recovered to tolerance
        let n = 64;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let left = if i > 0 { x[i - 1] } else { 0.0 };
                let right = if i + 1 < n { x[i + 1] } else { 0.0 };
                y[i] = 2.5 * x[i] - left - right;
            }
        };
        let mut x_true = vec![0.0; n];
        for (i, v) in x_true.iter_mut().enumerate() {
            *v = (i as f64 * 0.3).sin();
        }
        let mut b = vec![0.0; n];
        apply(&x_true, &mut b);
        let mut x = vec![0.0; n];
        let diag = vec![2.5; n];
        let out = conjugate_gradient(apply, &b, &mut x, &diag, 1e-12, 500, "test").unwrap();
        assert!(out.residual <= 1e-10);
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let apply = |x: &[f64], y: &mut [f64]| y.copy_from_slice(x);
        let b = vec![0.0; 8];
        let mut x = vec![1.0; 8];
        let diag = vec![1.0; 8];
        let out = conjugate_gradient(apply, &b, &mut x, &diag, 1e-10, 10, "test").unwrap();
        assert_eq!(out.iterations, 0);
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reports_failure_on_iteration_cap() {
        // badly scaled problem with a 1-iteration cap
        let n = 32;
        let apply = move |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let left = if i > 0 { x[i - 1] } else { 0.0 };
                let right = if i + 1 < n { x[i + 1] } else { 0.0 };
                y[i] = 2.0001 * x[i] - left - right;
            }
        };
        let b = vec![1.0; n];
        let mut x = vec![0.0; n];
        let diag = vec![2.0001; n];
        assert!(matches!(
            conjugate_gradient(apply, &b, &mut x, &diag, 1e-14, 1, "test"),
            Err(SimError::LinearSolveFailure { .. })
        ));
    }
}
