use super::{dot, LinearOperator};
use crate::error::{Error, Result};

/// Result of [`solve_spd`].
#[derive(Clone, Debug)]
pub struct CgSolution {
    pub x: Vec<f64>,
    /// Final residual `b - A x`, as tracked by the recurrence.
    pub residual: Vec<f64>,
    pub iterations: usize,
    /// Preconditioned relative residual `sqrt(r^t P^{-1} r / b^t P^{-1} b)`.
    pub relative_residual: f64,
}

/// Preconditioned conjugate gradients for `A x = b`.
///
/// `precond` applies `P^{-1}`. Stops once the preconditioned relative
/// residual is at most `tol`; fails after `10 * dim` iterations.
pub fn solve_spd(
    a: &dyn LinearOperator,
    rhs: &[f64],
    precond: &dyn LinearOperator,
    tol: f64,
) -> Result<CgSolution> {
    solve_spd_from(a, rhs, precond, tol, None)
}

/// [`solve_spd`] with an optional initial guess.
pub fn solve_spd_from(
    a: &dyn LinearOperator,
    rhs: &[f64],
    precond: &dyn LinearOperator,
    tol: f64,
    x0: Option<&[f64]>,
) -> Result<CgSolution> {
    let n = a.dim();
    for len in [rhs.len(), precond.dim()] {
        if len != n {
            return Err(Error::DimensionError {
                expected: n,
                actual: len,
            });
        }
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "solver tolerance {tol} must be positive"
        )));
    }
    let mut z = vec![0.0; n];
    precond.apply_into(rhs, &mut z)?;
    let norm_b = dot(rhs, &z).max(0.0).sqrt();
    if norm_b == 0.0 {
        return Ok(CgSolution {
            x: vec![0.0; n],
            residual: rhs.to_vec(),
            iterations: 0,
            relative_residual: 0.0,
        });
    }

    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut q = vec![0.0; n];
    if let Some(x0) = x0 {
        x.copy_from_slice(x0);
        a.apply_into(&x, &mut q)?;
        r.iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= qi);
        precond.apply_into(&r, &mut z)?;
    }
    let mut rz = dot(&r, &z);
    let mut rel = rz.max(0.0).sqrt() / norm_b;
    let mut p = z.clone();
    let cap = 10 * n.max(1);
    let mut it = 0;
    while rel > tol {
        if it >= cap {
            return Err(Error::SolverFailure {
                iterations: it,
                residual: rel,
            });
        }
        a.apply_into(&p, &mut q)?;
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(Error::SolverFailure {
                iterations: it,
                residual: rel,
            });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        precond.apply_into(&r, &mut z)?;
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rel = rz.max(0.0).sqrt() / norm_b;
        it += 1;
    }
    Ok(CgSolution {
        x,
        residual: r,
        iterations: it,
        relative_residual: rel,
    })
}
