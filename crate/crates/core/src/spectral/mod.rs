//! Discrete dual-norm Gram operators and extreme eigenvalues of
//! preconditioned systems.
//!
//! Everything is written against [`LinearOperator`], so the same routines run
//! on the sparse Gram operator, on preconditioners and on dense test
//! matrices.

mod cg;
mod gram;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use cg::{solve_spd, solve_spd_from, CgSolution};
pub use gram::GramOperator;

use crate::error::{Error, Result};

/// A symmetric linear map on `R^dim`.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()>;

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }
}

/// A preconditioner whose action `P^{-1}` is [`LinearOperator::apply_into`]
/// and which can also apply the matrix `P` itself.
pub trait InvertiblePreconditioner: LinearOperator {
    /// `y = P x`
    fn apply_inverse_into(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

pub(crate) fn check_sizes(dim: usize, x: &[f64], y: &[f64]) -> Result<()> {
    for len in [x.len(), y.len()] {
        if len != dim {
            return Err(Error::DimensionError {
                expected: dim,
                actual: len,
            });
        }
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityOperator(pub usize);

impl LinearOperator for IdentityOperator {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_sizes(self.0, x, y)?;
        y.copy_from_slice(x);
        Ok(())
    }
}

impl InvertiblePreconditioner for IdentityOperator {
    fn apply_inverse_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.apply_into(x, y)
    }
}

/// A dense SPD matrix. As a preconditioner the matrix is the action
/// `P^{-1}`; its inverse is applied through a Cholesky factorization.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
    cholesky: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionError {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let cholesky = matrix.clone().cholesky();
        Ok(DenseOperator { matrix, cholesky })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_sizes(self.dim(), x, y)?;
        let r = &self.matrix * DVector::from_column_slice(x);
        y.copy_from_slice(r.as_slice());
        Ok(())
    }
}

impl InvertiblePreconditioner for DenseOperator {
    fn apply_inverse_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_sizes(self.dim(), x, y)?;
        let chol = self
            .cholesky
            .as_ref()
            .ok_or_else(|| Error::Factorization("dense matrix is not positive definite".into()))?;
        let r = chol.solve(&DVector::from_column_slice(x));
        y.copy_from_slice(r.as_slice());
        Ok(())
    }
}

/// Dense matrix of an operator, column by column.
pub fn materialize(op: &dyn LinearOperator) -> Result<DMatrix<f64>> {
    let n = op.dim();
    let mut out = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_into(&e, &mut col)?;
        out.column_mut(j).copy_from_slice(&col);
        e[j] = 0.0;
    }
    Ok(out)
}

/// Dense matrix `P` of a preconditioner (the inverse of its action).
pub fn materialize_inverse(op: &dyn InvertiblePreconditioner) -> Result<DMatrix<f64>> {
    let n = op.dim();
    let mut out = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_inverse_into(&e, &mut col)?;
        out.column_mut(j).copy_from_slice(&col);
        e[j] = 0.0;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct EigOptions {
    /// Relative change of the Rayleigh quotient between sweeps.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Relative residual of the inner solves in inverse iteration.
    pub inner_tol: f64,
    /// Start vector; random from `seed` when absent.
    pub start: Option<Vec<f64>>,
}

impl Default for EigOptions {
    fn default() -> Self {
        EigOptions {
            tol: 1e-6,
            max_iter: 2000,
            seed: 0,
            inner_tol: 1e-10,
            start: None,
        }
    }
}

/// Extreme eigenvalues of `P^{-1} A`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// `lambda_max / lambda_min`
    pub kappa: f64,
    pub iterations_max: usize,
    pub iterations_min: usize,
    /// `||P^{-1} A x - lambda x|| / ||P^{-1} A x||` at the last iterate.
    pub residual_max: f64,
    /// `||A x - lambda P x|| / ||A x||` at the last iterate.
    pub residual_min: f64,
    pub converged: bool,
}

struct Sweep {
    lambda: f64,
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn start_vector(n: usize, opts: &EigOptions) -> Result<Vec<f64>> {
    let x = match &opts.start {
        Some(s) if s.len() != n => {
            return Err(Error::DimensionError {
                expected: n,
                actual: s.len(),
            })
        }
        Some(s) => s.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
        }
    };
    let nx = norm(&x);
    if !(nx > 0.0 && nx.is_finite()) {
        return Err(Error::InvalidConfig(
            "start vector must be nonzero and finite".into(),
        ));
    }
    Ok(x.into_iter().map(|v| v / nx).collect())
}

fn positive(q: f64) -> Result<f64> {
    if q > 0.0 && q.is_finite() {
        Ok(q)
    } else {
        Err(Error::NotPositiveDefinite(q))
    }
}

/// Power iteration on `x -> P^{-1} A x` with the Rayleigh quotient in the
/// `A` inner product, `(Ax)^t P^{-1} (Ax) / x^t A x`.
fn power_iteration(
    a: &dyn LinearOperator,
    p: &dyn LinearOperator,
    mut x: Vec<f64>,
    opts: &EigOptions,
) -> Result<Sweep> {
    let n = a.dim();
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut lambda = f64::NAN;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        a.apply_into(&x, &mut y)?;
        let xy = positive(dot(&x, &y))?;
        p.apply_into(&y, &mut z)?;
        let next = positive(dot(&y, &z) / xy)?;
        let nz = norm(&z);
        residual = z
            .iter()
            .zip(&x)
            .map(|(zi, xi)| (zi - next * xi).powi(2))
            .sum::<f64>()
            .sqrt()
            / nz;
        let done = (next - lambda).abs() <= opts.tol * next;
        lambda = next;
        if done {
            return Ok(Sweep {
                lambda,
                iterations: it,
                residual,
                converged: true,
            });
        }
        x.iter_mut().zip(&z).for_each(|(xi, zi)| *xi = zi / nz);
    }
    Ok(Sweep {
        lambda,
        iterations: opts.max_iter,
        residual,
        converged: false,
    })
}

/// Inverse iteration: each sweep solves `A z = P x` by PCG.
fn inverse_iteration(
    a: &dyn LinearOperator,
    p: &dyn InvertiblePreconditioner,
    inner: &dyn LinearOperator,
    mut x: Vec<f64>,
    opts: &EigOptions,
) -> Result<Sweep> {
    let n = a.dim();
    let mut ax = a.apply(&x)?;
    let mut u = vec![0.0; n];
    let mut lambda = f64::NAN;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        p.apply_inverse_into(&x, &mut u)?;
        let xu = positive(dot(&x, &u))?;
        let next = positive(dot(&x, &ax) / xu)?;
        residual = ax
            .iter()
            .zip(&u)
            .map(|(ai, ui)| (ai - next * ui).powi(2))
            .sum::<f64>()
            .sqrt()
            / norm(&ax);
        let done = (next - lambda).abs() <= opts.tol * next;
        lambda = next;
        if done {
            return Ok(Sweep {
                lambda,
                iterations: it,
                residual,
                converged: true,
            });
        }
        let guess: Vec<f64> = x.iter().map(|v| v / lambda).collect();
        let sol = solve_spd_from(a, &u, inner, opts.inner_tol, Some(&guess))?;
        let nz = norm(&sol.x);
        // A z = u - r, so A x follows without another application
        for i in 0..n {
            x[i] = sol.x[i] / nz;
            ax[i] = (u[i] - sol.residual[i]) / nz;
        }
    }
    Ok(Sweep {
        lambda,
        iterations: opts.max_iter,
        residual,
        converged: false,
    })
}

/// Largest and smallest eigenvalue of `P^{-1} A` by power and inverse
/// iteration.
///
/// `inner` preconditions the solves of inverse iteration and defaults to `p`.
/// On non-convergence the estimates are returned inside
/// [`Error::EigsNotConverged`].
pub fn extreme_eigs(
    a: &dyn LinearOperator,
    p: &dyn InvertiblePreconditioner,
    opts: &EigOptions,
    inner: Option<&dyn LinearOperator>,
) -> Result<SpectralReport> {
    let n = a.dim();
    if p.dim() != n {
        return Err(Error::DimensionError {
            expected: n,
            actual: p.dim(),
        });
    }
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    if opts.max_iter == 0 || !(opts.tol > 0.0) || !(opts.inner_tol > 0.0) {
        return Err(Error::InvalidConfig(
            "eigenvalue tolerances and iteration cap must be positive".into(),
        ));
    }
    let x0 = start_vector(n, opts)?;
    let hi = power_iteration(a, p, x0.clone(), opts)?;
    let inner: &dyn LinearOperator = match inner {
        Some(op) => op,
        None => p,
    };
    let lo = inverse_iteration(a, p, inner, x0, opts)?;
    // both are Rayleigh quotients, so each bounds the other's extreme
    let lambda_max = hi.lambda.max(lo.lambda);
    let lambda_min = lo.lambda.min(hi.lambda);
    let report = SpectralReport {
        lambda_max,
        lambda_min,
        kappa: lambda_max / lambda_min,
        iterations_max: hi.iterations,
        iterations_min: lo.iterations,
        residual_max: hi.residual,
        residual_min: lo.residual,
        converged: hi.converged && lo.converged,
    };
    if report.converged {
        Ok(report)
    } else {
        Err(Error::EigsNotConverged(Box::new(report)))
    }
}

/// Condition number of `P^{-1} A` from dense generalized eigenvalues of
/// `(A, P)`, with `P` given as the matrix of the preconditioner's action
/// inverted.
pub fn dense_generalized_kappa(a: &DMatrix<f64>, p_action: &DMatrix<f64>) -> Result<(f64, f64)> {
    // P^{-1} = S S^t, eigenvalues of S^t A S
    let chol = p_action.clone().cholesky().ok_or_else(|| {
        Error::Factorization("preconditioner action is not positive definite".into())
    })?;
    let s = chol.l();
    let m = s.transpose() * a * &s;
    let m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen().eigenvalues;
    Ok((eig.min(), eig.max()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> DenseOperator {
        DenseOperator::new(DMatrix::from_diagonal(&DVector::from_column_slice(v))).unwrap()
    }

    fn random_spd(n: usize, rng: &mut ChaCha8Rng, shift: f64) -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &g * g.transpose() + DMatrix::identity(n, n) * shift
    }

    #[test]
    fn diagonal_with_identity() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let opts = EigOptions {
            tol: 1e-12,
            ..EigOptions::default()
        };
        let r = extreme_eigs(&a, &IdentityOperator(3), &opts, None).unwrap();
        assert!((r.lambda_max - 3.0).abs() < 1e-6);
        assert!((r.lambda_min - 1.0).abs() < 1e-6);
        assert!((r.kappa - 3.0).abs() < 1e-5);
        assert_eq!(r.kappa, r.lambda_max / r.lambda_min);
    }

    #[test]
    fn self_preconditioning_gives_unit_kappa() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_spd(12, &mut rng, 0.5);
        let ainv = a.clone().try_inverse().unwrap();
        let aop = DenseOperator::new(a).unwrap();
        let p = DenseOperator::new(ainv).unwrap();
        let r = extreme_eigs(&aop, &p, &EigOptions::default(), None).unwrap();
        assert!((r.kappa - 1.0).abs() < 1e-6);
        assert!(r.iterations_max <= 3);
    }

    #[test]
    fn random_pairs_match_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [5, 12, 20, 30] {
            let a = random_spd(n, &mut rng, 1.0);
            let pa = random_spd(n, &mut rng, 1.0);
            let (lo, hi) = dense_generalized_kappa(&a, &pa).unwrap();
            let opts = EigOptions {
                tol: 1e-10,
                max_iter: 20_000,
                seed: n as u64,
                ..EigOptions::default()
            };
            let r = extreme_eigs(
                &DenseOperator::new(a).unwrap(),
                &DenseOperator::new(pa).unwrap(),
                &opts,
                None,
            )
            .unwrap();
            let exact = hi / lo;
            assert!(
                (r.kappa - exact).abs() < 5e-3 * exact,
                "{n}: {} vs {exact}",
                r.kappa
            );
            assert!(r.kappa >= 1.0);
        }
    }

    #[test]
    fn non_convergence_carries_estimates() {
        let a = diag(&[1.0, 1.001, 1.002, 5.0, 5.001]);
        let opts = EigOptions {
            tol: 1e-15,
            max_iter: 3,
            ..EigOptions::default()
        };
        match extreme_eigs(&a, &IdentityOperator(5), &opts, None) {
            Err(Error::EigsNotConverged(r)) => {
                assert!(!r.converged);
                assert!(r.lambda_max > 1.0 && r.lambda_min > 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn indefinite_operator_is_rejected() {
        let a = diag(&[1.0, -2.0]);
        let opts = EigOptions {
            start: Some(vec![0.0, 1.0]),
            ..EigOptions::default()
        };
        assert!(matches!(
            extreme_eigs(&a, &IdentityOperator(2), &opts, None),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn same_seed_same_report() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = DenseOperator::new(random_spd(10, &mut rng, 0.1)).unwrap();
        let opts = EigOptions::default();
        let r1 = extreme_eigs(&a, &IdentityOperator(10), &opts, None).unwrap();
        let r2 = extreme_eigs(&a, &IdentityOperator(10), &opts, None).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn materialize_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_spd(6, &mut rng, 1.0);
        let op = DenseOperator::new(m.clone()).unwrap();
        assert_eq!(materialize(&op).unwrap(), m);
        let inv = materialize_inverse(&op).unwrap();
        assert!((inv * &m - DMatrix::identity(6, 6)).abs().max() < 1e-10);
    }
}
