//! Quasi-diagonal preconditioners and the diagonal scalings they are
//! compared against.
//!
//! A [`Preconditioner`] applies the action `P^{-1}`:
//!
//! | kind | action |
//! |------|--------|
//! | `QuasiDiag` | `I D I^t` |
//! | `QuasiDiagTilde` | `alpha 1 1^t + I~ D~ I~^t` (interior facets) |
//! | `QuasiDiagHigherOrder` | `blockdiag(I D I^t, D^(1))` |
//! | `QuasiDiagTildeHigherOrder` | `blockdiag(alpha 1 1^t + I~ D~ I~^t, D^(1))` |
//! | `DiagC` | `C^{-1}` |
//! | `DiagC1` | `blockdiag(C^{-1}, D^(1))` |
//!
//! The matrix `P` itself, needed for inverse iteration, is applied through a
//! sparse Cholesky factorization of `I D I^t` built on first use.

mod incidence;

use std::sync::OnceLock;

use nalgebra::DMatrix;

pub use incidence::{build_c, build_d, build_dp, build_incidence, IncidenceMatrix};

use crate::assembly::{poly_dim, BasisSet, CsrMatrix, Space, SparseCholesky, SparseSymMatrix};
use crate::error::{Error, Result};
use crate::mesh::SimplicialMesh;
use crate::spectral::{check_sizes, materialize, InvertiblePreconditioner, LinearOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PreconditionerKind {
    QuasiDiag,
    QuasiDiagTilde,
    QuasiDiagHigherOrder,
    QuasiDiagTildeHigherOrder,
    DiagC,
    DiagC1,
}

impl PreconditionerKind {
    /// The quasi-diagonal variant for a dual space and polynomial degree.
    pub fn quasi_diag(space: Space, degree: usize) -> Result<Self> {
        Ok(match (space, check_degree(degree)?) {
            (Space::Hm1, 0) => Self::QuasiDiag,
            (Space::Hm1, _) => Self::QuasiDiagHigherOrder,
            (Space::TildeHm1, 0) => Self::QuasiDiagTilde,
            (Space::TildeHm1, _) => Self::QuasiDiagTildeHigherOrder,
        })
    }

    /// The diagonal comparison scaling for a polynomial degree.
    pub fn diagonal(degree: usize) -> Result<Self> {
        Ok(match check_degree(degree)? {
            0 => Self::DiagC,
            _ => Self::DiagC1,
        })
    }

    pub fn degree(self) -> usize {
        match self {
            Self::QuasiDiag | Self::QuasiDiagTilde | Self::DiagC => 0,
            _ => 1,
        }
    }

    pub fn is_tilde(self) -> bool {
        matches!(self, Self::QuasiDiagTilde | Self::QuasiDiagTildeHigherOrder)
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, Self::DiagC | Self::DiagC1)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::QuasiDiag => "quasidiag",
            Self::QuasiDiagTilde => "quasidiag-tilde",
            Self::QuasiDiagHigherOrder => "quasidiag-p1",
            Self::QuasiDiagTildeHigherOrder => "quasidiag-tilde-p1",
            Self::DiagC => "diag-c",
            Self::DiagC1 => "diag-c1",
        }
    }
}

fn check_degree(degree: usize) -> Result<usize> {
    if degree > 1 {
        return Err(Error::InvalidConfig(format!(
            "polynomial degree {degree} not supported (expected 0 or 1)"
        )));
    }
    Ok(degree)
}

/// Block acting on the element constants.
#[derive(Debug)]
enum P0Block {
    Quasi {
        incidence: Box<IncidenceMatrix>,
        d: Vec<f64>,
        /// Rank-one weight and element volumes for the tilde variants.
        tilde: Option<(f64, Vec<f64>)>,
    },
    Diagonal(Vec<f64>),
}

/// Factorization used to apply `P`.
#[derive(Debug)]
struct InverseFactor {
    /// `I D I^t`, with row and column 0 removed for the tilde variants.
    cholesky: SparseCholesky,
}

#[derive(Debug)]
pub struct Preconditioner {
    kind: PreconditionerKind,
    num_elements: usize,
    block: P0Block,
    dp: Vec<f64>,
    factor: OnceLock<std::result::Result<InverseFactor, String>>,
}

impl Preconditioner {
    /// `alpha` is used by the tilde variants only.
    pub fn new(mesh: &SimplicialMesh, kind: PreconditionerKind, alpha: f64) -> Result<Self> {
        let basis = BasisSet::new(mesh, kind.degree())?;
        let block = if kind.is_diagonal() {
            P0Block::Diagonal(build_c(mesh))
        } else {
            let incidence = build_incidence(mesh, !kind.is_tilde());
            let d = build_d(mesh, incidence.facets());
            let tilde = if kind.is_tilde() {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "alpha = {alpha} must be positive"
                    )));
                }
                Some((alpha, mesh.volumes().to_vec()))
            } else {
                None
            };
            P0Block::Quasi {
                incidence: Box::new(incidence),
                d,
                tilde,
            }
        };
        Ok(Preconditioner {
            kind,
            num_elements: mesh.num_elements(),
            block,
            dp: build_dp(mesh, &basis),
            factor: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> PreconditionerKind {
        self.kind
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn incidence(&self) -> Option<&IncidenceMatrix> {
        match &self.block {
            P0Block::Quasi { incidence, .. } => Some(incidence.as_ref()),
            P0Block::Diagonal(_) => None,
        }
    }

    /// Diagonal `D` (or `D~`) in column order of [`Self::incidence`].
    pub fn d(&self) -> Option<&[f64]> {
        match &self.block {
            P0Block::Quasi { d, .. } => Some(d),
            P0Block::Diagonal(_) => None,
        }
    }

    /// Diagonal `C` of the comparison scalings.
    pub fn c(&self) -> Option<&[f64]> {
        match &self.block {
            P0Block::Diagonal(c) => Some(c),
            P0Block::Quasi { .. } => None,
        }
    }

    /// `D^(p)`, empty for `p = 0`.
    pub fn dp(&self) -> &[f64] {
        &self.dp
    }

    pub fn alpha(&self) -> Option<f64> {
        match &self.block {
            P0Block::Quasi {
                tilde: Some((a, _)),
                ..
            } => Some(*a),
            _ => None,
        }
    }

    /// Sparse `I D I^t` (without the rank-one term).
    pub fn p0_gram(&self) -> Option<SparseSymMatrix> {
        match &self.block {
            P0Block::Quasi { incidence, d, .. } => Some(incidence.gram(d)),
            P0Block::Diagonal(_) => None,
        }
    }

    /// `P^{-1}` as a dense matrix.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        materialize(self)
    }

    fn inverse_factor(&self) -> Result<&InverseFactor> {
        let cell = self.factor.get_or_init(|| {
            let P0Block::Quasi {
                incidence,
                d,
                tilde,
            } = &self.block
            else {
                unreachable!("diagonal blocks are inverted directly")
            };
            let gram = incidence.gram(d);
            let gram = if tilde.is_some() {
                drop_first(&gram)
            } else {
                gram
            };
            SparseCholesky::factor(&gram)
                .map(|cholesky| InverseFactor { cholesky })
                .map_err(|e| e.to_string())
        });
        cell.as_ref().map_err(|e| Error::Factorization(e.clone()))
    }

    fn apply_p0_inverse(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        match &self.block {
            P0Block::Diagonal(c) => {
                y.iter_mut()
                    .zip(x.iter().zip(c))
                    .for_each(|(yi, (xi, ci))| *yi = xi * ci);
            }
            P0Block::Quasi { tilde: None, .. } => {
                y.copy_from_slice(x);
                self.inverse_factor()?.cholesky.solve_in_place(y);
            }
            P0Block::Quasi {
                tilde: Some((alpha, m)),
                ..
            } => {
                // the kernel of I~ D~ I~^t is spanned by the volumes m
                let total: f64 = m.iter().sum();
                let s = dot(m, x) / (alpha * total);
                let mut reduced: Vec<f64> = x[1..].iter().map(|v| v - alpha * s).collect();
                self.inverse_factor()?.cholesky.solve_in_place(&mut reduced);
                y[0] = 0.0;
                y[1..].copy_from_slice(&reduced);
                let t = (s - y.iter().sum::<f64>()) / total;
                y.iter_mut().zip(m).for_each(|(yi, mi)| *yi += t * mi);
            }
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn drop_first(a: &SparseSymMatrix) -> SparseSymMatrix {
    let n = a.dim();
    let t: Vec<_> = a
        .csr()
        .triplets()
        .filter(|&(i, j, _)| i > 0 && j > 0)
        .map(|(i, j, v)| (i - 1, j - 1, v))
        .collect();
    SparseSymMatrix::new(CsrMatrix::from_triplets(
        n.saturating_sub(1),
        n.saturating_sub(1),
        &t,
    ))
    .expect("principal submatrix of a symmetric matrix")
}

impl LinearOperator for Preconditioner {
    fn dim(&self) -> usize {
        self.num_elements + self.dp.len()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_sizes(self.dim(), x, y)?;
        let ne = self.num_elements;
        let (x0, x1) = x.split_at(ne);
        let (y0, y1) = y.split_at_mut(ne);
        match &self.block {
            P0Block::Diagonal(c) => {
                y0.iter_mut()
                    .zip(x0.iter().zip(c))
                    .for_each(|(yi, (xi, ci))| *yi = xi / ci);
            }
            P0Block::Quasi {
                incidence,
                d,
                tilde,
            } => {
                let mut t = incidence.transpose().mul_vec(x0);
                t.iter_mut().zip(d).for_each(|(ti, di)| *ti *= di);
                incidence.matrix().mul_vec_into(&t, y0);
                if let Some((alpha, _)) = tilde {
                    let s = alpha * x0.iter().sum::<f64>();
                    y0.iter_mut().for_each(|v| *v += s);
                }
            }
        }
        y1.iter_mut()
            .zip(x1.iter().zip(&self.dp))
            .for_each(|(yi, (xi, di))| *yi = di * xi);
        Ok(())
    }
}

impl InvertiblePreconditioner for Preconditioner {
    fn apply_inverse_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_sizes(self.dim(), x, y)?;
        let ne = self.num_elements;
        self.apply_p0_inverse(&x[..ne], &mut y[..ne])?;
        for ((yi, xi), di) in y[ne..].iter_mut().zip(&x[ne..]).zip(&self.dp) {
            *yi = xi / di;
        }
        Ok(())
    }
}

/// Number of unknowns of `P^p` on `mesh`.
pub fn num_dofs(mesh: &SimplicialMesh, degree: usize) -> usize {
    poly_dim(mesh.dim(), degree) * mesh.num_elements()
}
