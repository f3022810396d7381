//! Quasi-diagonal additive Schwarz preconditioners for piecewise polynomial
//! discretizations of operators of order minus two.
//!
//! The preconditioners act on `P^p(T)` coefficient vectors. For `p = 0` the
//! action is `x -> I D I^t x`, where column `E` of the incidence matrix `I`
//! holds the element-wise divergence of the lowest order Raviart-Thomas
//! function of facet `E` and `D` is diagonal with entries `|E|^{-n/(n-1)}`.
//! Variants add a rank-one term (dual of `H^1`), a diagonal block for mean
//! zero higher order functions, or are the plain diagonal scalings used for
//! comparison.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`]: simplicial meshes in 2, 3 and 4 dimensions, facets, I/O.
//! * [`refine`]: newest vertex bisection, Freudenthal refinement, Dörfler
//!   marking and the corner singularity indicator.
//! * [`assembly`]: sparse matrices and the Gram matrices `M`, `R`, `L`.
//! * [`precond`]: incidence matrices and all preconditioner variants.
//! * [`spectral`]: discrete `H^{-1}` Gram operators, PCG, and extreme
//!   eigenvalue estimation.
//! * [`experiment`]: the refinement loop driving the command line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod error;
pub mod experiment;
pub mod matrix_market;
pub mod mesh;
pub mod precond;
pub mod refine;
pub mod spectral;

pub use error::{Error, Result};
pub use mesh::{Facet, MeshQuality, SimplicialMesh};
