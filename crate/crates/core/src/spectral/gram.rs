use super::LinearOperator;
use crate::assembly::{
    assemble_l, assemble_m, assemble_r_on, BasisSet, CsrMatrix, P1Space, Space, SparseCholesky,
    SparseSymMatrix,
};
use crate::error::{Error, Result};
use crate::mesh::SimplicialMesh;

/// `A = M^t R^{-1} M + beta L` on `P^p(T)`.
///
/// For [`Space::Hm1`] `R` is the stiffness matrix on P1 functions vanishing
/// on the boundary; for [`Space::TildeHm1`] it is stiffness plus mass on all
/// of P1. `R` is factorized once on construction.
#[derive(Debug)]
pub struct GramOperator {
    space: Space,
    basis: BasisSet,
    beta: f64,
    m: CsrMatrix,
    r: SparseSymMatrix,
    r_factor: SparseCholesky,
    l: SparseSymMatrix,
}

impl GramOperator {
    pub fn new(mesh: &SimplicialMesh, degree: usize, space: Space, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "beta = {beta} must be positive"
            )));
        }
        let basis = BasisSet::new(mesh, degree)?;
        let p1 = P1Space::new(mesh, space.boundary_condition());
        let m = assemble_m(mesh, &basis, &p1);
        let r = assemble_r_on(mesh, &p1);
        let r_factor = SparseCholesky::factor(&r)?;
        let l = assemble_l(mesh, &basis);
        Ok(GramOperator {
            space,
            basis,
            beta,
            m,
            r,
            r_factor,
            l,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn m(&self) -> &CsrMatrix {
        &self.m
    }

    pub fn r(&self) -> &SparseSymMatrix {
        &self.r
    }

    pub fn l(&self) -> &SparseSymMatrix {
        &self.l
    }

    /// Number of P1 unknowns in `R`.
    pub fn num_p1_dofs(&self) -> usize {
        self.r.dim()
    }
}

impl LinearOperator for GramOperator {
    fn dim(&self) -> usize {
        self.basis.num_dofs()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        super::check_sizes(self.dim(), x, y)?;
        self.l.mul_vec_into(x, y);
        y.iter_mut().for_each(|v| *v *= self.beta);
        if self.r.dim() > 0 {
            let mut u = self.m.mul_vec(x);
            self.r_factor.solve_in_place(&mut u);
            for (j, uj) in u.iter().enumerate() {
                for (col, v) in self.m.row(j) {
                    y[col] += v * uj;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::initial_mesh;
    use crate::refine::uniform_refine;
    use crate::spectral::materialize;
    use nalgebra::DMatrix;

    fn dense_oracle(op: &GramOperator) -> DMatrix<f64> {
        let m = op.m().to_dense();
        let r = op.r().to_dense();
        let rinv = r.try_inverse().unwrap();
        m.transpose() * rinv * m + op.l().to_dense() * op.beta()
    }

    #[test]
    fn zero_maps_to_zero() {
        let op = GramOperator::new(&initial_mesh(2).unwrap(), 1, Space::Hm1, 0.1).unwrap();
        assert!(op
            .apply(&vec![0.0; op.dim()])
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn matches_dense_oracle() {
        for (dim, degree, space) in [
            (2, 0, Space::Hm1),
            (2, 1, Space::TildeHm1),
            (3, 0, Space::TildeHm1),
            (3, 1, Space::Hm1),
        ] {
            let mut mesh = initial_mesh(dim).unwrap();
            if dim == 2 {
                mesh = uniform_refine(&mesh).unwrap();
            }
            assert!(mesh.num_vertices() <= 40);
            let op = GramOperator::new(&mesh, degree, space, 0.1).unwrap();
            let a = materialize(&op).unwrap();
            let oracle = dense_oracle(&op);
            let err = (&a - &oracle).abs().max() / oracle.abs().max();
            assert!(err < 1e-10, "{dim} {degree} {space:?}: {err}");
        }
    }

    #[test]
    fn empty_dirichlet_space_reduces_to_beta_l() {
        let tri =
            SimplicialMesh::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0], vec![0, 1, 2]).unwrap();
        let op = GramOperator::new(&tri, 1, Space::Hm1, 0.25).unwrap();
        assert_eq!(op.num_p1_dofs(), 0);
        let a = materialize(&op).unwrap();
        assert_eq!(a, op.l().to_dense() * 0.25);
    }

    #[test]
    fn operator_is_symmetric_positive_definite() {
        let mesh = uniform_refine(&initial_mesh(2).unwrap()).unwrap();
        for space in [Space::Hm1, Space::TildeHm1] {
            let op = GramOperator::new(&mesh, 1, space, 0.1).unwrap();
            let a = materialize(&op).unwrap();
            let asym = (&a - a.transpose()).abs().max() / a.abs().max();
            assert!(asym < 1e-11);
            let min = a.symmetric_eigen().eigenvalues.min();
            assert!(min > 0.0);
        }
    }

    #[test]
    fn rejects_bad_beta() {
        let mesh = initial_mesh(2).unwrap();
        assert!(GramOperator::new(&mesh, 0, Space::Hm1, 0.0).is_err());
        assert!(GramOperator::new(&mesh, 2, Space::Hm1, 0.1).is_err());
    }
}
