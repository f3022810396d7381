use crate::assembly::{BasisSet, CsrMatrix, SparseSymMatrix};
use crate::mesh::SimplicialMesh;

/// Element-wise divergences of the lowest order Raviart-Thomas functions.
///
/// Column `k` belongs to facet `facets()[k]` and holds `+|E|/|T+|` in row
/// `T+` and, for interior facets, `-|E|/|T-|` in row `T-`.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceMatrix {
    matrix: CsrMatrix,
    transpose: CsrMatrix,
    facets: Vec<usize>,
}

impl IncidenceMatrix {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// `I^t`, one row per facet.
    pub fn transpose(&self) -> &CsrMatrix {
        &self.transpose
    }

    /// Mesh facet index of each column.
    pub fn facets(&self) -> &[usize] {
        &self.facets
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Entries of column `k` as `(row, value)`.
    pub fn column(&self, k: usize) -> Vec<(usize, f64)> {
        self.transpose.row(k).collect()
    }

    /// `I D I^t` with `d` the diagonal of `D`.
    pub fn gram(&self, d: &[f64]) -> SparseSymMatrix {
        assert_eq!(d.len(), self.num_cols());
        let mut triplets = Vec::with_capacity(4 * d.len());
        for (k, &dk) in d.iter().enumerate() {
            let col = self.column(k);
            for (a, &(ra, va)) in col.iter().enumerate() {
                triplets.push((ra, ra, dk * va * va));
                for &(rb, vb) in &col[a + 1..] {
                    let w = dk * va * vb;
                    triplets.push((ra, rb, w));
                    triplets.push((rb, ra, w));
                }
            }
        }
        SparseSymMatrix::from_triplets(self.num_rows(), &triplets)
            .expect("pairs are pushed symmetrically")
    }
}

/// `I` over all facets, or `I~` over interior facets only.
pub fn build_incidence(mesh: &SimplicialMesh, include_boundary_facets: bool) -> IncidenceMatrix {
    let mut triplets = Vec::with_capacity(2 * mesh.num_facets());
    let mut facets = Vec::new();
    for (e, facet) in mesh.facets().iter().enumerate() {
        if facet.is_boundary() && !include_boundary_facets {
            continue;
        }
        let col = facets.len();
        facets.push(e);
        triplets.push((facet.plus, col, facet.measure / mesh.volume(facet.plus)));
        if let Some(minus) = facet.minus {
            triplets.push((minus, col, -facet.measure / mesh.volume(minus)));
        }
    }
    let matrix = CsrMatrix::from_triplets(mesh.num_elements(), facets.len(), &triplets);
    IncidenceMatrix {
        transpose: matrix.transpose(),
        matrix,
        facets,
    }
}

/// `|E|^{-n/(n-1)}` for the listed facets.
pub fn build_d(mesh: &SimplicialMesh, facets: &[usize]) -> Vec<f64> {
    let n = mesh.dim() as f64;
    facets
        .iter()
        .map(|&e| mesh.facet(e).measure.powf(-n / (n - 1.0)))
        .collect()
}

/// `(|T|^{1/n} ||chi_{T,j}||)^{-2}` in (element, j) order; empty for `p = 0`.
pub fn build_dp(mesh: &SimplicialMesh, basis: &BasisSet) -> Vec<f64> {
    let n = mesh.dim() as f64;
    let mut out = Vec::with_capacity(basis.num_bubble_dofs());
    if basis.degree() == 0 {
        return out;
    }
    for t in 0..mesh.num_elements() {
        let h2 = mesh.volume(t).powf(2.0 / n);
        for b in crate::assembly::make_p1_bubbles(mesh, t) {
            out.push(1.0 / (h2 * b.norm_sq));
        }
    }
    out
}

/// `|T|^{(n+2)/n}`
pub fn build_c(mesh: &SimplicialMesh) -> Vec<f64> {
    let n = mesh.dim() as f64;
    mesh.volumes()
        .iter()
        .map(|v| v.powf((n + 2.0) / n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::initial_mesh;
    use crate::refine::uniform_refine;

    fn unit_square() -> SimplicialMesh {
        SimplicialMesh::new(
            2,
            vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
            vec![0, 1, 2, 0, 2, 3],
        )
        .unwrap()
    }

    #[test]
    fn square_diagonal_column() {
        let m = unit_square();
        let inc = build_incidence(&m, false);
        assert_eq!(inc.num_cols(), 1);
        let col = inc.column(0);
        let s = 2.0 * 2f64.sqrt();
        assert_eq!(col.len(), 2);
        assert!((col[0].1 - s).abs() < 1e-14 && (col[1].1 + s).abs() < 1e-14);
    }

    #[test]
    fn single_triangle_boundary_columns() {
        let m = SimplicialMesh::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0], vec![0, 1, 2]).unwrap();
        let inc = build_incidence(&m, true);
        assert_eq!(inc.num_cols(), 3);
        for k in 0..3 {
            let col = inc.column(k);
            let f = m.facet(inc.facets()[k]);
            assert_eq!(col, vec![(0, f.measure / 0.5)]);
        }
        assert_eq!(build_incidence(&m, false).num_cols(), 0);
    }

    #[test]
    fn volume_weighted_column_sums() {
        for dim in [2, 3, 4] {
            let m = uniform_refine(&initial_mesh(dim).unwrap()).unwrap();
            let inc = build_incidence(&m, true);
            let sums = inc.matrix().mul_transpose_vec(m.volumes());
            for (k, &e) in inc.facets().iter().enumerate() {
                let f = m.facet(e);
                let expected = if f.is_boundary() { f.measure } else { 0.0 };
                assert!((sums[k] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn d_values() {
        let m = unit_square();
        let all: Vec<usize> = (0..m.num_facets()).collect();
        let d = build_d(&m, &all);
        for (e, &v) in d.iter().enumerate() {
            let len = m.facet(e).measure;
            let expected = if (len - 1.0).abs() < 1e-12 { 1.0 } else { 0.5 };
            assert!((v - expected).abs() < 1e-14);
        }
        // n = 3, |E| = 1/2
        let tet = SimplicialMesh::new(
            3,
            vec![0., 0., 0., 1., 0., 0., 0., 1., 0., 0., 0., 1.],
            vec![0, 1, 2, 3],
        )
        .unwrap();
        let e = (0..4)
            .find(|&e| (tet.facet(e).measure - 0.5).abs() < 1e-14)
            .unwrap();
        assert!((build_d(&tet, &[e])[0] - 2.0 * 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn dp_values_and_scaling() {
        let tri =
            SimplicialMesh::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0], vec![0, 1, 2]).unwrap();
        let basis = BasisSet::new(&tri, 1).unwrap();
        let dp = build_dp(&tri, &basis);
        assert_eq!(dp.len(), 2);
        assert!(dp.iter().all(|&v| (v - 72.0).abs() < 1e-12));
        for dim in [2, 3, 4] {
            let m = initial_mesh(dim).unwrap();
            let s: f64 = 0.3;
            let scaled = m.scaled(s).unwrap();
            let a = build_dp(&m, &BasisSet::new(&m, 1).unwrap());
            let b = build_dp(&scaled, &BasisSet::new(&scaled, 1).unwrap());
            for (x, y) in a.iter().zip(&b) {
                assert!((y / x - s.powi(-(dim as i32 + 2))).abs() < 1e-10 * y / x);
            }
        }
        assert!(build_dp(&tri, &BasisSet::new(&tri, 0).unwrap()).is_empty());
    }

    #[test]
    fn c_values() {
        let tri =
            SimplicialMesh::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0], vec![0, 1, 2]).unwrap();
        assert!((build_c(&tri)[0] - 0.25).abs() < 1e-16);
        let tet = SimplicialMesh::new(
            3,
            vec![0., 0., 0., 1., 0., 0., 0., 1., 0., 0., 0., 6.],
            vec![0, 1, 2, 3],
        )
        .unwrap();
        assert!((build_c(&tet)[0] - 1.0).abs() < 1e-14);
        // a 4-simplex of volume 1/16
        let s4 = SimplicialMesh::new(
            4,
            vec![
                0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1.5,
            ],
            vec![0, 1, 2, 3, 4],
        )
        .unwrap();
        assert!((s4.volume(0) - 1.0 / 16.0).abs() < 1e-15);
        assert!((build_c(&s4)[0] - 1.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn columns_have_at_most_two_entries() {
        let m = uniform_refine(&initial_mesh(3).unwrap()).unwrap();
        let inc = build_incidence(&m, true);
        assert!((0..inc.num_cols()).all(|k| inc.column(k).len() <= 2));
    }
}
