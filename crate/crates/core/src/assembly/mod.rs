//! Bases and Gram matrices of the discrete dual norms.
//!
//! Coefficient vectors of `P^p(T)` are laid out as all `#T` element
//! characteristic functions first, followed by the mean-zero functions
//! `chi_{T,j} = lambda_j - 1/(n+1)` (`j = 1..n`) in (element, j) order.
//!
//! All integrands are polynomials on each simplex and are integrated exactly
//! with `int_T lambda^a = a! n! |T| / (|a| + n)!`.

mod sparse;

use nalgebra::DMatrix;

pub use sparse::{CsrMatrix, SparseCholesky, SparseSymMatrix};

use crate::error::{Error, Result};
use crate::mesh::{barycentric_gradients, factorial, SimplicialMesh};

/// Which dual norm is being represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// Dual of `H^1_0`: Dirichlet P1 space, `R` = stiffness.
    Hm1,
    /// Dual of `H^1`: all vertices, `R` = stiffness + mass.
    TildeHm1,
}

impl Space {
    pub fn boundary_condition(self) -> BoundaryCondition {
        match self {
            Space::Hm1 => BoundaryCondition::Dirichlet,
            Space::TildeHm1 => BoundaryCondition::Free,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Space::Hm1 => "hm1",
            Space::TildeHm1 => "tilde",
        }
    }
}

impl std::str::FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hm1" => Ok(Space::Hm1),
            "tilde" => Ok(Space::TildeHm1),
            other => Err(Error::InvalidConfig(format!("unknown space `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// Boundary vertices are removed (row/column elimination).
    Dirichlet,
    Free,
}

/// `binomial(p + n, p)`, the dimension of `P^p` on an n-simplex.
pub fn poly_dim(n: usize, p: usize) -> usize {
    (1..=n).fold(1, |acc, j| acc * (p + j) / j)
}

/// `int_T lambda_0^a_0 ... lambda_n^a_n dx` for an n-simplex of volume `vol`.
pub fn barycentric_moment(exponents: &[usize], vol: f64) -> f64 {
    let n = exponents.len() - 1;
    let total: usize = exponents.iter().sum();
    let num: f64 = exponents.iter().map(|&a| factorial(a)).product::<f64>() * factorial(n);
    num * vol / factorial(total + n)
}

/// `int_T lambda_i lambda_j dx`.
fn lambda_product(n: usize, vol: f64, i: usize, j: usize) -> f64 {
    let mut a = vec![0; n + 1];
    a[i] += 1;
    a[j] += 1;
    barycentric_moment(&a, vol)
}

/// Continuous piecewise linears, numbered over the non-eliminated vertices.
#[derive(Clone, Debug)]
pub struct P1Space {
    bc: BoundaryCondition,
    vertex_dof: Vec<Option<usize>>,
    num_dofs: usize,
}

impl P1Space {
    pub fn new(mesh: &SimplicialMesh, bc: BoundaryCondition) -> Self {
        let on_boundary = match bc {
            BoundaryCondition::Dirichlet => mesh.boundary_vertices(),
            BoundaryCondition::Free => vec![false; mesh.num_vertices()],
        };
        let mut num_dofs = 0;
        let vertex_dof = on_boundary
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    num_dofs += 1;
                    num_dofs - 1
                })
            })
            .collect();
        P1Space {
            bc,
            vertex_dof,
            num_dofs,
        }
    }

    pub fn boundary_condition(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn num_dofs(&self) -> usize {
        self.num_dofs
    }

    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.vertex_dof[vertex]
    }
}

/// Element-wise polynomials of degree `p <= 1` with the basis described in
/// the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisSet {
    dim: usize,
    degree: usize,
    num_elements: usize,
}

impl BasisSet {
    pub fn new(mesh: &SimplicialMesh, degree: usize) -> Result<Self> {
        if degree > 1 {
            return Err(Error::InvalidConfig(format!(
                "polynomial degree {degree} not supported (expected 0 or 1)"
            )));
        }
        Ok(BasisSet {
            dim: mesh.dim(),
            degree,
            num_elements: mesh.num_elements(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    /// `d(n, p)`
    pub fn local_dim(&self) -> usize {
        poly_dim(self.dim, self.degree)
    }

    pub fn bubbles_per_element(&self) -> usize {
        self.local_dim() - 1
    }

    pub fn num_dofs(&self) -> usize {
        self.local_dim() * self.num_elements
    }

    pub fn num_bubble_dofs(&self) -> usize {
        self.bubbles_per_element() * self.num_elements
    }

    /// Global index of `chi_{T,j}`, `j` counted from zero.
    pub fn bubble_index(&self, t: usize, j: usize) -> usize {
        self.num_elements + t * self.bubbles_per_element() + j
    }
}

/// Mean-zero function `lambda_{local_vertex} - 1/(n+1)` on one element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bubble {
    pub local_vertex: usize,
    /// `||chi_{T,j}||^2_{L^2(T)}`
    pub norm_sq: f64,
}

impl Bubble {
    pub fn eval(&self, barycentric: &[f64]) -> f64 {
        barycentric[self.local_vertex] - 1.0 / barycentric.len() as f64
    }
}

/// The `n` mean-zero degree-one functions of element `t`, built from
/// `lambda_1, ..., lambda_n`.
pub fn make_p1_bubbles(mesh: &SimplicialMesh, t: usize) -> Vec<Bubble> {
    let n = mesh.dim();
    let vol = mesh.volume(t);
    (1..=n)
        .map(|k| Bubble {
            local_vertex: k,
            norm_sq: bubble_inner(n, vol, k, k),
        })
        .collect()
}

/// `int_T (lambda_k - c)(lambda_l - c)` with `c = 1/(n+1)`.
fn bubble_inner(n: usize, vol: f64, k: usize, l: usize) -> f64 {
    let c = 1.0 / (n + 1) as f64;
    lambda_product(n, vol, k, l) - c * c * vol
}

/// `int_T (lambda_k - c) lambda_i`.
fn bubble_times_lambda(n: usize, vol: f64, k: usize, i: usize) -> f64 {
    let c = 1.0 / (n + 1) as f64;
    lambda_product(n, vol, k, i) - c * vol / (n + 1) as f64
}

/// `|T| grad lambda_i . grad lambda_j`
pub fn local_stiffness(points: &[&[f64]], vol: f64) -> DMatrix<f64> {
    let g = barycentric_gradients(points);
    (&g * g.transpose()) * vol
}

/// `int_T lambda_i lambda_j = |T| (1 + delta_ij) / ((n+1)(n+2))`
pub fn local_p1_mass(n: usize, vol: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n + 1, n + 1, |i, j| lambda_product(n, vol, i, j))
}

fn assemble_p1(
    mesh: &SimplicialMesh,
    space: &P1Space,
    local: impl Fn(usize) -> DMatrix<f64>,
) -> SparseSymMatrix {
    let n = mesh.dim();
    let mut triplets = Vec::with_capacity(mesh.num_elements() * (n + 1) * (n + 1));
    for t in 0..mesh.num_elements() {
        let k = local(t);
        let el = mesh.element(t);
        for (a, &va) in el.iter().enumerate() {
            let Some(i) = space.dof(va) else { continue };
            for (b, &vb) in el.iter().enumerate() {
                let Some(j) = space.dof(vb) else { continue };
                let v = 0.5 * (k[(a, b)] + k[(b, a)]);
                triplets.push((i, j, v));
            }
        }
    }
    SparseSymMatrix::from_triplets(space.num_dofs(), &triplets)
        .expect("element loop produces symmetric triplets")
}

/// `<grad eta_j, grad eta_k>` over the dofs of `space`.
pub fn stiffness_matrix(mesh: &SimplicialMesh, space: &P1Space) -> SparseSymMatrix {
    assemble_p1(mesh, space, |t| {
        local_stiffness(&mesh.element_points(t), mesh.volume(t))
    })
}

/// `<eta_j, eta_k>` over the dofs of `space`.
pub fn p1_mass_matrix(mesh: &SimplicialMesh, space: &P1Space) -> SparseSymMatrix {
    let n = mesh.dim();
    assemble_p1(mesh, space, |t| local_p1_mass(n, mesh.volume(t)))
}

/// `R` for the Dirichlet space, `R~ = stiffness + mass` for the free one.
pub fn assemble_r(mesh: &SimplicialMesh, bc: BoundaryCondition) -> Result<SparseSymMatrix> {
    let space = P1Space::new(mesh, bc);
    if space.num_dofs() == 0 {
        return Err(Error::EmptySpace);
    }
    Ok(assemble_r_on(mesh, &space))
}

pub(crate) fn assemble_r_on(mesh: &SimplicialMesh, space: &P1Space) -> SparseSymMatrix {
    let n = mesh.dim();
    match space.boundary_condition() {
        BoundaryCondition::Dirichlet => stiffness_matrix(mesh, space),
        BoundaryCondition::Free => assemble_p1(mesh, space, |t| {
            let vol = mesh.volume(t);
            local_stiffness(&mesh.element_points(t), vol) + local_p1_mass(n, vol)
        }),
    }
}

/// `M_{j,l} = <chi_l, eta_j>`: rows are P1 dofs, columns basis functions.
pub fn assemble_m(mesh: &SimplicialMesh, basis: &BasisSet, space: &P1Space) -> CsrMatrix {
    let n = mesh.dim();
    let mut triplets = Vec::new();
    for t in 0..mesh.num_elements() {
        let vol = mesh.volume(t);
        for (i, &v) in mesh.element(t).iter().enumerate() {
            let Some(row) = space.dof(v) else { continue };
            triplets.push((row, t, vol / (n + 1) as f64));
            if basis.degree() == 1 {
                for j in 0..n {
                    let col = basis.bubble_index(t, j);
                    triplets.push((row, col, bubble_times_lambda(n, vol, j + 1, i)));
                }
            }
        }
    }
    CsrMatrix::from_triplets(space.num_dofs(), basis.num_dofs(), &triplets)
}

/// `L_{l,m} = <h~^2 chi_l, chi_m>` with `h~|_T = |T|^{1/n}`.
///
/// Block diagonal: `chi_T` is orthogonal to the mean-zero functions, so the
/// blocks are the scalar `|T|^{(n+2)/n}` and the `n x n` bubble Gram matrix.
pub fn assemble_l(mesh: &SimplicialMesh, basis: &BasisSet) -> SparseSymMatrix {
    let n = mesh.dim();
    let mut triplets = Vec::new();
    for t in 0..mesh.num_elements() {
        let vol = mesh.volume(t);
        let h2 = vol.powf(2.0 / n as f64);
        triplets.push((t, t, h2 * vol));
        if basis.degree() == 1 {
            for j in 0..n {
                for k in 0..n {
                    let v = h2 * bubble_inner(n, vol, j.min(k) + 1, j.max(k) + 1);
                    triplets.push((basis.bubble_index(t, j), basis.bubble_index(t, k), v));
                }
            }
        }
    }
    SparseSymMatrix::from_triplets(basis.num_dofs(), &triplets)
        .expect("block diagonal assembly is symmetric")
}
