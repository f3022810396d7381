#![allow(dead_code)]

use nalgebra::DMatrix;
use quasidiag::mesh::initial_mesh;
use quasidiag::refine::{nvb_refine, uniform_refine};
use quasidiag::SimplicialMesh;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of `P^{-1} A` from dense matrices, with `pinv` the matrix of
/// the preconditioner action: with `A = L L^t`, `P^{-1} A` is similar to the
/// symmetric `L^t P^{-1} L`.
pub fn dense_extreme_eigs(a: &DMatrix<f64>, pinv: &DMatrix<f64>) -> (f64, f64) {
    let l = a.clone().cholesky().expect("A is SPD").l();
    let m = l.transpose() * pinv * &l;
    let m = (&m + m.transpose()) * 0.5;
    let e = m.symmetric_eigen().eigenvalues;
    (e.min(), e.max())
}

pub fn dense_kappa(a: &DMatrix<f64>, pinv: &DMatrix<f64>) -> f64 {
    let (lo, hi) = dense_extreme_eigs(a, pinv);
    hi / lo
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let s = (a + a.transpose()) * 0.5;
    s.symmetric_eigen().eigenvalues.min()
}

pub fn unit_square() -> SimplicialMesh {
    SimplicialMesh::new(
        2,
        vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
        vec![0, 1, 2, 0, 2, 3],
    )
    .unwrap()
}

pub fn uniform(dim: usize, refinements: usize) -> SimplicialMesh {
    let mut m = initial_mesh(dim).unwrap();
    for _ in 0..refinements {
        m = uniform_refine(&m).unwrap();
    }
    m
}

/// A 2D mesh from random newest vertex bisection steps.
pub fn random_nvb(rng: &mut ChaCha8Rng, steps: usize) -> SimplicialMesh {
    let mut m = initial_mesh(2).unwrap();
    for _ in 0..steps {
        let marked: Vec<usize> = (0..m.num_elements())
            .filter(|_| rng.random_bool(0.2))
            .collect();
        m = nvb_refine(&m, &marked).unwrap();
    }
    m
}

/// Moves interior vertices by up to `amount` times the smallest element
/// diameter, then shuffles the element order.
pub fn jitter_and_shuffle(
    mesh: &SimplicialMesh,
    rng: &mut ChaCha8Rng,
    amount: f64,
) -> SimplicialMesh {
    let boundary = mesh.boundary_vertices();
    let h = mesh.min_diameter();
    let dim = mesh.dim();
    let mut coords = mesh.coords().to_vec();
    for (v, &b) in boundary.iter().enumerate() {
        if !b {
            for k in 0..dim {
                coords[v * dim + k] += amount * h * rng.random_range(-1.0..1.0);
            }
        }
    }
    let mut perm: Vec<usize> = (0..mesh.num_elements()).collect();
    for i in (1..perm.len()).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let elements = perm
        .iter()
        .flat_map(|&t| mesh.element(t).iter().copied())
        .collect();
    SimplicialMesh::new(dim, coords, elements).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Small meshes (at most 200 elements) used by the dense-oracle checks.
pub fn small_meshes() -> Vec<(String, SimplicialMesh)> {
    let mut out = vec![
        ("square".to_string(), unit_square()),
        ("L level 1".to_string(), uniform(2, 0)),
        ("L level 2".to_string(), uniform(2, 1)),
        ("L level 3".to_string(), uniform(2, 2)),
        ("3D level 1".to_string(), uniform(3, 0)),
        ("3D level 2".to_string(), uniform(3, 1)),
        ("4D level 1".to_string(), uniform(4, 0)),
    ];
    let mut r = rng(17);
    out.push(("random NVB".to_string(), random_nvb(&mut r, 4)));
    out.push((
        "jittered 3D".to_string(),
        jitter_and_shuffle(&uniform(3, 0), &mut r, 0.1),
    ));
    for (_, m) in &out {
        assert!(m.num_elements() <= 200);
    }
    out
}
