mod common;

use common::*;
use quasidiag::assembly::Space;
use quasidiag::precond::{Preconditioner, PreconditionerKind};
use quasidiag::spectral::{
    extreme_eigs, materialize, solve_spd, EigOptions, GramOperator, IdentityOperator,
    LinearOperator,
};

#[test]
fn quasi_diag_pcg_beats_plain_cg() {
    let mesh = uniform(2, 2);
    let a = GramOperator::new(&mesh, 0, Space::Hm1, 0.1).unwrap();
    let b = Preconditioner::new(&mesh, PreconditionerKind::QuasiDiag, 0.0).unwrap();
    let rhs = random_vec(&mut rng(3), a.dim());
    let pre = solve_spd(&a, &rhs, &b, 1e-8).unwrap();
    let plain = solve_spd(&a, &rhs, &IdentityOperator(a.dim()), 1e-8).unwrap();
    assert!(
        pre.iterations < plain.iterations,
        "{} vs {}",
        pre.iterations,
        plain.iterations
    );
    let ax = a.apply(&pre.x).unwrap();
    let err: f64 = ax
        .iter()
        .zip(&rhs)
        .map(|(p, q)| (p - q).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(err < 1e-6 * dot(&rhs, &rhs).sqrt());
}

#[test]
fn beta_robustness() {
    let mesh = uniform(2, 2);
    let b = Preconditioner::new(&mesh, PreconditionerKind::QuasiDiag, 0.0).unwrap();
    let kappa = |beta: f64| {
        let a = GramOperator::new(&mesh, 0, Space::Hm1, beta).unwrap();
        extreme_eigs(&a, &b, &EigOptions::default(), None)
            .unwrap()
            .kappa
    };
    let (k1, k4) = (kappa(0.1), kappa(0.4));
    assert!(k4 / k1 <= 4.0 && k1 / k4 <= 4.0, "{k1} {k4}");
}

#[test]
fn element_relabeling_leaves_kappa_unchanged() {
    let mesh = uniform(2, 2);
    let n = mesh.num_elements();
    let perm: Vec<usize> = (0..n).map(|t| (t * 37 + 11) % n).collect();
    let permuted = mesh.permute_elements(&perm).unwrap();
    let start = random_vec(&mut rng(4), n);
    // permuted element k is original element perm[k]
    let start_perm: Vec<f64> = perm.iter().map(|&t| start[t]).collect();
    for (space, kind) in [
        (Space::Hm1, PreconditionerKind::QuasiDiag),
        (Space::TildeHm1, PreconditionerKind::QuasiDiagTilde),
    ] {
        let run = |m: &quasidiag::SimplicialMesh, s: &[f64]| {
            let a = GramOperator::new(m, 0, space, 0.1).unwrap();
            let p = Preconditioner::new(m, kind, 0.01).unwrap();
            let opts = EigOptions {
                start: Some(s.to_vec()),
                ..EigOptions::default()
            };
            let rep = extreme_eigs(&a, &p, &opts, None).unwrap();
            let dense = dense_kappa(&materialize(&a).unwrap(), &p.to_dense().unwrap());
            (rep.kappa, dense)
        };
        let (k0, d0) = run(&mesh, &start);
        let (k1, d1) = run(&permuted, &start_perm);
        assert!((k0 - k1).abs() < 1e-10 * k0, "{k0} {k1}");
        assert!((d0 - d1).abs() < 1e-10 * d0, "{d0} {d1}");
    }
}

#[test]
fn rayleigh_quotients_are_positive_and_ordered() {
    for (_, mesh) in small_meshes() {
        let a = GramOperator::new(&mesh, 1, Space::TildeHm1, 0.1).unwrap();
        let p = Preconditioner::new(&mesh, PreconditionerKind::QuasiDiagTildeHigherOrder, 0.01)
            .unwrap();
        let rep = extreme_eigs(&a, &p, &EigOptions::default(), None).unwrap();
        assert!(rep.lambda_min > 0.0 && rep.lambda_max >= rep.lambda_min);
        assert!(rep.kappa >= 1.0);
        assert_eq!(rep.kappa, rep.lambda_max / rep.lambda_min);
    }
}

#[test]
fn gram_matches_dense_formula() {
    let mesh = uniform(2, 1);
    for space in [Space::Hm1, Space::TildeHm1] {
        let op = GramOperator::new(&mesh, 1, space, 0.1).unwrap();
        let m = op.m().to_dense();
        let r = op.r().to_dense().try_inverse().unwrap();
        let oracle = m.transpose() * r * m + op.l().to_dense() * 0.1;
        let a = materialize(&op).unwrap();
        assert!((a - &oracle).abs().max() < 1e-10 * oracle.abs().max());
    }
}
