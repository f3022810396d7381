use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

use super::marking::IndicatorField;
use super::quadrature::{integrate_triangle, GRADING_LEVELS};
use crate::assembly::{p1_mass_matrix, BoundaryCondition, P1Space, SparseCholesky};
use crate::error::{Error, Result};
use crate::mesh::SimplicialMesh;

/// `w = r^{2/3} cos(2/3 phi - pi/6)` and its gradient, with
/// `phi in [-pi/2, pi]` measured so that `w` vanishes on both edges of the
/// re-entrant corner of the L-shape.
///
/// The gradient is unbounded at the origin; zero is returned there.
pub fn singular_function(p: [f64; 2]) -> (f64, [f64; 2]) {
    let r = p[0].hypot(p[1]);
    if r == 0.0 {
        return (0.0, [0.0, 0.0]);
    }
    let mut phi = p[1].atan2(p[0]);
    if phi < -FRAC_PI_2 {
        phi += 2.0 * PI;
    }
    let theta = 2.0 / 3.0 * phi - FRAC_PI_6;
    let r13 = r.cbrt();
    let w = r13 * r13 * theta.cos();
    let dr = 2.0 / 3.0 / r13 * theta.cos();
    let dphi = -2.0 / 3.0 / r13 * theta.sin();
    let (s, c) = phi.sin_cos();
    (w, [dr * c - dphi * s, dr * s + dphi * c])
}

/// `mu(T) = ||(1 - Q) f||^2_{L^2(T)} + ||grad (1 - Q) f||^2_{L^2(T)}` where
/// `Q` is the `L^2` projection onto continuous P1 without boundary
/// conditions.
///
/// Elements with a vertex at `singular_point` are integrated on a graded
/// subdivision.
pub fn projection_error_indicator(
    mesh: &SimplicialMesh,
    f: impl Fn([f64; 2]) -> (f64, [f64; 2]),
    singular_point: Option<[f64; 2]>,
) -> Result<IndicatorField> {
    if mesh.dim() != 2 {
        return Err(Error::UnsupportedDimension(mesh.dim()));
    }
    let space = P1Space::new(mesh, BoundaryCondition::Free);
    let corner = |t: usize| {
        let p = singular_point?;
        mesh.element(t).iter().position(|&v| {
            let x = mesh.vertex(v);
            x[0] == p[0] && x[1] == p[1]
        })
    };
    let triangle = |t: usize| {
        let pts = mesh.element_points(t);
        [
            [pts[0][0], pts[0][1]],
            [pts[1][0], pts[1][1]],
            [pts[2][0], pts[2][1]],
        ]
    };

    let mut rhs = vec![0.0; space.num_dofs()];
    for t in 0..mesh.num_elements() {
        let local = integrate_triangle(triangle(t), corner(t), GRADING_LEVELS, |lam, x| {
            let v = f(x).0;
            [v * lam[0], v * lam[1], v * lam[2]]
        });
        for (k, &v) in mesh.element(t).iter().enumerate() {
            rhs[space.dof(v).expect("free space")] += local[k];
        }
    }
    let mass = SparseCholesky::factor(&p1_mass_matrix(mesh, &space))?;
    let q = mass.solve(&rhs);

    let mut mu = Vec::with_capacity(mesh.num_elements());
    for t in 0..mesh.num_elements() {
        let el = mesh.element(t);
        let qv = [q[el[0]], q[el[1]], q[el[2]]];
        let g = crate::mesh::barycentric_gradients(&mesh.element_points(t));
        let grad_q = [
            (0..3).map(|k| qv[k] * g[(k, 0)]).sum::<f64>(),
            (0..3).map(|k| qv[k] * g[(k, 1)]).sum::<f64>(),
        ];
        let [e] = integrate_triangle(triangle(t), corner(t), GRADING_LEVELS, |lam, x| {
            let (v, dv) = f(x);
            let qx = qv[0] * lam[0] + qv[1] * lam[1] + qv[2] * lam[2];
            let (e0, e1, e2) = (v - qx, dv[0] - grad_q[0], dv[1] - grad_q[1]);
            [e0 * e0 + e1 * e1 + e2 * e2]
        });
        if !e.is_finite() {
            return Err(Error::NonFinite(format!("indicator of element {t}")));
        }
        mu.push(e);
    }
    IndicatorField::new(mu)
}

/// [`projection_error_indicator`] for [`singular_function`] with grading at
/// the origin.
pub fn singular_indicator(mesh: &SimplicialMesh) -> Result<IndicatorField> {
    projection_error_indicator(mesh, singular_function, Some([0.0, 0.0]))
}
