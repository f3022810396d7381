//! Triangle quadrature, including graded subdivision towards a singular
//! vertex.

/// Symmetric 6-point rule of degree 4 on a triangle: barycentric points and
/// weights normalised to sum to one.
pub fn dunavant_degree4() -> [([f64; 3], f64); 6] {
    const A1: f64 = 0.445_948_490_915_965;
    const W1: f64 = 0.223_381_589_678_011;
    const A2: f64 = 0.091_576_213_509_771;
    const W2: f64 = 0.109_951_743_655_322;
    let b1 = 1.0 - 2.0 * A1;
    let b2 = 1.0 - 2.0 * A2;
    [
        ([A1, A1, b1], W1),
        ([A1, b1, A1], W1),
        ([b1, A1, A1], W1),
        ([A2, A2, b2], W2),
        ([A2, b2, A2], W2),
        ([b2, A2, A2], W2),
    ]
}

/// Number of graded subdivision levels used at a singular vertex.
pub const GRADING_LEVELS: usize = 4;

fn lerp3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        0.5 * (a[0] + b[0]),
        0.5 * (a[1] + b[1]),
        0.5 * (a[2] + b[2]),
    ]
}

/// Integrates `f` over the triangle with vertices `verts`.
///
/// `f` receives the barycentric coordinates of the point with respect to
/// `verts` and its physical position. With `corner = Some(k)` the triangle
/// is red-refined `levels` times towards vertex `k`, so integrands that are
/// singular there are resolved.
pub fn integrate_triangle<const K: usize>(
    verts: [[f64; 2]; 3],
    corner: Option<usize>,
    levels: usize,
    mut f: impl FnMut(&[f64; 3], [f64; 2]) -> [f64; K],
) -> [f64; K] {
    let area = 0.5
        * ((verts[1][0] - verts[0][0]) * (verts[2][1] - verts[0][1])
            - (verts[2][0] - verts[0][0]) * (verts[1][1] - verts[0][1]))
            .abs();
    let mut acc = [0.0; K];
    let unit = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let depth = if corner.is_some() { levels } else { 0 };
    accumulate(
        &verts,
        unit,
        corner.unwrap_or(0),
        depth,
        1.0,
        &mut f,
        &mut acc,
    );
    acc.iter_mut().for_each(|v| *v *= area);
    acc
}

/// `sub` holds the barycentric coordinates of a sub-triangle; `scale` is its
/// area relative to the parent.
fn accumulate<const K: usize>(
    verts: &[[f64; 2]; 3],
    sub: [[f64; 3]; 3],
    corner: usize,
    depth: usize,
    scale: f64,
    f: &mut impl FnMut(&[f64; 3], [f64; 2]) -> [f64; K],
    acc: &mut [f64; K],
) {
    if depth == 0 {
        for (p, w) in dunavant_degree4() {
            let mut lam = [0.0; 3];
            for (i, l) in lam.iter_mut().enumerate() {
                *l = p[0] * sub[0][i] + p[1] * sub[1][i] + p[2] * sub[2][i];
            }
            let x = [
                lam[0] * verts[0][0] + lam[1] * verts[1][0] + lam[2] * verts[2][0],
                lam[0] * verts[0][1] + lam[1] * verts[1][1] + lam[2] * verts[2][1],
            ];
            let v = f(&lam, x);
            for k in 0..K {
                acc[k] += scale * w * v[k];
            }
        }
        return;
    }
    let [a, b, c] = sub;
    let (ab, bc, ca) = (lerp3(&a, &b), lerp3(&b, &c), lerp3(&c, &a));
    let children = [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]];
    for (k, child) in children.into_iter().enumerate() {
        // child k < 3 is the corner child of parent vertex k, at local slot k
        let d = if k == corner { depth - 1 } else { 0 };
        accumulate(verts, child, corner, d, 0.25 * scale, f, acc);
    }
}
