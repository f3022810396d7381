//! Freudenthal's subdivision of an ordered n-simplex into `2^n` children.
//!
//! In the coordinates `y` of the scaled reference simplex
//! `{2 >= y_1 >= ... >= y_n >= 0}` the children are the unit Kuhn simplices
//! `b, b + e_{pi(1)}, b + e_{pi(1)} + e_{pi(2)}, ...` that fit inside. A
//! lattice point `(2^a, 1^b, 0^c)` is the midpoint of vertices `a` and
//! `a + b` of the parent. Children inherit the path ordering, so a Kuhn
//! triangulation stays a Kuhn triangulation.

use super::MidpointPool;
use crate::error::Result;
use crate::mesh::SimplicialMesh;

/// Children of the ordered simplex `[x_0, ..., x_n]`, each given as pairs
/// `(i, j)` standing for the midpoint of `x_i` and `x_j` (`i == j` is the
/// vertex itself).
pub fn freudenthal_children(n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut children = Vec::with_capacity(1 << n);
    let mut perms = Vec::new();
    permutations(&mut (0..n).collect(), 0, &mut perms);
    perms.sort();
    for base in 0..1usize << n {
        for perm in &perms {
            let mut y: Vec<usize> = (0..n).map(|k| (base >> (n - 1 - k)) & 1).collect();
            let mut path = vec![y.clone()];
            for &axis in perm {
                y[axis] += 1;
                path.push(y.clone());
            }
            let inside = path
                .iter()
                .all(|p| p.windows(2).all(|w| w[0] >= w[1]) && p[0] <= 2);
            if inside {
                children.push(
                    path.iter()
                        .map(|p| {
                            let twos = p.iter().filter(|&&c| c == 2).count();
                            let nonzero = p.iter().filter(|&&c| c > 0).count();
                            (twos, nonzero)
                        })
                        .collect(),
                );
            }
        }
    }
    children
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Uniform refinement by Freudenthal's algorithm; the children of element
/// `t` are elements `t * 2^n .. (t + 1) * 2^n`.
pub fn freudenthal_refine(mesh: &SimplicialMesh) -> Result<SimplicialMesh> {
    let n = mesh.dim();
    let template = freudenthal_children(n);
    let mut pool = MidpointPool::new(mesh);
    let mut elements = Vec::with_capacity(mesh.connectivity().len() << n);
    for el in mesh.elements() {
        for child in &template {
            for &(i, j) in child {
                elements.push(pool.midpoint(el[i], el[j]));
            }
        }
    }
    SimplicialMesh::new(n, pool.into_coords(), elements)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_sizes() {
        for n in 1..=4 {
            assert_eq!(freudenthal_children(n).len(), 1 << n);
        }
    }

    #[test]
    fn triangle_template_is_red_refinement() {
        let kids = freudenthal_children(2);
        // three corner children and the middle one
        for corner in 0..3 {
            assert!(kids.iter().any(|c| c.contains(&(corner, corner))));
        }
        assert!(kids.iter().any(|c| c.iter().all(|&(i, j)| i != j)));
    }

    #[test]
    fn tetrahedron_octahedron_diagonal() {
        // Bey's scheme cuts the inner octahedron along x_02 -- x_13
        let kids = freudenthal_children(3);
        let inner: Vec<_> = kids
            .iter()
            .filter(|c| c.iter().all(|&(i, j)| i != j))
            .collect();
        assert_eq!(inner.len(), 4);
        assert!(inner
            .iter()
            .all(|c| c.contains(&(0, 2)) && c.contains(&(1, 3))));
    }
}
