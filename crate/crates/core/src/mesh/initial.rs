//! The three starting meshes: a 2D L-shape, the 3D L-shaped prism and the
//! Kuhn triangulation of the unit 4-cube.

use std::collections::HashMap;

use super::{check_dim, SimplicialMesh};
use crate::error::Result;

/// Lower-left corners of the unit squares making up `(-1,1)^2 \ (-1,0]^2`.
const L_SHAPE_SQUARES: [[i64; 2]; 3] = [[0, -1], [0, 0], [-1, 0]];

/// Deduplicates vertices given on the half-integer lattice.
#[derive(Default)]
struct VertexPool {
    index: HashMap<Vec<i64>, usize>,
    coords: Vec<f64>,
}

impl VertexPool {
    /// `doubled` holds twice the coordinates.
    fn get(&mut self, doubled: &[i64]) -> usize {
        if let Some(&v) = self.index.get(doubled) {
            return v;
        }
        let v = self.index.len();
        self.index.insert(doubled.to_vec(), v);
        self.coords.extend(doubled.iter().map(|&c| c as f64 / 2.0));
        v
    }
}

/// Builds the initial mesh for `dim`:
///
/// * 2: L-shape, each unit square split criss-cross into 4 triangles
///   (12 triangles of area 1/4). Each triangle is stored as
///   `[a, b, centre]`, so its refinement edge `(a, b)` is the square side.
/// * 3: L-shape times `(0,1)`, each unit cube split into its 4 odd-corner
///   tetrahedra plus the central tetrahedron cut into 4 at the cube centre
///   (24 tetrahedra). The central tetrahedron uses the globally even
///   lattice corners so neighbouring cubes match.
/// * 4: the unit 4-cube split into the 24 Kuhn simplices, vertices ordered
///   along the monotone lattice path.
pub fn initial_mesh(dim: usize) -> Result<SimplicialMesh> {
    check_dim(dim)?;
    let mut pool = VertexPool::default();
    let mut elements = Vec::new();
    match dim {
        2 => {
            for [x, y] in L_SHAPE_SQUARES {
                let corners = [[x, y], [x + 1, y], [x + 1, y + 1], [x, y + 1]];
                let centre = pool.get(&[2 * x + 1, 2 * y + 1]);
                for k in 0..4 {
                    let a = corners[k];
                    let b = corners[(k + 1) % 4];
                    elements.push(pool.get(&[2 * a[0], 2 * a[1]]));
                    elements.push(pool.get(&[2 * b[0], 2 * b[1]]));
                    elements.push(centre);
                }
            }
        }
        3 => {
            for [x, y] in L_SHAPE_SQUARES {
                let (z, corners) = (0, cube_corners(&[x, y, 0]));
                let centre = pool.get(&[2 * x + 1, 2 * y + 1, 2 * z + 1]);
                let (even, odd): (Vec<[i64; 3]>, Vec<[i64; 3]>) = corners
                    .into_iter()
                    .partition(|c| c.iter().sum::<i64>().rem_euclid(2) == 0);
                let id = |pool: &mut VertexPool, c: &[i64]| {
                    pool.get(&c.iter().map(|v| 2 * v).collect::<Vec<_>>())
                };
                for o in &odd {
                    elements.push(id(&mut pool, o));
                    for e in &even {
                        let dist: i64 = o.iter().zip(e.iter()).map(|(a, b)| (a - b).abs()).sum();
                        if dist == 1 {
                            elements.push(id(&mut pool, e));
                        }
                    }
                }
                for skip in 0..4 {
                    for (k, e) in even.iter().enumerate() {
                        if k != skip {
                            elements.push(id(&mut pool, e));
                        }
                    }
                    elements.push(centre);
                }
            }
        }
        4 => {
            let mut perms = Vec::new();
            permutations(&mut vec![0, 1, 2, 3], 0, &mut perms);
            perms.sort();
            for perm in perms {
                let mut p = [0i64; 4];
                elements.push(pool.get(&p));
                for &axis in &perm {
                    p[axis] = 2;
                    elements.push(pool.get(&p));
                }
            }
        }
        _ => unreachable!(),
    }
    SimplicialMesh::new(dim, pool.coords, elements)
}

fn cube_corners(origin: &[i64; 3]) -> Vec<[i64; 3]> {
    (0..8)
        .map(|b| {
            [
                origin[0] + (b & 1),
                origin[1] + ((b >> 1) & 1),
                origin[2] + ((b >> 2) & 1),
            ]
        })
        .collect()
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn l_shape_2d() {
        let m = initial_mesh(2).unwrap();
        assert_eq!(m.num_elements(), 12);
        assert_eq!(m.num_vertices(), 11);
        assert!(m.volumes().iter().all(|&v| (v - 0.25).abs() < 1e-15));
        assert!((m.total_volume() - 3.0).abs() < 1e-12);
        // 3 #T = 2 #interior + #boundary
        assert_eq!(m.num_facets(), 22);
        assert_eq!(m.num_boundary_facets(), 8);
        assert_eq!(m.num_interior_facets(), 14);
        assert_eq!(3 * m.num_elements(), 2 * 14 + 8);
        m.check_conformity().unwrap();
    }

    #[test]
    fn l_shape_refinement_edge_is_longest() {
        let m = initial_mesh(2).unwrap();
        for t in 0..m.num_elements() {
            let p = m.element_points(t);
            let e01 = super::super::distance(p[0], p[1]);
            assert!(e01 > super::super::distance(p[1], p[2]));
            assert!(e01 > super::super::distance(p[0], p[2]));
        }
    }

    #[test]
    fn l_shape_prism_3d() {
        let m = initial_mesh(3).unwrap();
        assert_eq!(m.num_elements(), 24);
        let total: f64 = (0..24)
            .map(|t| crate::mesh::simplex_volume(&m.element_points(t)).unwrap())
            .sum();
        assert!((total - 3.0).abs() < 1e-12);
        assert!((m.total_volume() - 3.0).abs() < 1e-12);
        m.check_conformity().unwrap();
        // each cube face split along one diagonal: 2 triangles per boundary
        // square, 14 boundary squares
        assert_eq!(m.num_boundary_facets(), 28);
    }

    #[test]
    fn kuhn_cube_4d() {
        let m = initial_mesh(4).unwrap();
        assert_eq!(m.num_elements(), 24);
        assert_eq!(m.num_vertices(), 16);
        assert!(m.volumes().iter().all(|&v| (v - 1.0 / 24.0).abs() < 1e-15));
        assert!((m.total_volume() - 1.0).abs() < 1e-12);
        m.check_conformity().unwrap();
    }

    #[test]
    fn rejects_other_dimensions() {
        assert!(matches!(
            initial_mesh(5),
            Err(Error::UnsupportedDimension(5))
        ));
        assert!(matches!(
            initial_mesh(1),
            Err(Error::UnsupportedDimension(1))
        ));
    }
}
