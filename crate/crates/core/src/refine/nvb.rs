//! Newest vertex bisection for triangles.
//!
//! Triangles are stored as `[a, b, c]` with refinement edge `(a, b)` and
//! newest vertex `c`. Bisection at the midpoint `m` of `(a, b)` yields
//! `[c, a, m]` and `[b, c, m]`, which keeps the convention.

use super::MidpointPool;
use crate::error::{Error, Result};
use crate::mesh::{distance, SimplicialMesh};

/// Local index of the vertex opposite the refinement edge of a triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RefinementEdgeTag(u8);

impl RefinementEdgeTag {
    pub fn new(local_vertex: u8) -> Result<Self> {
        if local_vertex > 2 {
            return Err(Error::InvalidConfig(format!(
                "refinement edge tag {local_vertex} out of range"
            )));
        }
        Ok(RefinementEdgeTag(local_vertex))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

fn require_2d(mesh: &SimplicialMesh) -> Result<()> {
    if mesh.dim() != 2 {
        return Err(Error::UnsupportedDimension(mesh.dim()));
    }
    Ok(())
}

/// Tags under the storage convention: always the last local vertex.
pub fn refinement_tags(mesh: &SimplicialMesh) -> Result<Vec<RefinementEdgeTag>> {
    require_2d(mesh)?;
    Ok(vec![RefinementEdgeTag(2); mesh.num_elements()])
}

/// Tags selecting the longest edge of each triangle; ties go to the edge
/// whose opposite vertex has the lowest global index.
pub fn longest_edge_tags(mesh: &SimplicialMesh) -> Result<Vec<RefinementEdgeTag>> {
    require_2d(mesh)?;
    Ok((0..mesh.num_elements())
        .map(|t| {
            let el = mesh.element(t);
            let p = mesh.element_points(t);
            let mut best = 0;
            let mut best_len = f64::NEG_INFINITY;
            for k in 0..3 {
                let len = distance(p[(k + 1) % 3], p[(k + 2) % 3]);
                let better = len > best_len * (1.0 + 1e-12)
                    || (len >= best_len * (1.0 - 1e-12) && el[k] < el[best]);
                if better {
                    best = k;
                    best_len = best_len.max(len);
                }
            }
            RefinementEdgeTag(best as u8)
        })
        .collect())
}

/// Reorders every triangle so its tagged edge becomes the refinement edge
/// `(v_0, v_1)` of the storage convention.
pub fn apply_refinement_tags(
    mesh: &SimplicialMesh,
    tags: &[RefinementEdgeTag],
) -> Result<SimplicialMesh> {
    require_2d(mesh)?;
    if tags.len() != mesh.num_elements() {
        return Err(Error::DimensionError {
            expected: mesh.num_elements(),
            actual: tags.len(),
        });
    }
    let mut elements = Vec::with_capacity(mesh.connectivity().len());
    for (el, tag) in mesh.elements().zip(tags) {
        let k = tag.index();
        elements.extend([el[(k + 1) % 3], el[(k + 2) % 3], el[k]]);
    }
    SimplicialMesh::new(2, mesh.coords().to_vec(), elements)
}

/// Refines the marked triangles (each at least once) plus the closure
/// needed to avoid hanging nodes.
pub fn nvb_refine(mesh: &SimplicialMesh, marked: &[usize]) -> Result<SimplicialMesh> {
    require_2d(mesh)?;
    let mut edge_marked = vec![false; mesh.num_facets()];
    let mut queue = Vec::new();
    for &t in marked {
        if t >= mesh.num_elements() {
            return Err(Error::DimensionError {
                expected: mesh.num_elements(),
                actual: t,
            });
        }
        let e = refinement_edge(mesh, t);
        if !edge_marked[e] {
            edge_marked[e] = true;
            queue.push(e);
        }
    }
    // closure: an element with any marked edge must bisect its refinement edge
    while let Some(e) = queue.pop() {
        let f = mesh.facet(e);
        for t in std::iter::once(f.plus).chain(f.minus) {
            let r = refinement_edge(mesh, t);
            if !edge_marked[r] {
                edge_marked[r] = true;
                queue.push(r);
            }
        }
    }
    bisect_marked(mesh, &edge_marked)
}

/// Uniform refinement: every edge marked, every triangle into four.
pub(super) fn nvb_refine_all(mesh: &SimplicialMesh) -> Result<SimplicialMesh> {
    require_2d(mesh)?;
    bisect_marked(mesh, &vec![true; mesh.num_facets()])
}

fn refinement_edge(mesh: &SimplicialMesh, t: usize) -> usize {
    mesh.element_facets(t)[2]
}

fn bisect_marked(mesh: &SimplicialMesh, edge_marked: &[bool]) -> Result<SimplicialMesh> {
    let mut pool = MidpointPool::new(mesh);
    // midpoints numbered in facet order
    for (e, f) in mesh.facets().iter().enumerate() {
        if edge_marked[e] {
            pool.midpoint(f.vertices[0], f.vertices[1]);
        }
    }
    let mut elements = Vec::with_capacity(mesh.connectivity().len() * 2);
    for t in 0..mesh.num_elements() {
        let [a, b, c] = [mesh.element(t)[0], mesh.element(t)[1], mesh.element(t)[2]];
        let ef = mesh.element_facets(t);
        if !edge_marked[ef[2]] {
            elements.extend([a, b, c]);
            continue;
        }
        let m = pool.midpoint(a, b);
        // [c, a, m] has refinement edge (c, a), the facet opposite b
        if edge_marked[ef[1]] {
            let m2 = pool.midpoint(c, a);
            elements.extend([m, c, m2, a, m, m2]);
        } else {
            elements.extend([c, a, m]);
        }
        // [b, c, m] has refinement edge (b, c), the facet opposite a
        if edge_marked[ef[0]] {
            let m3 = pool.midpoint(b, c);
            elements.extend([m, b, m3, c, m, m3]);
        } else {
            elements.extend([b, c, m]);
        }
    }
    SimplicialMesh::new(2, pool.into_coords(), elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::initial_mesh;

    fn unit_square() -> SimplicialMesh {
        SimplicialMesh::new(
            2,
            vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
            vec![0, 1, 2, 0, 2, 3],
        )
        .unwrap()
    }

    #[test]
    fn empty_marking_is_identity() {
        let m = initial_mesh(2).unwrap();
        let r = nvb_refine(&m, &[]).unwrap();
        assert_eq!(r.num_elements(), m.num_elements());
        assert_eq!(r.connectivity(), m.connectivity());
    }

    #[test]
    fn marking_everything_bisects_everything() {
        let m = initial_mesh(2).unwrap();
        let all: Vec<usize> = (0..m.num_elements()).collect();
        let r = nvb_refine(&m, &all).unwrap();
        assert!(r.num_elements() >= 2 * m.num_elements());
        r.check_conformity().unwrap();
    }

    /// Expected child count when marking triangle 0 of the unit square,
    /// enumerated by hand: the shared diagonal is edge 1 of both triangles
    /// (opposite local vertex 1 in `[0,1,2]`, local vertex 2 in `[0,2,3]`).
    #[test]
    fn all_tag_assignments_stay_conforming() {
        let base = unit_square();
        for t0 in 0..3u8 {
            for t1 in 0..3u8 {
                let tags = [
                    RefinementEdgeTag::new(t0).unwrap(),
                    RefinementEdgeTag::new(t1).unwrap(),
                ];
                let m = apply_refinement_tags(&base, &tags).unwrap();
                let r = nvb_refine(&m, &[0]).unwrap();
                r.check_conformity().unwrap();
                let diag0 = t0 == 1;
                let diag1 = t1 == 2;
                let expected = match (diag0, diag1) {
                    (false, _) => 3,
                    (true, true) => 4,
                    (true, false) => 5,
                };
                assert_eq!(r.num_elements(), expected, "tags ({t0}, {t1})");
                assert!((r.total_volume() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn longest_edge_tags_on_right_triangles() {
        let m = unit_square();
        let tags = longest_edge_tags(&m).unwrap();
        // diagonal (0, 2) is opposite local vertex 1 in [0,1,2] and local
        // vertex 2 in [0,2,3]
        assert_eq!(tags[0].index(), 1);
        assert_eq!(tags[1].index(), 2);
        let relabelled = apply_refinement_tags(&m, &tags).unwrap();
        assert!(refinement_tags(&relabelled)
            .unwrap()
            .iter()
            .all(|t| t.index() == 2));
        assert_eq!(relabelled.element(0), &[2, 0, 1]);
    }

    #[test]
    fn rejects_3d() {
        let m = initial_mesh(3).unwrap();
        assert!(matches!(
            nvb_refine(&m, &[0]),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn repeated_corner_refinement_stays_shape_regular() {
        let mut m = initial_mesh(2).unwrap();
        let gamma0 = m.quality().gamma;
        for _ in 0..12 {
            let corner: Vec<usize> = (0..m.num_elements())
                .filter(|&t| {
                    m.element_points(t)
                        .iter()
                        .any(|p| p[0] == 0.0 && p[1] == 0.0)
                })
                .collect();
            m = nvb_refine(&m, &corner).unwrap();
            m.check_conformity().unwrap();
        }
        // NVB produces at most four similarity classes per initial triangle
        assert!(m.quality().gamma <= 2.0 * gamma0 + 1e-12);
        assert!((m.total_volume() - 3.0).abs() < 1e-12);
    }
}
