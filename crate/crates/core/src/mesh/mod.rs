//! Simplicial meshes of dimension 2, 3 and 4.
//!
//! A [`SimplicialMesh`] owns vertex coordinates and element connectivity and
//! derives everything else on construction: element volumes and diameters,
//! the facet list with `T+`/`T-` adjacency, and the element-to-facet map.
//! Meshes are immutable once built; refinement produces new meshes.

mod geometry;
mod initial;
mod io;

pub use geometry::{
    barycentric_gradients, diameter, distance, edge_matrix, facet_measure, factorial,
    simplex_volume, DEGENERACY_TOLERANCE,
};
pub use initial::initial_mesh;
pub use io::{read_mesh, write_mesh};

use crate::error::{Error, Result};

pub const SUPPORTED_DIMS: [usize; 3] = [2, 3, 4];

pub fn check_dim(dim: usize) -> Result<()> {
    if SUPPORTED_DIMS.contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// An (n-1)-dimensional face of the mesh.
///
/// `plus` is the adjacent element with the smaller index; `minus` is the
/// other one, or `None` on the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    /// Sorted global vertex indices.
    pub vertices: Vec<usize>,
    pub plus: usize,
    pub minus: Option<usize>,
    pub measure: f64,
    pub diameter: f64,
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }
}

/// Shape regularity constant `max_T diam(T)^n / |T|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshQuality {
    pub gamma: f64,
}

#[derive(Clone, Debug)]
pub struct SimplicialMesh {
    dim: usize,
    coords: Vec<f64>,
    elements: Vec<usize>,
    volumes: Vec<f64>,
    diameters: Vec<f64>,
    facets: Vec<Facet>,
    /// `(dim + 1)` entries per element; entry `k` is the facet opposite
    /// local vertex `k`.
    element_facets: Vec<usize>,
}

impl SimplicialMesh {
    /// Builds a mesh from flat coordinate (`dim` per vertex) and connectivity
    /// (`dim + 1` per element) arrays.
    pub fn new(dim: usize, coords: Vec<f64>, elements: Vec<usize>) -> Result<Self> {
        check_dim(dim)?;
        let nv = dim + 1;
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionError {
                expected: dim * (coords.len() / dim + 1),
                actual: coords.len(),
            });
        }
        if !elements.len().is_multiple_of(nv) {
            return Err(Error::DimensionError {
                expected: nv * (elements.len() / nv + 1),
                actual: elements.len(),
            });
        }
        let num_vertices = coords.len() / dim;
        let mut volumes = Vec::with_capacity(elements.len() / nv);
        let mut diameters = Vec::with_capacity(elements.len() / nv);
        for el in elements.chunks_exact(nv) {
            for (k, &v) in el.iter().enumerate() {
                if v >= num_vertices {
                    return Err(Error::DimensionError {
                        expected: num_vertices,
                        actual: v,
                    });
                }
                if el[..k].contains(&v) {
                    return Err(Error::DegenerateSimplex {
                        measure: 0.0,
                        tolerance: DEGENERACY_TOLERANCE,
                    });
                }
            }
            let pts: Vec<&[f64]> = el
                .iter()
                .map(|&v| &coords[v * dim..(v + 1) * dim])
                .collect();
            volumes.push(simplex_volume(&pts)?);
            diameters.push(diameter(&pts));
        }
        let mut mesh = SimplicialMesh {
            dim,
            coords,
            elements,
            volumes,
            diameters,
            facets: Vec::new(),
            element_facets: Vec::new(),
        };
        let (facets, element_facets) = build_facets(&mesh)?;
        mesh.facets = facets;
        mesh.element_facets = element_facets;
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn num_elements(&self) -> usize {
        self.volumes.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn connectivity(&self) -> &[usize] {
        &self.elements
    }

    pub fn vertex(&self, v: usize) -> &[f64] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    pub fn element(&self, t: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.elements[t * nv..(t + 1) * nv]
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = &[usize]> {
        self.elements.chunks_exact(self.dim + 1)
    }

    pub fn element_points(&self, t: usize) -> Vec<&[f64]> {
        self.element(t).iter().map(|&v| self.vertex(v)).collect()
    }

    pub fn volume(&self, t: usize) -> f64 {
        self.volumes[t]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn diameter(&self, t: usize) -> f64 {
        self.diameters[t]
    }

    pub fn diameters(&self) -> &[f64] {
        &self.diameters
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet(&self, e: usize) -> &Facet {
        &self.facets[e]
    }

    /// Facets of element `t`; entry `k` is opposite local vertex `k`.
    pub fn element_facets(&self, t: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.element_facets[t * nv..(t + 1) * nv]
    }

    pub fn num_boundary_facets(&self) -> usize {
        self.facets.iter().filter(|f| f.is_boundary()).count()
    }

    pub fn num_interior_facets(&self) -> usize {
        self.facets.len() - self.num_boundary_facets()
    }

    /// Flags for vertices lying on a boundary facet.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_vertices()];
        for f in self.facets.iter().filter(|f| f.is_boundary()) {
            for &v in &f.vertices {
                flags[v] = true;
            }
        }
        flags
    }

    pub fn quality(&self) -> MeshQuality {
        let n = self.dim as i32;
        let gamma = self
            .volumes
            .iter()
            .zip(&self.diameters)
            .map(|(vol, h)| h.powi(n) / vol)
            .fold(0.0, f64::max);
        MeshQuality { gamma }
    }

    /// Largest ratio `h_T' / h_T` over facet-adjacent element pairs.
    pub fn max_neighbor_ratio(&self) -> f64 {
        self.facets
            .iter()
            .filter_map(|f| f.minus.map(|m| (f.plus, m)))
            .map(|(a, b)| {
                let (ha, hb) = (self.diameters[a], self.diameters[b]);
                ha.max(hb) / ha.min(hb)
            })
            .fold(1.0, f64::max)
    }

    pub fn min_diameter(&self) -> f64 {
        self.diameters.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }

    /// Rejects meshes with hanging nodes: no vertex may lie on a boundary
    /// facet unless it is one of the facet's own vertices. Facet adjacency
    /// counts are already enforced on construction.
    pub fn check_conformity(&self) -> Result<()> {
        let dim = self.dim;
        let mut order: Vec<usize> = (0..self.num_vertices()).collect();
        order.sort_by(|&a, &b| self.vertex(a)[0].total_cmp(&self.vertex(b)[0]));
        let xs: Vec<f64> = order.iter().map(|&v| self.vertex(v)[0]).collect();
        for f in self.facets.iter().filter(|f| f.is_boundary()) {
            let pts: Vec<&[f64]> = f.vertices.iter().map(|&v| self.vertex(v)).collect();
            let eps = 1e-10 * f.diameter;
            let mut lo = vec![f64::INFINITY; dim];
            let mut hi = vec![f64::NEG_INFINITY; dim];
            for p in &pts {
                for k in 0..dim {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            let start = xs.partition_point(|&x| x < lo[0] - eps);
            let end = xs.partition_point(|&x| x <= hi[0] + eps);
            for &v in &order[start..end] {
                if f.vertices.contains(&v) {
                    continue;
                }
                let p = self.vertex(v);
                if (0..dim).any(|k| p[k] < lo[k] - eps || p[k] > hi[k] + eps) {
                    continue;
                }
                if point_in_simplex(&pts, p, eps) {
                    return Err(Error::NonConforming(format!(
                        "vertex {v} lies on facet {:?}",
                        f.vertices
                    )));
                }
            }
        }
        Ok(())
    }

    /// The same mesh with elements relabelled: new element `i` is old element
    /// `perm[i]`.
    pub fn permute_elements(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_elements() {
            return Err(Error::DimensionError {
                expected: self.num_elements(),
                actual: perm.len(),
            });
        }
        let elements = perm
            .iter()
            .flat_map(|&t| self.element(t).iter().copied())
            .collect();
        SimplicialMesh::new(self.dim, self.coords.clone(), elements)
    }

    /// Uniformly scales all coordinates.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let coords = self.coords.iter().map(|c| c * factor).collect();
        SimplicialMesh::new(self.dim, coords, self.elements.clone())
    }
}

/// Whether `p` lies in the closed simplex spanned by `pts` (any number of
/// points up to the ambient dimension plus one), within `eps`.
fn point_in_simplex(pts: &[&[f64]], p: &[f64], eps: f64) -> bool {
    let g = edge_matrix(pts);
    let rhs = nalgebra::DVector::from_iterator(p.len(), p.iter().zip(pts[0]).map(|(a, b)| a - b));
    let gram = g.transpose() * &g;
    let Some(lam) = gram.lu().solve(&(g.transpose() * &rhs)) else {
        return false;
    };
    let residual = (&g * &lam - rhs).norm();
    if residual > eps {
        return false;
    }
    let tol = 1e-8;
    lam.iter().all(|&l| l >= -tol) && lam.sum() <= 1.0 + tol
}

/// Recomputes the facet list of `mesh`.
///
/// Facets are sorted by their sorted vertex tuple; `T+` is the adjacent
/// element with the smaller index.
pub fn enumerate_facets(mesh: &SimplicialMesh) -> Result<Vec<Facet>> {
    build_facets(mesh).map(|(facets, _)| facets)
}

fn build_facets(mesh: &SimplicialMesh) -> Result<(Vec<Facet>, Vec<usize>)> {
    let dim = mesh.dim;
    let nv = dim + 1;
    let ne = mesh.num_elements();
    // (sorted key padded with usize::MAX, element, local index)
    let mut keyed: Vec<([usize; 4], u32, u8)> = Vec::with_capacity(ne * nv);
    for t in 0..ne {
        let el = mesh.element(t);
        for k in 0..nv {
            let mut key = [usize::MAX; 4];
            let mut j = 0;
            for (i, &v) in el.iter().enumerate() {
                if i != k {
                    key[j] = v;
                    j += 1;
                }
            }
            key[..dim].sort_unstable();
            keyed.push((key, t as u32, k as u8));
        }
    }
    keyed.sort_unstable();

    let mut facets = Vec::with_capacity(keyed.len() / 2 + 1);
    let mut element_facets = vec![usize::MAX; ne * nv];
    let mut i = 0;
    while i < keyed.len() {
        let key = keyed[i].0;
        let mut j = i + 1;
        while j < keyed.len() && keyed[j].0 == key {
            j += 1;
        }
        let vertices = key[..dim].to_vec();
        if j - i > 2 {
            return Err(Error::NonManifoldMesh {
                facet: vertices,
                count: j - i,
            });
        }
        let index = facets.len();
        for &(_, t, k) in &keyed[i..j] {
            element_facets[t as usize * nv + k as usize] = index;
        }
        let pts: Vec<&[f64]> = vertices.iter().map(|&v| mesh.vertex(v)).collect();
        facets.push(Facet {
            plus: keyed[i].1 as usize,
            minus: (j - i == 2).then(|| keyed[i + 1].1 as usize),
            measure: facet_measure(&pts)?,
            diameter: diameter(&pts),
            vertices,
        });
        i = j;
    }
    Ok((facets, element_facets))
}
