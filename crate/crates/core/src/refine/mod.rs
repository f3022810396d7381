//! Mesh refinement and adaptivity.
//!
//! * [`uniform_refine`]: every element into `2^n` children. Triangles are
//!   bisected twice by newest vertex bisection; tetrahedra and 4-simplices
//!   use Freudenthal's (Bey's) midpoint subdivision.
//! * [`nvb_refine`]: conforming newest vertex bisection of marked triangles.
//! * [`dorfler_mark`]: bulk-criterion marking.
//! * [`singular_indicator`]: `||(1 - Q) w||_{1,T}^2` for the corner
//!   singularity `w = r^{2/3} cos(2/3 phi - pi/6)` of the L-shape.

mod freudenthal;
mod indicator;
mod marking;
mod nvb;
pub mod quadrature;

use std::collections::HashMap;

pub use freudenthal::{freudenthal_children, freudenthal_refine};
pub use indicator::{projection_error_indicator, singular_function, singular_indicator};
pub use marking::{dorfler_mark, IndicatorField, DEFAULT_THETA};
pub use nvb::{
    apply_refinement_tags, longest_edge_tags, nvb_refine, refinement_tags, RefinementEdgeTag,
};

use crate::error::Result;
use crate::mesh::SimplicialMesh;

/// Splits every element into `2^n` children of equal volume.
pub fn uniform_refine(mesh: &SimplicialMesh) -> Result<SimplicialMesh> {
    match mesh.dim() {
        2 => nvb::nvb_refine_all(mesh),
        _ => freudenthal_refine(mesh),
    }
}

/// Vertex coordinates of a mesh under refinement, with one shared midpoint
/// per edge.
pub(crate) struct MidpointPool {
    dim: usize,
    coords: Vec<f64>,
    midpoints: HashMap<(usize, usize), usize>,
}

impl MidpointPool {
    pub(crate) fn new(mesh: &SimplicialMesh) -> Self {
        MidpointPool {
            dim: mesh.dim(),
            coords: mesh.coords().to_vec(),
            midpoints: HashMap::new(),
        }
    }

    pub(crate) fn midpoint(&mut self, a: usize, b: usize) -> usize {
        if a == b {
            return a;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&m) = self.midpoints.get(&key) {
            return m;
        }
        let m = self.coords.len() / self.dim;
        for k in 0..self.dim {
            let c = 0.5 * (self.coords[a * self.dim + k] + self.coords[b * self.dim + k]);
            self.coords.push(c);
        }
        self.midpoints.insert(key, m);
        m
    }

    pub(crate) fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}
