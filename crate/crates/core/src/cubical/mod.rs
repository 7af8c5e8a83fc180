//! Sublevel-set persistent homology of 3D volumes.
//!
//! Voxels are the top-dimensional cubes of a cubical complex; every lower
//! cell takes the minimum value of the voxels it bounds. Dimension 0 is
//! computed with union-find under the elder rule, dimensions 1 and 2 by
//! mod-2 column reduction of the boundary matrices with clearing.
//! [`betti_oracle`] is an independent dense-rank check for small inputs.

mod complex;
mod csv;
mod oracle;
mod persistence;

pub use complex::CubicalGrid;
pub use csv::{read_diagram, write_diagram, parse_diagram, format_diagram};
pub use oracle::{betti_oracle, betti_oracle_with_cap, voxel_components, Betti, ORACLE_CELL_CAP};
pub use persistence::sublevel_persistence;

use std::cmp::Ordering;

use crate::volume::Dims;

/// One bar of a barcode. `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        Self { dim, birth, death }
    }

    pub fn essential(dim: usize, birth: f64) -> Self {
        Self { dim, birth, death: f64::INFINITY }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    /// Whether the class is alive in the sublevel complex at `t`.
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// Multiset of persistence pairs, kept sorted by `(dim, birth, death)`.
///
/// Equality compares the pairs only; `source_dims` and `value_range` are
/// informational.
#[derive(Debug, Clone, Default)]
pub struct PersistenceDiagram {
    pairs: Vec<PersistencePair>,
    source_dims: Option<Dims>,
    value_range: Option<(f64, f64)>,
}

impl PartialEq for PersistenceDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
    }
}

impl PersistenceDiagram {
    pub fn new(mut pairs: Vec<PersistencePair>) -> Self {
        pairs.sort_by(PersistencePair::sort_key_cmp);
        Self { pairs, source_dims: None, value_range: None }
    }

    pub(crate) fn with_source(mut self, dims: Dims, range: (f64, f64)) -> Self {
        self.source_dims = Some(dims);
        self.value_range = Some(range);
        self
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn source_dims(&self) -> Option<Dims> {
        self.source_dims
    }

    pub fn value_range(&self) -> Option<(f64, f64)> {
        self.value_range
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    pub fn count_in_dim(&self, dim: usize) -> usize {
        self.in_dim(dim).count()
    }

    /// Betti numbers of the sublevel complex at `t` read off the barcode.
    pub fn betti_at(&self, t: f64) -> [usize; 3] {
        let mut b = [0; 3];
        for p in self.pairs.iter().filter(|p| p.alive_at(t)) {
            if p.dim < 3 {
                b[p.dim] += 1;
            }
        }
        b
    }
}
