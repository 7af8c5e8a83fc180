use std::collections::HashMap;

use super::complex::CubicalGrid;
use super::{PersistenceDiagram, PersistencePair};
use crate::error::{Error, Result};
use crate::volume::Volume3D;

/// The complex with cells sorted into a filtration.
///
/// Order is `(value, dim, cell id)`: faces never follow their cofaces, and
/// ties among equal values fall back to `(z, y, x)` grid order.
struct Filtration {
    grid: CubicalGrid,
    values: Vec<f64>,
    order: Vec<u32>,
    rank: Vec<u32>,
}

impl Filtration {
    fn build(v: &Volume3D) -> Self {
        let grid = CubicalGrid::new(v.dims());
        let values = grid.cell_values(v);
        let dims: Vec<u8> = (0..grid.num_cells()).map(|id| grid.dim(id) as u8).collect();
        let mut order: Vec<u32> = (0..grid.num_cells() as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            values[a].total_cmp(&values[b]).then(dims[a].cmp(&dims[b])).then(a.cmp(&b))
        });
        let mut rank = vec![0u32; order.len()];
        for (r, &id) in order.iter().enumerate() {
            rank[id as usize] = r as u32;
        }
        Self { grid, values, order, rank }
    }

    fn cell_dim(&self, id: usize) -> usize {
        self.grid.dim(id)
    }

    fn value_at_rank(&self, r: u32) -> f64 {
        self.values[self.order[r as usize] as usize]
    }

    /// Boundary of a cell as ascending filtration ranks.
    fn boundary_ranks(&self, id: usize, scratch: &mut Vec<usize>) -> Vec<u32> {
        self.grid.boundary(id, scratch);
        let mut col: Vec<u32> = scratch.iter().map(|&f| self.rank[f]).collect();
        col.sort_unstable();
        col
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }
}

/// Dimension-0 pairs via union-find; components are keyed by the filtration
/// rank of their oldest vertex, so the smaller root survives a merge.
/// Returns the pairs and the ranks of edges that close a cycle.
fn zero_dim(f: &Filtration, pairs: &mut Vec<PersistencePair>) -> Vec<u32> {
    let n = f.order.len();
    let mut uf = UnionFind { parent: (0..n as u32).collect() };
    let mut cycle_edges = Vec::new();
    let mut scratch = Vec::with_capacity(6);
    for r in 0..n as u32 {
        let id = f.order[r as usize] as usize;
        if f.cell_dim(id) != 1 {
            continue;
        }
        f.grid.boundary(id, &mut scratch);
        let a = uf.find(f.rank[scratch[0]]);
        let b = uf.find(f.rank[scratch[1]]);
        if a == b {
            cycle_edges.push(r);
            continue;
        }
        let (elder, younger) = if a < b { (a, b) } else { (b, a) };
        uf.parent[younger as usize] = elder;
        let birth = f.value_at_rank(younger);
        let death = f.value_at_rank(r);
        if birth < death {
            pairs.push(PersistencePair::new(0, birth, death));
        }
    }
    for r in 0..n as u32 {
        let id = f.order[r as usize] as usize;
        if f.cell_dim(id) == 0 && uf.find(r) == r {
            pairs.push(PersistencePair::essential(0, f.value_at_rank(r)));
        }
    }
    cycle_edges
}

/// `a ^= b` over sorted rank lists.
fn add_column(a: &mut Vec<u32>, b: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&a[i..]);
    scratch.extend_from_slice(&b[j..]);
    std::mem::swap(a, scratch);
}

/// Result of reducing the boundary matrix of one dimension.
struct Reduction {
    /// lowest row rank -> column rank, for every non-zero reduced column
    pivots: HashMap<u32, u32>,
    /// columns that reduced to zero
    zero_columns: Vec<u32>,
}

/// Standard left-to-right reduction of the boundary matrix whose columns are
/// the `dim`-cells. Columns listed in `cleared` are known to reduce to zero
/// and are skipped.
fn reduce(f: &Filtration, dim: usize, cleared: Option<&HashMap<u32, u32>>) -> Reduction {
    let mut reduced: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut pivots = HashMap::new();
    let mut zero_columns = Vec::new();
    let mut scratch = Vec::with_capacity(6);
    let mut merge = Vec::new();
    for r in 0..f.order.len() as u32 {
        let id = f.order[r as usize] as usize;
        if f.cell_dim(id) != dim {
            continue;
        }
        if cleared.is_some_and(|c| c.contains_key(&r)) {
            continue;
        }
        let mut col = f.boundary_ranks(id, &mut scratch);
        while let Some(&low) = col.last() {
            match reduced.get(&low) {
                Some(other) => add_column(&mut col, other, &mut merge),
                None => break,
            }
        }
        match col.last() {
            Some(&low) => {
                pivots.insert(low, r);
                reduced.insert(low, col);
            }
            None => zero_columns.push(r),
        }
    }
    Reduction { pivots, zero_columns }
}

fn push_pairs(f: &Filtration, dim: usize, red: &Reduction, pairs: &mut Vec<PersistencePair>) {
    for (&low, &col) in &red.pivots {
        let birth = f.value_at_rank(low);
        let death = f.value_at_rank(col);
        if birth < death {
            pairs.push(PersistencePair::new(dim, birth, death));
        }
    }
}

/// Persistence diagram of the sublevel filtration of `v` in dimensions
/// `0..=max_dim`.
pub fn sublevel_persistence(v: &Volume3D, max_dim: usize) -> Result<PersistenceDiagram> {
    if max_dim > 2 {
        return Err(Error::InvalidMaxDim(max_dim));
    }
    let f = Filtration::build(v);
    let mut pairs = Vec::new();
    let cycle_edges = zero_dim(&f, &mut pairs);

    if max_dim >= 1 {
        let top = (max_dim == 2).then(|| reduce(&f, 3, None));
        let squares = reduce(&f, 2, top.as_ref().map(|t| &t.pivots));
        push_pairs(&f, 1, &squares, &mut pairs);
        for r in cycle_edges {
            if !squares.pivots.contains_key(&r) {
                pairs.push(PersistencePair::essential(1, f.value_at_rank(r)));
            }
        }
        if let Some(top) = top {
            push_pairs(&f, 2, &top, &mut pairs);
            for &r in &squares.zero_columns {
                if !top.pivots.contains_key(&r) {
                    pairs.push(PersistencePair::essential(2, f.value_at_rank(r)));
                }
            }
        }
    }

    Ok(PersistenceDiagram::new(pairs).with_source(v.dims(), (v.min_value(), v.max_value())))
}
