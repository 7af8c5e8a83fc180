//! Brute-force Betti numbers of a single sublevel complex.
//!
//! Shares nothing with the persistence path: cells are enumerated directly,
//! membership is tested against the voxels, and ranks come from dense
//! GF(2) elimination over bit-packed columns.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::volume::Volume3D;

pub const ORACLE_CELL_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Betti {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
}

impl Betti {
    pub fn as_array(&self) -> [usize; 3] {
        [self.b0, self.b1, self.b2]
    }
}

impl std::fmt::Display for Betti {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {}", self.b0, self.b1, self.b2)
    }
}

pub fn betti_oracle(v: &Volume3D, threshold: f64, max_dim: usize) -> Result<Betti> {
    betti_oracle_with_cap(v, threshold, max_dim, ORACLE_CELL_CAP)
}

type Cell = (usize, usize, usize);

fn cell_dim(c: Cell) -> usize {
    (c.0 % 2) + (c.1 % 2) + (c.2 % 2)
}

fn faces(c: Cell) -> Vec<Cell> {
    let mut out = Vec::with_capacity(6);
    if c.0 % 2 == 1 {
        out.push((c.0 - 1, c.1, c.2));
        out.push((c.0 + 1, c.1, c.2));
    }
    if c.1 % 2 == 1 {
        out.push((c.0, c.1 - 1, c.2));
        out.push((c.0, c.1 + 1, c.2));
    }
    if c.2 % 2 == 1 {
        out.push((c.0, c.1, c.2 - 1));
        out.push((c.0, c.1, c.2 + 1));
    }
    out
}

/// Betti numbers of the union of closed voxels with value `<= threshold`.
pub fn betti_oracle_with_cap(v: &Volume3D, threshold: f64, max_dim: usize, cap: usize) -> Result<Betti> {
    if max_dim > 2 {
        return Err(Error::InvalidMaxDim(max_dim));
    }
    let dims = v.dims();

    // Closure of the active voxels: every cell of each active voxel.
    let mut index: [HashMap<Cell, usize>; 4] = Default::default();
    let mut cells: [Vec<Cell>; 4] = Default::default();
    for z in 0..dims.nz {
        for y in 0..dims.ny {
            for x in 0..dims.nx {
                if v.get(x, y, z) > threshold {
                    continue;
                }
                for dz in 0..3 {
                    for dy in 0..3 {
                        for dx in 0..3 {
                            let c = (2 * x + dx, 2 * y + dy, 2 * z + dz);
                            let d = cell_dim(c);
                            if !index[d].contains_key(&c) {
                                index[d].insert(c, cells[d].len());
                                cells[d].push(c);
                            }
                        }
                    }
                }
                let total: usize = cells.iter().map(Vec::len).sum();
                if total > cap {
                    return Err(Error::ComplexTooLarge { cells: total, cap });
                }
            }
        }
    }

    let counts: Vec<usize> = cells.iter().map(Vec::len).collect();
    // rank of the boundary map from k-cells to (k-1)-cells, k = 1..=3
    let mut ranks = [0usize; 5];
    for k in 1..=(max_dim + 1).min(3) {
        let columns = cells[k].iter().map(|&c| faces(c).into_iter().map(|f| index[k - 1][&f]).collect::<Vec<_>>());
        ranks[k] = gf2_rank(counts[k - 1], columns);
    }
    let betti = |k: usize| counts[k] - ranks[k] - ranks[k + 1];
    let result = Betti {
        b0: betti(0),
        b1: if max_dim >= 1 { betti(1) } else { 0 },
        b2: if max_dim >= 2 { betti(2) } else { 0 },
    };

    let flood = voxel_components(v, threshold);
    if flood != result.b0 {
        return Err(Error::OracleInconsistent { rank_b0: result.b0, flood_b0: flood });
    }
    Ok(result)
}

/// Rank over GF(2) of a matrix given as columns of row indices.
fn gf2_rank(rows: usize, columns: impl Iterator<Item = Vec<usize>>) -> usize {
    let words = rows.div_ceil(64);
    let mut basis: Vec<Option<Vec<u64>>> = vec![None; rows];
    let mut rank = 0;
    for col in columns {
        let mut bits = vec![0u64; words];
        for r in col {
            bits[r / 64] ^= 1 << (r % 64);
        }
        while let Some(top) = highest_bit(&bits) {
            match &basis[top] {
                Some(b) => {
                    for (w, bw) in bits.iter_mut().zip(b) {
                        *w ^= bw;
                    }
                }
                None => {
                    basis[top] = Some(bits);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .rev()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Connected components of voxels with value `<= threshold`, where voxels
/// touching at a face, edge or corner are adjacent.
pub fn voxel_components(v: &Volume3D, threshold: f64) -> usize {
    let dims = v.dims();
    let active: Vec<bool> = v.values().iter().map(|&x| x <= threshold).collect();
    let mut seen = vec![false; active.len()];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..active.len() {
        if !active[start] || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y, z) = dims.coords(i);
            for nz in z.saturating_sub(1)..=(z + 1).min(dims.nz - 1) {
                for ny in y.saturating_sub(1)..=(y + 1).min(dims.ny - 1) {
                    for nx in x.saturating_sub(1)..=(x + 1).min(dims.nx - 1) {
                        let j = dims.index(nx, ny, nz);
                        if active[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::Dims;

    fn vol(nx: usize, ny: usize, nz: usize, data: Vec<f64>) -> Volume3D {
        Volume3D::new(Dims::new(nx, ny, nz).unwrap(), data).unwrap()
    }

    #[test]
    fn single_voxel_is_contractible() {
        let b = betti_oracle(&vol(1, 1, 1, vec![0.0]), 0.5, 2).unwrap();
        assert_eq!(b.as_array(), [1, 0, 0]);
    }

    #[test]
    fn empty_sublevel_set() {
        let b = betti_oracle(&vol(2, 2, 2, vec![1.0; 8]), 0.5, 2).unwrap();
        assert_eq!(b.as_array(), [0, 0, 0]);
    }

    #[test]
    fn ring_and_void() {
        let mut ring = vec![0.0; 9];
        ring[4] = 1.0;
        assert_eq!(betti_oracle(&vol(3, 3, 1, ring), 0.5, 2).unwrap().as_array(), [1, 1, 0]);
        let mut shell = vec![0.0; 27];
        shell[13] = 1.0;
        assert_eq!(betti_oracle(&vol(3, 3, 3, shell), 0.5, 2).unwrap().as_array(), [1, 0, 1]);
    }

    #[test]
    fn cell_cap_enforced() {
        let v = vol(10, 10, 10, vec![0.0; 1000]);
        let r = betti_oracle_with_cap(&v, 0.5, 2, 1000);
        assert!(matches!(r, Err(Error::ComplexTooLarge { cap: 1000, .. })));
    }

    #[test]
    fn rank_of_small_matrix() {
        // Columns {0,1}, {1,2}, {0,2} are dependent over GF(2).
        let cols = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        assert_eq!(gf2_rank(3, cols.into_iter()), 2);
    }

    #[test]
    fn flood_fill_counts_diagonal_contact() {
        let v = vol(3, 1, 1, vec![0.0, 1.0, 0.0]);
        assert_eq!(voxel_components(&v, 0.5), 2);
        let v = vol(2, 2, 1, vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(voxel_components(&v, 0.5), 1);
    }
}
