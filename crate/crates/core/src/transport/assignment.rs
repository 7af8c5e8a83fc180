//! Exact minimum-cost perfect matching (Hungarian method with potentials).

use super::CostMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub cost: f64,
    /// `matching[i]` is the column assigned to row `i`.
    pub matching: Vec<usize>,
}

/// O(n^3) shortest augmenting path formulation. Rows are inserted one at a
/// time; `row_pot`/`col_pot` keep reduced costs non-negative.
pub fn exact_assignment(c: &CostMatrix) -> Result<Assignment> {
    if c.rows() != c.cols() {
        return Err(Error::NotSquare(c.rows(), c.cols()));
    }
    let n = c.rows();
    // 1-based with column 0 as the virtual source.
    let mut row_pot = vec![0.0f64; n + 1];
    let mut col_pot = vec![0.0f64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0;
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = c.get(i0 - 1, j - 1) - row_pot[i0] - col_pot[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    row_pot[col_owner[j]] += delta;
                    col_pot[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut matching = vec![0; n];
    for j in 1..=n {
        matching[col_owner[j] - 1] = j - 1;
    }
    let cost = matching.iter().enumerate().map(|(i, &j)| c.get(i, j)).sum();
    Ok(Assignment { cost, matching })
}
