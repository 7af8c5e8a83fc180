//! Entropic optimal transport between persistence diagrams.
//!
//! The distance is `sum(P * C)` where `C[i][j] = |b_i - b'_j|^p + |d_i - d'_j|^p`
//! and `P = diag(u) K diag(v)` is the Sinkhorn scaling of `K = exp(-C / mu)`
//! started from uniform `u`, `v`. No p-th root is taken.

mod assignment;
mod sinkhorn;

pub use assignment::{exact_assignment, Assignment};
pub use sinkhorn::sinkhorn_plan;

use serde::{Deserialize, Serialize};

use crate::cubical::PersistencePair;
use crate::error::{Error, Result};

/// A (birth, death) point with finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    /// Closest point on the diagonal `birth == death`.
    pub fn diagonal_projection(&self) -> Self {
        let mid = (self.birth + self.death) / 2.0;
        Self { birth: mid, death: mid }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

impl From<(f64, f64)> for DiagramPoint {
    fn from((birth, death): (f64, f64)) -> Self {
        Self { birth, death }
    }
}

impl From<&PersistencePair> for DiagramPoint {
    fn from(p: &PersistencePair) -> Self {
        Self { birth: p.birth, death: p.death }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stabilization {
    #[default]
    Naive,
    LogDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CardinalityMode {
    /// Run on the rectangular `N x M` problem exactly as given.
    #[default]
    PaperLiteral,
    /// Pad both diagrams with the other's diagonal projections first.
    DiagonalAugmented,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SinkhornConfig {
    /// Entropic regularization.
    pub mu: f64,
    /// Added to every scaling denominator (naive mode only).
    pub epsilon: f64,
    pub max_iter: usize,
    /// Absolute tolerance on successive `u` and `v` iterates.
    pub tol: f64,
    /// Cost exponent.
    pub p: f64,
    pub stabilization: Stabilization,
    pub cardinality: CardinalityMode,
}

impl Default for SinkhornConfig {
    fn default() -> Self {
        Self {
            mu: 0.01,
            epsilon: 1e-99,
            max_iter: 1000,
            tol: 1e-6,
            p: 2.0,
            stabilization: Stabilization::Naive,
            cardinality: CardinalityMode::PaperLiteral,
        }
    }
}

impl SinkhornConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad("mu must be positive and finite");
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad("tol must be positive");
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return bad("p must be at least 1");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be non-negative");
        }
        Ok(())
    }
}

/// Dense row-major matrix of non-negative finite costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, actual: data.len() });
        }
        if data.iter().any(|&c| !(c >= 0.0 && c.is_finite())) {
            return Err(Error::InvalidConfig("cost entries must be finite and non-negative".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidConfig("ragged cost matrix".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.data.iter().map(|&c| c * s).collect())
    }

    pub fn transposed(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl TransportPlan {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.data.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// `sum(P * C)`.
    pub fn cost(&self, c: &CostMatrix) -> f64 {
        self.data.iter().zip(c.as_slice()).map(|(p, c)| p * c).sum()
    }
}

fn check_points(points: &[DiagramPoint]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    if let Some(i) = points.iter().position(|q| !(q.birth.is_finite() && q.death.is_finite())) {
        return Err(Error::NonFiniteCoordinate(i));
    }
    Ok(())
}

#[inline]
fn point_cost(a: &DiagramPoint, b: &DiagramPoint, p: f64) -> f64 {
    (a.birth - b.birth).abs().powf(p) + (a.death - b.death).abs().powf(p)
}

pub fn cost_matrix(d1: &[DiagramPoint], d2: &[DiagramPoint], p: f64) -> Result<CostMatrix> {
    check_points(d1)?;
    check_points(d2)?;
    let data = d1.iter().flat_map(|a| d2.iter().map(move |b| point_cost(a, b, p))).collect();
    CostMatrix::new(d1.len(), d2.len(), data)
}

/// Pads `d1` with the projections of `d2` and vice versa, giving two lists
/// of length `N + M`: `d1 ++ proj(d2)` and `d2 ++ proj(d1)`.
pub fn augment_diagonal(d1: &[DiagramPoint], d2: &[DiagramPoint]) -> Result<(Vec<DiagramPoint>, Vec<DiagramPoint>)> {
    check_points(d1)?;
    check_points(d2)?;
    let left = d1.iter().copied().chain(d2.iter().map(DiagramPoint::diagonal_projection)).collect();
    let right = d2.iter().copied().chain(d1.iter().map(DiagramPoint::diagonal_projection)).collect();
    Ok((left, right))
}

/// Cost matrix of the augmented problem. Projection-to-projection entries
/// (the lower-right `M x N` block) are zero: moving mass along the diagonal
/// is free.
pub fn augmented_cost_matrix(d1: &[DiagramPoint], d2: &[DiagramPoint], p: f64) -> Result<CostMatrix> {
    let (left, right) = augment_diagonal(d1, d2)?;
    let (n, m) = (d1.len(), d2.len());
    let size = n + m;
    let mut data = Vec::with_capacity(size * size);
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            data.push(if i >= n && j >= m { 0.0 } else { point_cost(a, b, p) });
        }
    }
    CostMatrix::new(size, size, data)
}

/// Everything computed for one diagram pair.
#[derive(Debug, Clone)]
pub struct Transport {
    pub cost: CostMatrix,
    pub plan: TransportPlan,
    pub distance: f64,
}

pub fn transport(d1: &[DiagramPoint], d2: &[DiagramPoint], cfg: &SinkhornConfig) -> Result<Transport> {
    cfg.validate()?;
    let cost = match cfg.cardinality {
        CardinalityMode::PaperLiteral => cost_matrix(d1, d2, cfg.p)?,
        CardinalityMode::DiagonalAugmented => augmented_cost_matrix(d1, d2, cfg.p)?,
    };
    let plan = sinkhorn_plan(&cost, cfg)?;
    let distance = plan.cost(&cost);
    Ok(Transport { cost, plan, distance })
}

pub fn wasserstein_distance(d1: &[DiagramPoint], d2: &[DiagramPoint], cfg: &SinkhornConfig) -> Result<f64> {
    Ok(transport(d1, d2, cfg)?.distance)
}

/// Cost of sending every point to its own diagonal projection:
/// `sum 2 * |(d - b) / 2|^p`.
pub fn diagonal_cost(points: &[DiagramPoint], p: f64) -> f64 {
    points.iter().map(|q| point_cost(q, &q.diagonal_projection(), p)).sum()
}
