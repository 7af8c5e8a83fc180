//! Topology-aware focal loss: `total = focal + lambda * topo`.

mod focal;
mod topo;

pub use focal::{focal_loss, focal_loss_grad, focal_term, focal_term_grad, FocalGradient};
pub use topo::{diagram_points, tafl_loss, topological_loss};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transport::{CardinalityMode, SinkhornConfig, Stabilization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    #[default]
    Mean,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FocalConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub reduction: Reduction,
    /// Lower clamp on `p_t` before taking the log.
    pub prob_floor: f64,
}

impl Default for FocalConfig {
    fn default() -> Self {
        Self { alpha: 1.0, gamma: 2.0, reduction: Reduction::Mean, prob_floor: 1e-12 }
    }
}

impl FocalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig("alpha must be positive".into()));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig("gamma must be non-negative".into()));
        }
        if !(self.prob_floor > 0.0 && self.prob_floor < 1.0) {
            return Err(Error::InvalidConfig("prob_floor must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// What an essential (never dying) class is truncated to before transport.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfPolicy {
    /// Upper end of the filtration range: 1.0 for `1 - p` and `1 - mask` fields.
    #[default]
    FiltrationMax,
    /// Largest voxel value actually present in the field.
    ObservedMax,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaflConfig {
    pub lambda: f64,
    pub focal: FocalConfig,
    pub sinkhorn: SinkhornConfig,
    pub homology_dims: Vec<usize>,
    /// Classes to compare; `None` means every class except background 0.
    pub classes: Option<Vec<usize>>,
    /// Pairs kept per diagram, most persistent first.
    pub top_k: usize,
    pub inf_policy: InfPolicy,
}

impl Default for TaflConfig {
    fn default() -> Self {
        Self {
            lambda: 0.001,
            focal: FocalConfig::default(),
            sinkhorn: SinkhornConfig {
                stabilization: Stabilization::LogDomain,
                cardinality: CardinalityMode::DiagonalAugmented,
                ..SinkhornConfig::default()
            },
            homology_dims: vec![0, 1, 2],
            classes: None,
            top_k: 128,
            inf_policy: InfPolicy::FiltrationMax,
        }
    }
}

impl TaflConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig("lambda must be non-negative".into()));
        }
        if self.top_k == 0 {
            return Err(Error::InvalidConfig("top_k must be at least 1".into()));
        }
        if self.homology_dims.is_empty() || self.homology_dims.iter().any(|&d| d > 2) {
            return Err(Error::InvalidConfig("homology_dims must be a non-empty subset of {0, 1, 2}".into()));
        }
        if let InfPolicy::Value(v) = self.inf_policy {
            if !v.is_finite() {
                return Err(Error::InvalidConfig("inf replacement must be finite".into()));
            }
        }
        self.focal.validate()?;
        self.sinkhorn.validate()
    }
}

/// One `(class, dim)` contribution to the topological term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopoTerm {
    pub class: usize,
    pub dim: usize,
    pub distance: f64,
    pub converged: bool,
    /// Points in the predicted and ground-truth diagrams after truncation.
    pub n1: usize,
    pub n2: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub focal: f64,
    pub lambda: f64,
    pub topo_total: f64,
    pub topo_breakdown: Vec<TopoTerm>,
    pub total: f64,
}
