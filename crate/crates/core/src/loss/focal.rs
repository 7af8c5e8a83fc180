use super::{FocalConfig, Reduction};
use crate::error::Result;
use crate::volume::{LabelMask, ProbabilityField};

/// `-alpha * (1 - p)^gamma * ln(p)` for one voxel, with `p` clamped below.
pub fn focal_term(p_t: f64, cfg: &FocalConfig) -> f64 {
    let p = p_t.max(cfg.prob_floor);
    cfg.alpha * (1.0 - p).powf(cfg.gamma) * -p.ln()
}

/// d/dp of [`focal_term`] away from the clamp:
/// `-alpha * (-gamma (1 - p)^(gamma - 1) ln p + (1 - p)^gamma / p)`.
pub fn focal_term_grad(p: f64, cfg: &FocalConfig) -> f64 {
    let q = 1.0 - p;
    let log_part = if cfg.gamma == 0.0 { 0.0 } else { -cfg.gamma * q.powf(cfg.gamma - 1.0) * p.ln() };
    -cfg.alpha * (log_part + q.powf(cfg.gamma) / p)
}

fn true_class_probs<'a>(f: &'a ProbabilityField, g: &'a LabelMask) -> impl Iterator<Item = f64> + 'a {
    g.labels().iter().enumerate().map(move |(voxel, &label)| f.prob(voxel, label as usize))
}

fn reduction_factor(cfg: &FocalConfig, n: usize) -> f64 {
    match cfg.reduction {
        Reduction::Mean => 1.0 / n as f64,
        Reduction::Sum => 1.0,
    }
}

pub fn focal_loss(f: &ProbabilityField, g: &LabelMask, cfg: &FocalConfig) -> Result<f64> {
    cfg.validate()?;
    f.check_compatible(g)?;
    let sum = true_class_probs(f, g).fold(0.0, |acc, p| acc + focal_term(p, cfg));
    Ok(match cfg.reduction {
        Reduction::Mean => sum / g.labels().len() as f64,
        Reduction::Sum => sum,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocalGradient {
    /// Derivative of the reduced loss with respect to each voxel's `p_t`;
    /// zero at flagged voxels.
    pub grad: Vec<f64>,
    /// Voxels where `p_t` sits at the clamp or the derivative is undefined.
    pub flagged: Vec<usize>,
}

pub fn focal_loss_grad(f: &ProbabilityField, g: &LabelMask, cfg: &FocalConfig) -> Result<FocalGradient> {
    cfg.validate()?;
    f.check_compatible(g)?;
    let scale = reduction_factor(cfg, g.labels().len());
    let mut grad = Vec::with_capacity(g.labels().len());
    let mut flagged = Vec::new();
    for (voxel, p) in true_class_probs(f, g).enumerate() {
        let d = focal_term_grad(p, cfg);
        if p <= cfg.prob_floor || !d.is_finite() {
            flagged.push(voxel);
            grad.push(0.0);
        } else {
            grad.push(d * scale);
        }
    }
    Ok(FocalGradient { grad, flagged })
}
