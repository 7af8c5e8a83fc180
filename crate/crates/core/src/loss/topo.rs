use super::{focal_loss, InfPolicy, LossReport, TaflConfig, TopoTerm};
use crate::cubical::{sublevel_persistence, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::transport::{diagonal_cost, transport, DiagramPoint};
use crate::volume::{field_from_mask, field_from_probs, LabelMask, ProbabilityField, Volume3D};

/// Dimension-`dim` points of a diagram ready for transport: essential deaths
/// replaced per `policy`, zero-length bars dropped, and the `top_k` most
/// persistent kept (ties broken by birth, then death).
pub fn diagram_points(
    d: &PersistenceDiagram,
    dim: usize,
    field: &Volume3D,
    policy: InfPolicy,
    top_k: usize,
) -> Vec<DiagramPoint> {
    let cap = match policy {
        InfPolicy::FiltrationMax => 1.0,
        InfPolicy::ObservedMax => field.max_value(),
        InfPolicy::Value(v) => v,
    };
    let mut points: Vec<DiagramPoint> = d
        .in_dim(dim)
        .map(|p| DiagramPoint::new(p.birth, if p.is_essential() { cap } else { p.death }))
        .filter(|q| q.death > q.birth)
        .collect();
    points.sort_by(|a, b| {
        b.persistence()
            .total_cmp(&a.persistence())
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
    points.truncate(top_k);
    points
}

fn selected_classes(cfg: &TaflConfig, num_classes: usize) -> Result<Vec<usize>> {
    let mut classes = match &cfg.classes {
        Some(c) => c.clone(),
        None => (1..num_classes).collect(),
    };
    classes.sort_unstable();
    classes.dedup();
    if let Some(&bad) = classes.iter().find(|&&c| c >= num_classes) {
        return Err(Error::ClassOutOfRange { class: bad, num_classes });
    }
    Ok(classes)
}

/// Sum over selected classes and homology dimensions of the transport cost
/// between the prediction's and the ground truth's persistence diagrams.
/// Terms are returned sorted by `(class, dim)` and summed in that order.
pub fn topological_loss(f: &ProbabilityField, g: &LabelMask, cfg: &TaflConfig) -> Result<(f64, Vec<TopoTerm>)> {
    cfg.validate()?;
    f.check_compatible(g)?;
    let mut dims = cfg.homology_dims.clone();
    dims.sort_unstable();
    dims.dedup();
    let max_dim = *dims.last().expect("validated non-empty");

    let mut terms = Vec::new();
    for class in selected_classes(cfg, g.num_classes())? {
        let pred_field = field_from_probs(f, class)?;
        let gt_field = field_from_mask(g, class)?;
        let pred = sublevel_persistence(&pred_field, max_dim)?;
        let gt = sublevel_persistence(&gt_field, max_dim)?;
        for &dim in &dims {
            let a = diagram_points(&pred, dim, &pred_field, cfg.inf_policy, cfg.top_k);
            let b = diagram_points(&gt, dim, &gt_field, cfg.inf_policy, cfg.top_k);
            let p = cfg.sinkhorn.p;
            let (distance, converged) = match (a.is_empty(), b.is_empty()) {
                (true, true) => (0.0, true),
                (true, false) => (diagonal_cost(&b, p), true),
                (false, true) => (diagonal_cost(&a, p), true),
                (false, false) => {
                    let t = transport(&a, &b, &cfg.sinkhorn)?;
                    (t.distance, t.plan.converged)
                }
            };
            terms.push(TopoTerm { class, dim, distance, converged, n1: a.len(), n2: b.len() });
        }
    }
    let total = terms.iter().fold(0.0, |acc, t| acc + t.distance);
    Ok((total, terms))
}

pub fn tafl_loss(f: &ProbabilityField, g: &LabelMask, cfg: &TaflConfig) -> Result<LossReport> {
    cfg.validate()?;
    let focal = focal_loss(f, g, &cfg.focal)?;
    let (topo_total, topo_breakdown) = topological_loss(f, g, cfg)?;
    Ok(LossReport { focal, lambda: cfg.lambda, topo_total, topo_breakdown, total: focal + cfg.lambda * topo_total })
}
