use std::fs;
use std::io::Write;

use tafl_core::cubical::{betti_oracle, read_diagram, sublevel_persistence, write_diagram};
use tafl_core::fmt::g17;
use tafl_core::loss::{tafl_loss, TaflConfig};
use tafl_core::transport::{transport, DiagramPoint, SinkhornConfig};
use tafl_core::volume::{
    generate_phantom, load_mask, load_volume, save_mask, save_volume, Dims, LabelMask, PhantomKind, PhantomParams,
    ProbabilityField,
};

use crate::{json, BettiArgs, DistArgs, Failure, GenArgs, LossArgs, MaskArgs, PdArgs};

type Result<T = ()> = std::result::Result<T, Failure>;

pub fn gen(a: GenArgs) -> Result {
    let (nx, ny, nz) = match (a.dims, a.kind) {
        (Some(d), _) => d,
        (None, PhantomKind::Fig2Line) => (5, 1, 1),
        (None, kind) => return Err(Failure::usage(format!("--dims is required for {kind}"))),
    };
    let mut params: PhantomParams = a.params.into_iter().collect();
    if let Some(v) = a.value {
        params.insert("value".into(), v);
    }
    let v = generate_phantom(a.kind, Dims::new(nx, ny, nz)?, &params)?;
    save_volume(&v, &a.out)?;
    Ok(())
}

pub fn mask(a: MaskArgs) -> Result {
    let v = load_volume(&a.input)?;
    let m = LabelMask::threshold(&v, a.threshold);
    save_mask(&m, &a.out)?;
    if let Some(prefix) = a.one_hot {
        let f = ProbabilityField::one_hot(&m);
        for class in 0..f.num_classes() {
            save_volume(&f.class_volume(class)?, format!("{prefix}{class}.vol"))?;
        }
    }
    Ok(())
}

pub fn pd(a: PdArgs) -> Result {
    let v = load_volume(&a.input)?;
    let d = sublevel_persistence(&v, a.max_dim)?;
    write_diagram(&d, &a.out)?;
    let mut out = std::io::stdout().lock();
    for k in 0..=a.max_dim {
        writeln!(out, "dim={k} count={}", d.count_in_dim(k))?;
    }
    Ok(())
}

fn load_points(path: &std::path::Path, dim: Option<usize>, inf_value: Option<f64>) -> Result<Vec<DiagramPoint>> {
    let d = read_diagram(path)?;
    d.pairs()
        .iter()
        .filter(|p| dim.is_none_or(|k| p.dim == k))
        .map(|p| match (p.is_essential(), inf_value) {
            (false, _) => Ok(DiagramPoint::new(p.birth, p.death)),
            (true, Some(v)) => Ok(DiagramPoint::new(p.birth, v)),
            (true, None) => Err(Failure::usage(format!(
                "{} has essential pairs; pass --inf-value to give them a death",
                path.display()
            ))),
        })
        .collect()
}

pub fn dist(a: DistArgs) -> Result {
    let cfg = SinkhornConfig {
        mu: a.mu,
        epsilon: a.epsilon,
        max_iter: a.max_iter,
        tol: a.tol,
        p: a.p,
        stabilization: a.stabilization,
        cardinality: a.mode,
    };
    let d1 = load_points(&a.a, a.dim, a.inf_value)?;
    let d2 = load_points(&a.b, a.dim, a.inf_value)?;
    let t = transport(&d1, &d2, &cfg)?;
    if let Some(path) = &a.plan {
        let mut text = String::new();
        for row in t.plan.to_rows() {
            let cells: Vec<String> = row.into_iter().map(g17).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        fs::write(path, text)?;
    }
    if !t.plan.converged {
        eprintln!("tafl: not converged after {} iterations", t.plan.iterations);
    }
    println!("{}", g17(t.distance));
    Ok(())
}

pub fn loss(a: LossArgs) -> Result {
    let cfg: TaflConfig = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        }
        None => TaflConfig::default(),
    };
    let volumes = a.probs.iter().map(load_volume).collect::<tafl_core::Result<Vec<_>>>()?;
    let f = ProbabilityField::from_class_volumes(&volumes)?;
    let g = load_mask(&a.gt)?;
    let report = tafl_loss(&f, &g, &cfg)?;
    let text = json::to_string(&report).map_err(|e| Failure::input(e.to_string()))?;
    match &a.out {
        Some(path) => {
            fs::write(path, &text)?;
            println!("focal={} topo_total={} total={}", g17(report.focal), g17(report.topo_total), g17(report.total));
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn betti(a: BettiArgs) -> Result {
    let v = load_volume(&a.input)?;
    println!("{}", betti_oracle(&v, a.threshold, a.max_dim)?);
    Ok(())
}
