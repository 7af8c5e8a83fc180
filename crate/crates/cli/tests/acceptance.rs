//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tafl_core::cubical::{
    betti_oracle, format_diagram, parse_diagram, read_diagram, sublevel_persistence, write_diagram,
    PersistenceDiagram, PersistencePair,
};
use tafl_core::loss::{focal_loss, focal_loss_grad, tafl_loss, FocalConfig, TaflConfig};
use tafl_core::transport::{
    cost_matrix, exact_assignment, transport, wasserstein_distance, DiagramPoint, SinkhornConfig, Stabilization,
};
use tafl_core::volume::{
    generate_phantom, read_mask, read_volume, write_mask, write_volume, Dims, LabelMask, PhantomKind, PhantomParams,
    ProbabilityField, Volume3D,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn pts(v: &[(f64, f64)]) -> Vec<DiagramPoint> {
    v.iter().copied().map(DiagramPoint::from).collect()
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let (p1, p2) = (pts(&[(1., 2.), (3., 4.), (5., 6.)]), pts(&[(2., 3.), (4., 5.), (6., 7.)]));
    let cfg = SinkhornConfig::default();
    let c = cost_matrix(&p1, &p2, 2.0).map_err(|e| e.to_string())?;
    let want = vec![vec![2., 18., 50.], vec![2., 2., 18.], vec![18., 2., 2.]];
    check(c.to_rows() == want, || format!("cost matrix {:?}", c.to_rows()))?;
    let t = transport(&p1, &p2, &cfg).map_err(|e| e.to_string())?;
    let printed = [[0.999, 0.000, 0.000], [0.001, 0.999, 0.000], [0.000, 0.001, 0.999]];
    let mut worst: f64 = 0.0;
    for (i, row) in printed.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            worst = worst.max((t.plan.get(i, j) - want).abs());
        }
    }
    check(worst <= 2e-3, || format!("plan off by {worst}"))?;
    check((t.distance - 6.0).abs() <= 0.01, || format!("distance {}", t.distance))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("distance {:.6}, worst plan entry error {worst:.2e}", t.distance))
}

fn fig2_barcode() -> Outcome {
    let start = Instant::now();
    let v = generate_phantom(PhantomKind::Fig2Line, Dims::new(5, 1, 1).unwrap(), &PhantomParams::new())
        .map_err(|e| e.to_string())?;
    let d = sublevel_persistence(&v, 2).map_err(|e| e.to_string())?;
    let want = PersistenceDiagram::new(vec![
        PersistencePair::essential(0, -2.0),
        PersistencePair::new(0, -1.0, 1.0),
        PersistencePair::new(0, -1.0, 2.0),
    ]);
    check(d == want, || format!("got {:?}", d.pairs()))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("[-2, inf), [-1, 1), [-1, 2)".into())
}

fn betti_suite() -> Outcome {
    let start = Instant::now();
    let cases = [
        (PhantomKind::SolidBall, (12, 12, 12), [1, 0, 0]),
        (PhantomKind::HollowShell, (9, 9, 9), [1, 0, 1]),
        (PhantomKind::SolidTorus, (12, 12, 4), [1, 1, 0]),
        (PhantomKind::TwoBlobs, (12, 6, 6), [2, 0, 0]),
    ];
    for (kind, (nx, ny, nz), want) in cases {
        let v = generate_phantom(kind, Dims::new(nx, ny, nz).unwrap(), &PhantomParams::new())
            .map_err(|e| e.to_string())?;
        let from_pairs = sublevel_persistence(&v, 2).map_err(|e| e.to_string())?.betti_at(0.5);
        let oracle = betti_oracle(&v, 0.5, 2).map_err(|e| e.to_string())?.as_array();
        check(from_pairs == want && oracle == want, || {
            format!("{kind}: pairs {from_pairs:?}, oracle {oracle:?}, expected {want:?}")
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dims = Dims::new(5, 5, 5).unwrap();
    let mut thresholds = 0;
    for case in 0..50 {
        let levels: Vec<f64> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let data = (0..dims.len()).map(|_| levels[rng.gen_range(0..levels.len())]).collect();
        let v = Volume3D::new(dims, data).unwrap();
        let d = sublevel_persistence(&v, 2).map_err(|e| e.to_string())?;
        let mut distinct = v.values().to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        for t in distinct {
            let oracle = betti_oracle(&v, t, 2).map_err(|e| e.to_string())?.as_array();
            check(d.betti_at(t) == oracle, || format!("random case {case} at {t}: {:?} vs {oracle:?}", d.betti_at(t)))?;
            thresholds += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("4 phantoms, 50 random volumes, {thresholds} thresholds"))
}

fn sinkhorn_vs_exact() -> Outcome {
    let start = Instant::now();
    let cfg = SinkhornConfig { stabilization: Stabilization::LogDomain, mu: 0.01, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let diagram = |rng: &mut ChaCha8Rng, n: usize| -> Vec<DiagramPoint> {
        (0..n)
            .map(|_| {
                let (a, b): (f64, f64) = (rng.gen_range(0.0..=3.0), rng.gen_range(0.0..=3.0));
                DiagramPoint::new(a.min(b), a.max(b))
            })
            .collect()
    };
    let (mut worst_above, mut worst_below) = (0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for case in 0..100 {
        let n = rng.gen_range(1..=6);
        let (a, b) = (diagram(&mut rng, n), diagram(&mut rng, n));
        let exact = exact_assignment(&cost_matrix(&a, &b, 2.0).unwrap()).unwrap().cost;
        let d = wasserstein_distance(&a, &b, &cfg).map_err(|e| e.to_string())?;
        worst_above = worst_above.max((d - exact) / exact.max(1e-300));
        worst_below = worst_below.max(exact - d);
        if d - exact > f64::max(1e-3, 0.01 * exact) || exact - d > 1e-9 {
            failures.push(format!("case {case} (n={n}): sinkhorn {d} vs exact {exact}"));
        }
    }
    check(failures.is_empty(), || failures.join("; "))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("100 cases, worst relative excess {worst_above:.2e}, worst deficit {worst_below:.2e}"))
}

fn focal_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 1000;
    let labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let mask = LabelMask::new(Dims::new(n, 1, 1).unwrap(), labels.clone(), 2).unwrap();
    let pt: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..=0.9)).collect();
    let field = |pt: &[f64]| {
        let mut probs = vec![0.0; 2 * n];
        for i in 0..n {
            let l = labels[i] as usize;
            probs[l * n + i] = pt[i];
            probs[(1 - l) * n + i] = 1.0 - pt[i];
        }
        ProbabilityField::new(mask.dims(), 2, probs).unwrap()
    };
    let cfg = FocalConfig::default();
    let grad = focal_loss_grad(&field(&pt), &mask, &cfg).map_err(|e| e.to_string())?;
    check(grad.flagged.is_empty(), || format!("{} flagged voxels", grad.flagged.len()))?;
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut p = pt.clone();
    for i in 0..n {
        p[i] = pt[i] + h;
        let up = focal_loss(&field(&p), &mask, &cfg).unwrap();
        p[i] = pt[i] - h;
        let down = focal_loss(&field(&p), &mask, &cfg).unwrap();
        p[i] = pt[i];
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((grad.grad[i] - fd).abs() / fd.abs());
    }
    check(worst <= 1e-4, || format!("worst relative error {worst:.2e}"))?;
    Ok(format!("1000 voxels, worst relative error {worst:.2e}"))
}

fn perfect_prediction() -> Outcome {
    let cases = [
        (PhantomKind::Constant, (4, 4, 4)),
        (PhantomKind::SolidBall, (9, 9, 9)),
        (PhantomKind::HollowShell, (9, 9, 9)),
        (PhantomKind::SolidTorus, (11, 11, 4)),
        (PhantomKind::TwoBlobs, (12, 6, 6)),
        (PhantomKind::Fig2Line, (5, 1, 1)),
    ];
    let cfg = TaflConfig::default();
    let mut worst_topo: f64 = 0.0;
    for (kind, (nx, ny, nz)) in cases {
        let v = generate_phantom(kind, Dims::new(nx, ny, nz).unwrap(), &PhantomParams::new()).unwrap();
        let g = LabelMask::threshold(&v, 0.5);
        let r = tafl_loss(&ProbabilityField::one_hot(&g), &g, &cfg).map_err(|e| e.to_string())?;
        check(r.focal == 0.0, || format!("{kind}: focal {}", r.focal))?;
        check(r.topo_total <= 1e-6, || format!("{kind}: topo {}", r.topo_total))?;
        worst_topo = worst_topo.max(r.topo_total);
    }

    let v = generate_phantom(PhantomKind::SolidTorus, Dims::new(9, 9, 3).unwrap(), &PhantomParams::new()).unwrap();
    let g = LabelMask::threshold(&v, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = g.labels().len();
    let mut probs = vec![0.0; 2 * n];
    for (i, &l) in g.labels().iter().enumerate() {
        let p: f64 = rng.gen_range(0.05..0.95);
        probs[l as usize * n + i] = p;
        probs[(1 - l as usize) * n + i] = 1.0 - p;
    }
    let f = ProbabilityField::new(g.dims(), 2, probs).unwrap();
    let r1 = tafl_loss(&f, &g, &TaflConfig { lambda: 0.001, ..cfg.clone() }).map_err(|e| e.to_string())?;
    let r2 = tafl_loss(&f, &g, &TaflConfig { lambda: 0.002, ..cfg }).map_err(|e| e.to_string())?;
    let gap = ((r2.total - r1.total) - 0.001 * r1.topo_total).abs();
    check(gap <= 1e-12, || format!("lambda linearity off by {gap:e}"))?;
    Ok(format!("6 phantoms, worst topo {worst_topo:.2e}, linearity gap {gap:.2e}"))
}

fn format_stability() -> Outcome {
    let mut params = PhantomParams::new();
    params.insert("noise".into(), 0.25);
    params.insert("seed".into(), 8.0);
    let v = generate_phantom(PhantomKind::HollowShell, Dims::new(7, 6, 5).unwrap(), &params).unwrap();
    let mut bytes = Vec::new();
    write_volume(&v, &mut bytes).unwrap();
    let back = read_volume(&mut bytes.as_slice()).map_err(|e| e.to_string())?;
    let mut again = Vec::new();
    write_volume(&back, &mut again).unwrap();
    check(back == v && again == bytes, || "volume round trip differs".into())?;

    let m = LabelMask::threshold(&v, 0.5);
    let mut mask_bytes = Vec::new();
    write_mask(&m, &mut mask_bytes).unwrap();
    let mut mask_again = Vec::new();
    write_mask(&read_mask(&mut mask_bytes.as_slice()).map_err(|e| e.to_string())?, &mut mask_again).unwrap();
    check(mask_again == mask_bytes, || "mask round trip differs".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = sublevel_persistence(&v, 2).unwrap();
    let path = dir.path().join("d.csv");
    write_diagram(&d, &path).map_err(|e| e.to_string())?;
    let text = fs::read_to_string(&path).unwrap();
    let reread = read_diagram(&path).map_err(|e| e.to_string())?;
    check(reread == d && format_diagram(&reread) == text, || "diagram CSV round trip differs".into())?;
    check(parse_diagram(&text).is_ok_and(|p| p == d), || "diagram CSV parse differs".into())?;

    let run = |tag: &str| -> Result<[Vec<u8>; 3], String> {
        let exe = env!("CARGO_BIN_EXE_tafl");
        let call = |args: &[&str]| {
            let out = Command::new(exe).current_dir(dir.path()).args(args).output().map_err(|e| e.to_string())?;
            if out.status.success() {
                Ok(out.stdout)
            } else {
                Err(String::from_utf8_lossy(&out.stderr).into_owned())
            }
        };
        let vol = format!("v{tag}.vol");
        let csv = format!("v{tag}.csv");
        call(&["gen", "--kind", "solid-torus", "--dims", "9,9,3", "--param", "noise=0.2", "--out", &vol])?;
        let pd = call(&["pd", "--input", &vol, "--out", &csv])?;
        let dist = call(&["dist", &csv, &csv, "--dim", "0", "--inf-value", "1", "--stabilization", "log-domain"])?;
        let mut files = fs::read(dir.path().join(&vol)).unwrap();
        files.extend(fs::read(dir.path().join(&csv)).unwrap());
        Ok([pd, dist, files])
    };
    check(run("a")? == run("b")?, || "CLI outputs differ between runs".into())?;
    Ok(format!("VOL1 {} bytes, CSV {} rows, CLI runs identical", bytes.len(), d.len()))
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("1 worked transport example", worked_example),
        ("2 line barcode", fig2_barcode),
        ("3 Betti suite", betti_suite),
        ("4 Sinkhorn vs exact assignment", sinkhorn_vs_exact),
        ("5 focal gradient", focal_gradient),
        ("6 perfect prediction and lambda linearity", perfect_prediction),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    println!(
        "criterion 7 segmentation Dice scores: NOT REPRODUCED (needs the brain-tumour dataset and GPU training; \
         the loss it would train on is pinned by criteria 1-6)"
    );
    match format_stability() {
        Ok(detail) => println!("criterion 8 format stability: PASS ({detail})"),
        Err(why) => {
            failed += 1;
            println!("criterion 8 format stability: FAIL ({why})");
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
