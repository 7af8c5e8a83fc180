mod commands;
mod json;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tafl_core::transport::{CardinalityMode, Stabilization};
use tafl_core::volume::PhantomKind;

#[derive(Parser)]
#[command(name = "tafl", version, about = "Cubical persistence, diagram transport and topology-aware focal loss")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic phantom volume.
    Gen(GenArgs),
    /// Threshold a volume into a two-class label mask.
    Mask(MaskArgs),
    /// Sublevel persistence diagram of a volume.
    Pd(PdArgs),
    /// Transport distance between two diagram CSVs.
    Dist(DistArgs),
    /// Evaluate the topology-aware focal loss.
    Loss(LossArgs),
    /// Betti numbers of the sublevel complex at a threshold.
    Betti(BettiArgs),
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: PhantomKind,
    /// nx,ny,nz (fig2-line defaults to 5,1,1).
    #[arg(long, value_parser = parse_dims)]
    dims: Option<(usize, usize, usize)>,
    /// Fill value for the constant phantom.
    #[arg(long, allow_negative_numbers = true)]
    value: Option<f64>,
    /// Extra phantom parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct MaskArgs {
    #[arg(long)]
    input: PathBuf,
    /// Voxels with value <= threshold get label 1.
    #[arg(long, allow_negative_numbers = true)]
    threshold: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also write one-hot probability volumes PREFIX0.vol and PREFIX1.vol.
    #[arg(long, value_name = "PREFIX")]
    one_hot: Option<String>,
}

#[derive(Args)]
pub struct PdArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct DistArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    mu: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value = "paper-literal", value_parser = parse_mode)]
    mode: CardinalityMode,
    #[arg(long, default_value = "naive", value_parser = parse_stabilization)]
    stabilization: Stabilization,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-99)]
    epsilon: f64,
    /// Only use pairs of this homology dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Death value substituted for essential pairs.
    #[arg(long, allow_negative_numbers = true)]
    inf_value: Option<f64>,
    /// Write the transport plan as CSV.
    #[arg(long)]
    plan: Option<PathBuf>,
}

#[derive(Args)]
pub struct LossArgs {
    /// Comma-separated per-class probability volumes, class 0 first.
    #[arg(long, value_delimiter = ',', required = true)]
    probs: Vec<PathBuf>,
    #[arg(long)]
    gt: PathBuf,
    /// JSON loss configuration; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report destination; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BettiArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    threshold: f64,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
}

fn parse_kind(s: &str) -> Result<PhantomKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = PhantomKind::ALL.iter().map(|k| k.as_str()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<_> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match parts.as_slice() {
        [Ok(x), Ok(y), Ok(z)] => Ok((*x, *y, *z)),
        _ => Err("expected nx,ny,nz".into()),
    }
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected KEY=VALUE")?;
    let v = v.parse().map_err(|_| format!("{v:?} is not a number"))?;
    Ok((k.to_string(), v))
}

fn parse_mode(s: &str) -> Result<CardinalityMode, String> {
    match s {
        "paper-literal" => Ok(CardinalityMode::PaperLiteral),
        "diagonal-augmented" => Ok(CardinalityMode::DiagonalAugmented),
        _ => Err("expected paper-literal or diagonal-augmented".into()),
    }
}

fn parse_stabilization(s: &str) -> Result<Stabilization, String> {
    match s {
        "naive" => Ok(Stabilization::Naive),
        "log-domain" => Ok(Stabilization::LogDomain),
        _ => Err("expected naive or log-domain".into()),
    }
}

/// Error carrying its process exit code: 1 for unreadable or malformed
/// input, 2 for bad arguments, 3 for resource limits.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<tafl_core::Error> for Failure {
    fn from(e: tafl_core::Error) -> Self {
        use tafl_core::Error::*;
        let code = match e {
            ComplexTooLarge { .. } => 3,
            InvalidDims(..) | UnknownPhantom(_) | PhantomTooSmall { .. } | PhantomParam { .. } | InvalidMaxDim(_)
            | ClassOutOfRange { .. } | InvalidConfig(_) | EmptyDiagram | NonFiniteCoordinate(_) | NotSquare(..) => 2,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Mask(a) => commands::mask(a),
        Command::Pd(a) => commands::pd(a),
        Command::Dist(a) => commands::dist(a),
        Command::Loss(a) => commands::loss(a),
        Command::Betti(a) => commands::betti(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tafl: {e}");
            ExitCode::from(e.code)
        }
    }
}
