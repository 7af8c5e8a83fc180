use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("invalid dimensions {0}x{1}x{2}: every axis must be at least 1")]
    InvalidDims(usize, usize, usize),
    #[error("voxel count overflows for dimensions {0}x{1}x{2}")]
    DimsOverflow(u64, u64, u64),
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite value at voxel {0}")]
    NonFinite(usize),
    #[error("volume dimensions do not match: {0:?} vs {1:?}")]
    DimMismatch((usize, usize, usize), (usize, usize, usize)),

    #[error("bad magic bytes {0:?}, expected \"VOL1\"")]
    BadMagic([u8; 4]),
    #[error("truncated payload: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("unexpected trailing bytes after payload")]
    TrailingData,
    #[error("unsupported dtype code {0}")]
    BadDtype(u8),
    #[error("file holds dtype {found}, expected dtype {expected}")]
    WrongDtype { expected: u8, found: u8 },

    #[error("label {label} at voxel {voxel} is not below num_classes {num_classes}")]
    LabelOutOfRange { voxel: usize, label: u8, num_classes: u8 },
    #[error("num_classes must be at least 2, got {0}")]
    TooFewClasses(usize),
    #[error("class id {class} out of range for {num_classes} classes")]
    ClassOutOfRange { class: usize, num_classes: usize },
    #[error("invalid probability at voxel {voxel}: {reason}")]
    InvalidProbability { voxel: usize, reason: String },

    #[error("unknown phantom kind {0:?}")]
    UnknownPhantom(String),
    #[error("dimensions too small for {kind} phantom: {reason}")]
    PhantomTooSmall { kind: &'static str, reason: String },
    #[error("invalid phantom parameter {key}: {reason}")]
    PhantomParam { key: String, reason: String },

    #[error("max_dim must be 0, 1 or 2, got {0}")]
    InvalidMaxDim(usize),
    #[error("sublevel complex exceeds the oracle limit of {cap} cells (stopped counting at {cells})")]
    ComplexTooLarge { cells: usize, cap: usize },
    #[error("betti oracle disagrees with flood fill: rank gives {rank_b0}, flood fill gives {flood_b0}")]
    OracleInconsistent { rank_b0: usize, flood_b0: usize },

    #[error("malformed diagram csv at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },

    #[error("empty persistence diagram")]
    EmptyDiagram,
    #[error("non-finite diagram coordinate at point {0}")]
    NonFiniteCoordinate(usize),
    #[error("cost matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
