//! Topology-aware segmentation loss.
//!
//! * [`volume`]: scalar volumes, label masks, probability fields, VOL1 I/O and
//!   synthetic phantoms.
//! * [`cubical`]: sublevel persistent homology of volumes and a brute-force
//!   Betti oracle.
//! * [`transport`]: Sinkhorn transport between persistence diagrams and an
//!   exact assignment solver.
//! * [`loss`]: focal loss, the topological transport term, and their sum.

pub mod cubical;
pub mod error;
pub mod fmt;
pub mod loss;
pub mod transport;
pub mod volume;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
