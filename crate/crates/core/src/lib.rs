//! Monochromatic matchings in coloured hypergraphs, set-family shadows and
//! shifting, the sparse weak regularity procedure with an exact energy ledger,
//! and the defect, transference and two-round exposure pipelines built on them.
//!
//! Vertices are 0-based in memory. Every serialized form uses 1-based labels.

pub mod colouring;
pub mod combin;
pub mod error;
pub mod exact;
pub mod hypercore;
pub mod matching;
pub mod pipelines;
pub mod regularity;
pub mod rng;
pub mod setfamily;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
