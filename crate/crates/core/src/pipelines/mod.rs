//! End-to-end extraction pipelines: monochromatic matchings from nearly complete
//! hypergraphs, lifted through regularity from random ones, and the two-exposure
//! experiment that extends them to perfect matchings.

mod defect;
mod discrepancy;
mod transference;

pub use defect::{defect_pipeline, DefectParams, DefectRun, FamilySource, PipelineTrace, DEFAULT_FAMILY_SIZE};
pub use discrepancy::{discrepancy_experiment, DiscrepancyParams, DiscrepancyReport};
pub use transference::{transference_pipeline, LiftRow, TransferRun, TransferTrace};

use std::collections::BTreeMap;
use std::time::Instant;

/// Wall-clock milliseconds per stage. Kept apart from traces so that the
/// deterministic part of a run can be compared byte for byte.
pub type Timings = BTreeMap<String, f64>;

pub(crate) fn lap(timings: &mut Timings, stage: &str, start: Instant) {
    timings.insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
}
