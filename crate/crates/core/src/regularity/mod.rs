//! Weak r-partite regularity: partitions, the energy potential in exact
//! arithmetic, upper-uniformity checks, irregularity witnesses, refinement and
//! the iterated procedure, and cluster hypergraphs.

mod cluster;
mod energy;
mod partition;
mod probe;
mod refine;
mod regularize;
mod uniform;
mod witness;

pub use energy::{alpha, energy, multicolour_energy, pi, split_identity, tuple_counts, EnergyLedger, SplitIdentity};
pub use partition::Partition;
pub use witness::{find_irregular_witness, IrregularityWitness, WitnessMode, WitnessSearch, DEFAULT_WITNESS_BUDGET};
pub use uniform::{check_upper_uniform, UniformMode, UniformReport};
pub use refine::{increment_bound, refine_step, RefineMode, RefineOutcome, RefineParams, RefineTrace};
pub use cluster::{cluster_hypergraph, ClusterHypergraph};
pub(crate) use cluster::cluster_from_scan;
pub use regularize::{regularize, RegularityOutcome, RegularityParams, RoundLog, StopReason, TupleScan};
