//! Hypergraph representation, generators, induced substructures and r-partite densities.

mod density;
mod generators;
mod hypergraph;
mod vertex_set;

pub use density::{crossing_edges, partite_density, product_of_sizes, ratio, Incidence, PartiteDensity};
pub(crate) use density::check_blocks;
pub use generators::{complete, delete_random_edges, kneser, kneser_subset, random_gnp};
pub use hypergraph::{Edge, Hypergraph, Matching};
pub use vertex_set::{VertexSet, MAX_VERTICES};
