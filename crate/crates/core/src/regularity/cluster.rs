use num::BigRational;
use serde::Serialize;

use super::probe::Probe;
use super::regularize::{scan_tuples, TupleScan};
use super::{Partition, WitnessMode};
use crate::colouring::{colour_classes, Colouring};
use crate::combin::colex_unrank;
use crate::error::{invalid, Result};
use crate::hypercore::{Edge, Hypergraph};

/// The reduced r-graph on block indices with inherited colours.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterHypergraph {
    pub graph: Hypergraph,
    pub colouring: Colouring,
    /// False when regularity was only "not refuted" by a randomized search.
    pub certified: bool,
}

/// Edge {i_1..i_r} whenever some colour is regular on those blocks with
/// density above εp; labelled with the smallest such colour.
pub fn cluster_hypergraph(
    h: &Hypergraph,
    c: &Colouring,
    partition: &Partition,
    eps: &BigRational,
    p: &BigRational,
    mode: WitnessMode,
    seed: u64,
    budget: u128,
) -> Result<ClusterHypergraph> {
    if !partition.is_equipartition() {
        return invalid("cluster hypergraphs are built on equipartitions");
    }
    let classes = colour_classes(h, c)?;
    let probes: Vec<Probe> = classes.iter().map(Probe::new).collect();
    let threads = std::thread::available_parallelism().map_or(1, |p| p.get());
    let (scan, _) = scan_tuples(&probes, partition, eps, p, mode, seed, 0, budget, threads)?;
    Ok(cluster_from_scan(&scan, partition, eps, p))
}

pub(crate) fn cluster_from_scan(scan: &TupleScan, partition: &Partition, eps: &BigRational, p: &BigRational) -> ClusterHypergraph {
    let sizes = partition.sizes();
    let q = scan.counts.len();
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for rank in 0..scan.counts.first().map_or(0, |c| c.len()) {
        let idx = colex_unrank(rank as u64, scan.r);
        let pi: u128 = idx.iter().map(|&i| sizes[i as usize] as u128).product();
        let floor = eps * p * BigRational::from_integer(pi.into());
        let colour = (0..q).find(|&j| !scan.irregular[j][rank] && BigRational::from_integer(scan.counts[j][rank].into()) > floor);
        if let Some(j) = colour {
            edges.push(Edge::new(&idx).expect("distinct block indices"));
            labels.push(j as u32 + 1);
        }
    }
    ClusterHypergraph {
        graph: Hypergraph::new(scan.t, scan.r, edges).expect("edges on block indices"),
        colouring: Colouring::new(q as u32, labels).expect("labels within 1..=q"),
        certified: scan.certified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::complete;
    use num::One;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn complete_single_colour() {
        let h = complete(24, 2).unwrap();
        let c = Colouring::uniform(2, h.edge_count(), 1);
        let part = Partition::contiguous(24, 4).unwrap();
        let cl = cluster_hypergraph(&h, &c, &part, &r(1, 10), &BigRational::one(), WitnessMode::Exhaustive, 0, 1 << 20).unwrap();
        assert_eq!(cl.graph.edge_count(), 6);
        assert!(cl.colouring.assignment.iter().all(|&x| x == 1));
        assert!(cl.certified);
    }

    #[test]
    fn sparse_colour_gives_nothing() {
        // a perfect matching: every cross-block density is at most 1/6
        let edges = (0..12).map(|i| Edge::new(&[2 * i, 2 * i + 1]).unwrap()).collect();
        let h = Hypergraph::new(24, 2, edges).unwrap();
        let c = Colouring::uniform(2, h.edge_count(), 2);
        let part = Partition::contiguous(24, 4).unwrap();
        let cl = cluster_hypergraph(&h, &c, &part, &r(1, 2), &BigRational::one(), WitnessMode::Exhaustive, 0, 1 << 20).unwrap();
        assert_eq!(cl.graph.edge_count(), 0);
        let empty = Hypergraph::edgeless(24, 2);
        let cl = cluster_hypergraph(&empty, &Colouring::uniform(2, 0, 1), &part, &r(1, 2), &BigRational::one(), WitnessMode::Exhaustive, 0, 1 << 20)
            .unwrap();
        assert_eq!(cl.graph.edge_count(), 0);
    }

    #[test]
    fn labels_pick_smallest_dense_colour() {
        let h = complete(24, 2).unwrap();
        let c = Colouring::uniform(3, h.edge_count(), 2);
        let part = Partition::contiguous(24, 4).unwrap();
        let cl = cluster_hypergraph(&h, &c, &part, &r(1, 10), &BigRational::one(), WitnessMode::Exhaustive, 0, 1 << 20).unwrap();
        assert_eq!(cl.graph.edge_count(), 6);
        assert!(cl.colouring.assignment.iter().all(|&x| x == 2));
    }
}
