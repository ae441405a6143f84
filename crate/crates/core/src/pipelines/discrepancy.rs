use std::time::Instant;

use num::BigRational;
use serde::Serialize;

use super::{lap, Timings};
use crate::colouring::Colouring;
use crate::combin::{binomial, colex_rank};
use crate::error::{invalid, Result};
use crate::exact::{ceil_u64, ser_ratio};
use crate::hypercore::{random_gnp, Edge, Hypergraph, Matching, VertexSet};
use crate::matching::{blossom_matching, max_matching_exact, perfect_matching};
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyParams {
    pub n: usize,
    pub r: usize,
    pub p1: f64,
    pub p2: f64,
    #[serde(serialize_with = "ser_ratio")]
    pub mu: BigRational,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub r: usize,
    pub q: u32,
    pub seed: u64,
    pub first_seed: u64,
    pub second_seed: u64,
    pub first_edges: usize,
    pub second_edges: usize,
    /// Colour of the first-stage matching.
    pub colour: Option<u32>,
    /// Largest monochromatic matching in the first sample.
    pub first_max: usize,
    /// ⌈(1 − μ)·n/(r+q−1)⌉.
    pub first_target: usize,
    pub first_size: usize,
    /// Vertices left uncovered by the first stage.
    pub uncovered: usize,
    pub perfect: bool,
    pub second_size: usize,
    /// Edges of the final perfect matching in the first-stage colour.
    pub same_colour: usize,
    /// (1 − μ)·n/(r+q−1).
    #[serde(serialize_with = "ser_ratio")]
    pub bound: BigRational,
    pub success: bool,
    /// First-stage edges followed by second-stage edges; empty on failure.
    pub matching: Matching,
}

fn colour_of(c: &Colouring, e: &Edge) -> u32 {
    c.assignment[colex_rank(e.vertices()) as usize]
}

/// Samples two independent random r-graphs on the same vertices, takes a
/// monochromatic matching of the target size from the first and tries to
/// complete it with a perfect matching of the second on the uncovered vertices.
/// `c` colours every r-subset of `0..n` in colex order and is fixed in advance.
pub fn discrepancy_experiment(c: &Colouring, params: &DiscrepancyParams) -> Result<(DiscrepancyReport, Timings)> {
    let (n, r, q) = (params.n, params.r, c.q);
    if r < 2 || n % r != 0 {
        return invalid(format!("r = {r} must be at least 2 and divide n = {n}"));
    }
    if c.assignment.len() as u128 != binomial(n as u64, r as u64) {
        return invalid("the colouring must cover every r-subset");
    }
    if !(params.mu > BigRational::from_integer(0.into()) && params.mu < BigRational::from_integer(1.into())) {
        return invalid("μ must lie in (0, 1)");
    }
    let mut timings = Timings::new();
    let bound = (BigRational::from_integer(1.into()) - &params.mu) * BigRational::from_integer(n.into())
        / BigRational::from_integer((r + q as usize - 1).into());
    let first_target = ceil_u64(&bound) as usize;

    let start = Instant::now();
    let first_seed = derive_seed(params.seed, &[1]);
    let second_seed = derive_seed(params.seed, &[2]);
    let g1 = random_gnp(n, r, params.p1, first_seed)?;
    let g2 = random_gnp(n, r, params.p2, second_seed)?;
    lap(&mut timings, "sample", start);

    let start = Instant::now();
    let mut best: Option<(u32, Matching)> = None;
    for colour in 1..=q {
        let class = g1.filter_edges(|_, e| colour_of(c, e) == colour);
        let m = if r == 2 { blossom_matching(&class) } else { max_matching_exact(&class) };
        if best.as_ref().is_none_or(|(_, b)| m.size() > b.size()) {
            best = Some((colour, m));
        }
    }
    let (colour, mut first) = best.expect("q >= 1");
    let first_max = first.size();
    first.edges.truncate(first_target);
    lap(&mut timings, "first_stage", start);

    let start = Instant::now();
    let covered = first.covered();
    let w: VertexSet = (0..n as u32).filter(|v| !covered.contains(*v)).collect();
    let members = w.to_vec();
    let (rest, _) = g2.induced_with_positions(&w);
    let rest = Hypergraph::new(members.len(), r, rest.edges().to_vec())?;
    let second = perfect_matching(&rest)?.map(|m| {
        m.edges
            .iter()
            .map(|e| {
                let back: Vec<u32> = e.vertices().iter().map(|&v| members[v as usize]).collect();
                Edge::new(&back).expect("distinct vertices")
            })
            .collect::<Vec<_>>()
    });
    lap(&mut timings, "second_stage", start);

    let perfect = second.is_some();
    let second = second.unwrap_or_default();
    let same_colour = if perfect {
        first.size() + second.iter().filter(|e| colour_of(c, e) == colour).count()
    } else {
        0
    };
    let success = perfect && BigRational::from_integer(same_colour.into()) >= bound;
    let matching = if perfect {
        let mut edges = first.edges.clone();
        edges.extend(second.iter().cloned());
        let m = Matching::new(edges, None);
        assert!(m.is_valid() && m.size() * r == n);
        m
    } else {
        Matching::default()
    };
    let report = DiscrepancyReport {
        n,
        r,
        q,
        seed: params.seed,
        first_seed,
        second_seed,
        first_edges: g1.edge_count(),
        second_edges: g2.edge_count(),
        colour: Some(colour),
        first_max,
        first_target,
        first_size: first.size(),
        uncovered: members.len(),
        perfect,
        second_size: second.len(),
        same_colour,
        bound,
        success,
        matching,
    };
    Ok((report, timings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{extremal_colouring, WeightVector};

    fn params(n: usize, p1: f64, p2: f64, seed: u64) -> DiscrepancyParams {
        DiscrepancyParams {
            n,
            r: 2,
            p1,
            p2,
            mu: BigRational::new(1.into(), 5.into()),
            seed,
        }
    }

    fn extremal(n: usize) -> Colouring {
        extremal_colouring(n, 2, 2, WeightVector::new(vec![1, 2], 2).unwrap()).unwrap().colouring
    }

    #[test]
    fn two_stage_success() {
        let n = 200;
        let p2 = 5.0 * (n as f64).ln() / n as f64;
        let (rep, _) = discrepancy_experiment(&extremal(n), &params(n, 0.3, p2, 5)).unwrap();
        assert_eq!(rep.first_target, 54);
        assert!(rep.success, "{rep:?}");
        assert!(rep.same_colour >= 54);
        assert_eq!(rep.matching.size(), 100);
        assert_eq!(rep.first_size + rep.second_size, 100);
    }

    #[test]
    fn empty_second_sample_fails() {
        let (rep, _) = discrepancy_experiment(&extremal(60), &params(60, 0.3, 0.0, 1)).unwrap();
        assert!(rep.uncovered > 0);
        assert!(!rep.perfect && !rep.success);
        assert!(rep.matching.is_empty());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(discrepancy_experiment(&extremal(61), &params(61, 0.3, 0.3, 1)).is_err());
        assert!(discrepancy_experiment(&extremal(60), &params(62, 0.3, 0.3, 1)).is_err());
    }
}
