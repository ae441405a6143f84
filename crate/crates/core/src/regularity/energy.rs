use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use super::Partition;
use crate::combin::{binomial, colex_rank};
use crate::error::{invalid, Result};
use crate::exact::{ser_ratio, ser_ratios};
use crate::hypercore::{Hypergraph, VertexSet};

/// Product of block sizes.
pub fn pi(blocks: &[VertexSet]) -> Result<u128> {
    if let Some(i) = blocks.iter().position(|b| b.is_empty()) {
        return invalid(format!("block {i} is empty"));
    }
    Ok(blocks.iter().map(|b| b.len() as u128).product())
}

/// Product of block sizes over n^(number of blocks).
pub fn alpha(blocks: &[VertexSet], n: usize) -> Result<BigRational> {
    let p = pi(blocks)?;
    if n == 0 {
        return invalid("empty ground set");
    }
    Ok(BigRational::new(BigInt::from(p), num::pow(BigInt::from(n), blocks.len())))
}

/// Crossing-edge count for every r-subset of blocks, indexed by the colex rank
/// of the sorted block indices.
pub fn tuple_counts(h: &Hypergraph, labels: &[u32], t: usize) -> Vec<u64> {
    let r = h.r();
    let mut counts = vec![0u64; binomial(t as u64, r as u64) as usize];
    let mut idx = Vec::with_capacity(r);
    for e in h.edges() {
        idx.clear();
        idx.extend(e.vertices().iter().map(|&v| labels[v as usize]));
        idx.sort_unstable();
        if idx.windows(2).all(|w| w[0] < w[1]) {
            counts[colex_rank(&idx) as usize] += 1;
        }
    }
    counts
}

/// Σ over r-subsets of blocks of α·(d^p)², which simplifies to Σ e² / (π·p²·n^r).
pub fn energy(h: &Hypergraph, partition: &Partition, p: &BigRational) -> Result<BigRational> {
    check(h, partition, p)?;
    Ok(energy_unchecked(h, partition, &partition.labels(), p))
}

fn check(h: &Hypergraph, partition: &Partition, p: &BigRational) -> Result<()> {
    if partition.order() < h.r() {
        return invalid(format!("need at least r = {} blocks, got {}", h.r(), partition.order()));
    }
    if h.n() != partition.n() {
        return invalid(format!("partition covers {} vertices, hypergraph has {}", partition.n(), h.n()));
    }
    if *p <= BigRational::zero() {
        return invalid("density scale p must be positive");
    }
    Ok(())
}

pub(crate) fn energy_unchecked(h: &Hypergraph, partition: &Partition, labels: &[u32], p: &BigRational) -> BigRational {
    let sizes = partition.sizes();
    let counts = tuple_counts(h, labels, partition.order());
    let mut sum = BigRational::zero();
    let mut tuple = Vec::with_capacity(h.r());
    for (rank, &e) in counts.iter().enumerate() {
        if e == 0 {
            continue;
        }
        tuple.clear();
        tuple.extend(crate::combin::colex_unrank(rank as u64, h.r()));
        let pi: u128 = tuple.iter().map(|&i| sizes[i as usize] as u128).product();
        sum += BigRational::new(BigInt::from(e as u128 * e as u128), BigInt::from(pi));
    }
    sum / (p * p * BigRational::from_integer(num::pow(BigInt::from(h.n()), h.r())))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyLedger {
    #[serde(serialize_with = "ser_ratios")]
    pub per_colour: Vec<BigRational>,
    #[serde(serialize_with = "ser_ratio")]
    pub total: BigRational,
}

/// Per-colour energies of one partition and their sum.
pub fn multicolour_energy(hs: &[Hypergraph], partition: &Partition, p: &BigRational) -> Result<EnergyLedger> {
    if hs.is_empty() {
        return invalid("need at least one colour class");
    }
    for h in hs {
        check(h, partition, p)?;
    }
    let labels = partition.labels();
    let per_colour: Vec<BigRational> = hs.iter().map(|h| energy_unchecked(h, partition, &labels, p)).collect();
    let total = per_colour.iter().sum();
    Ok(EnergyLedger { per_colour, total })
}

/// Both sides of the refinement identity for one tuple split into sub-blocks:
/// Σ_j ℰ(X_j) = ℰ(X) + α(X)·Σ_j β_j ε_j².
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitIdentity {
    #[serde(serialize_with = "ser_ratio")]
    pub whole: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub parts: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub alpha: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub sum_beta: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub sum_beta_eps: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub sum_beta_eps_sq: BigRational,
}

impl SplitIdentity {
    pub fn holds(&self) -> bool {
        self.parts == &self.whole + &self.alpha * &self.sum_beta_eps_sq
            && self.sum_beta.is_one()
            && self.sum_beta_eps.is_zero()
    }

    pub fn gain(&self) -> BigRational {
        &self.parts - &self.whole
    }
}

/// Evaluates the split identity for tuple `x` where `x[i]` is cut into `splits[i]`.
/// Empty pieces are ignored.
pub fn split_identity(h: &Hypergraph, x: &[VertexSet], splits: &[Vec<VertexSet>], p: &BigRational) -> Result<SplitIdentity> {
    let r = h.r();
    if x.len() != r || splits.len() != r {
        return invalid(format!("need r = {r} blocks and splits"));
    }
    if *p <= BigRational::zero() {
        return invalid("density scale p must be positive");
    }
    let refs: Vec<&VertexSet> = x.iter().collect();
    crate::hypercore::check_blocks(&refs)?;
    let pieces: Vec<Vec<&VertexSet>> = splits.iter().map(|s| s.iter().filter(|b| !b.is_empty()).collect()).collect();
    for (i, ps) in pieces.iter().enumerate() {
        let mut union = VertexSet::new();
        for b in ps {
            if !union.is_disjoint(b) {
                return invalid(format!("pieces of block {i} overlap"));
            }
            union.union_with(b);
        }
        if union != x[i] {
            return invalid(format!("pieces of block {i} do not partition it"));
        }
    }
    // vertex -> (block, piece)
    let mut at = vec![None; h.n()];
    for (i, ps) in pieces.iter().enumerate() {
        for (j, b) in ps.iter().enumerate() {
            for v in b.iter() {
                if (v as usize) >= h.n() {
                    return invalid(format!("vertex {v} outside 0..{}", h.n()));
                }
                at[v as usize] = Some((i, j));
            }
        }
    }
    let radix: Vec<usize> = pieces.iter().map(|ps| ps.len()).collect();
    let cells: usize = radix.iter().product();
    let mut counts = vec![0u64; cells];
    'edges: for e in h.edges() {
        let mut slot = vec![usize::MAX; r];
        for &v in e.vertices() {
            match at[v as usize] {
                Some((i, j)) if slot[i] == usize::MAX => slot[i] = j,
                _ => continue 'edges,
            }
        }
        let cell = slot.iter().zip(&radix).fold(0, |acc, (&j, &m)| acc * m + j);
        counts[cell] += 1;
    }

    let n_r = BigRational::from_integer(num::pow(BigInt::from(h.n()), r));
    let big = |x: u128| BigRational::from_integer(BigInt::from(x));
    let pi_x: u128 = x.iter().map(|b| b.len() as u128).product();
    let total: u64 = counts.iter().sum();
    let alpha = big(pi_x) / &n_r;
    let d = big(total as u128) / (p * big(pi_x));
    let whole = &alpha * &d * &d;

    let mut parts = BigRational::zero();
    let mut sum_beta = BigRational::zero();
    let mut sum_beta_eps = BigRational::zero();
    let mut sum_beta_eps_sq = BigRational::zero();
    for (cell, &e) in counts.iter().enumerate() {
        let mut rest = cell;
        let mut pi_j = 1u128;
        for i in (0..r).rev() {
            pi_j *= pieces[i][rest % radix[i]].len() as u128;
            rest /= radix[i];
        }
        let beta = big(pi_j) / big(pi_x);
        let dj = big(e as u128) / (p * big(pi_j));
        let eps = &dj - &d;
        parts += big(pi_j) / &n_r * &dj * &dj;
        sum_beta_eps += &beta * &eps;
        sum_beta_eps_sq += &beta * &eps * &eps;
        sum_beta += beta;
    }
    Ok(SplitIdentity {
        whole,
        parts,
        alpha,
        sum_beta,
        sum_beta_eps,
        sum_beta_eps_sq,
    })
}
