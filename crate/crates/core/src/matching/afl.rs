//! The guaranteed monochromatic matching size and its exhaustive / sampled verification.

use std::time::Instant;

use serde::Serialize;

use super::matching_number;
use crate::colouring::{enumeration_count, random_colouring, Colouring};
use crate::error::{invalid, Result};
use crate::hypercore::{complete, Hypergraph};
use crate::rng::derive_seed;

/// Colourings kept verbatim in a report; the count is always exact.
pub const MAX_WITNESSES: usize = 32;

/// floor((n + q - 1) / (r + q - 1))
pub fn afl_bound(n: usize, r: usize, q: usize) -> usize {
    (n + q - 1) / (r + q - 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct AflReport {
    pub n: usize,
    pub r: usize,
    pub q: usize,
    pub bound: usize,
    /// Minimum over colourings of the largest monochromatic matching.
    pub min: usize,
    /// Colourings whose largest monochromatic matching equals the bound.
    pub extremal_count: u64,
    pub colourings_checked: u64,
    pub holds: bool,
    pub witnesses: Vec<Colouring>,
    pub elapsed_ms: u64,
}

/// Enumerates every `q`-colouring of the complete `r`-graph on `n` vertices.
pub fn verify_afl_exhaustive(n: usize, r: usize, q: usize, budget: u128) -> Result<AflReport> {
    check_params(n, r, q)?;
    let start = Instant::now();
    let h = complete(n, r)?;
    enumeration_count(h.edge_count(), q as u32, budget)?;
    if n > 64 {
        return invalid("exhaustive verification supports n <= 64");
    }
    let masks: Vec<u64> = h
        .edges()
        .iter()
        .map(|e| e.vertices().iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let bound = afl_bound(n, r, q);
    let mut assignment = vec![0u8; masks.len()];
    let mut report = AflReport {
        n,
        r,
        q,
        bound,
        min: usize::MAX,
        extremal_count: 0,
        colourings_checked: 0,
        holds: true,
        witnesses: Vec::new(),
        elapsed_ms: 0,
    };
    let mut class: Vec<u64> = Vec::with_capacity(masks.len());
    loop {
        let mut best = 0;
        for colour in 0..q as u8 {
            class.clear();
            class.extend(masks.iter().zip(&assignment).filter(|(_, &c)| c == colour).map(|(m, _)| *m));
            best = best.max(small_matching_number(&class, 0, 0, r, n));
        }
        report.colourings_checked += 1;
        if best < report.min {
            report.min = best;
        }
        if best == bound {
            report.extremal_count += 1;
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(Colouring {
                    q: q as u32,
                    assignment: assignment.iter().map(|&c| c as u32 + 1).collect(),
                });
            }
        }
        if !next_assignment(&mut assignment, q as u8) {
            break;
        }
    }
    if report.min == usize::MAX {
        report.min = 0;
    }
    report.holds = report.min >= bound;
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct SampledAflReport {
    pub n: usize,
    pub r: usize,
    pub q: usize,
    pub bound: usize,
    pub samples: u64,
    pub seed: u64,
    /// Smallest largest-monochromatic-matching seen over the samples.
    pub min: usize,
    pub holds: bool,
}

/// Sample `i` uses the colouring drawn with seed `derive_seed(seed, [i])`.
pub fn verify_afl_sampled(n: usize, r: usize, q: usize, samples: u64, seed: u64) -> Result<SampledAflReport> {
    if r < 1 || q < 1 || r > n {
        return invalid(format!("need 1 <= r <= n and q >= 1, got n={n} r={r} q={q}"));
    }
    let h = complete(n, r)?;
    let bound = afl_bound(n, r, q);
    let mut min = usize::MAX;
    for i in 0..samples {
        let c = random_colouring(&h, q as u32, derive_seed(seed, &[i]))?;
        min = min.min(max_monochromatic_size(&h, &c)?);
    }
    if samples == 0 {
        min = 0;
    }
    Ok(SampledAflReport {
        n,
        r,
        q,
        bound,
        samples,
        seed,
        min,
        holds: samples == 0 || min >= bound,
    })
}

/// Largest monochromatic matching size (no witness).
pub fn max_monochromatic_size(h: &Hypergraph, c: &Colouring) -> Result<usize> {
    c.check_against(h)?;
    let mut best = 0;
    for colour in 1..=c.q {
        let class = h.filter_edges(|i, _| c.assignment[i] == colour);
        best = best.max(matching_number(&class));
    }
    Ok(best)
}

fn check_params(n: usize, r: usize, q: usize) -> Result<()> {
    if r < 2 || q < 1 || r > n {
        return invalid(format!("need 2 <= r <= n and q >= 1, got n={n} r={r} q={q}"));
    }
    Ok(())
}

fn next_assignment(a: &mut [u8], q: u8) -> bool {
    for x in a.iter_mut().rev() {
        if *x + 1 < q {
            *x += 1;
            return true;
        }
        *x = 0;
    }
    false
}

/// Matching number of edges given as single-word vertex masks.
fn small_matching_number(edges: &[u64], from: usize, used: u64, r: usize, n: usize) -> usize {
    let cap = (n - used.count_ones() as usize) / r;
    let mut best = 0;
    for j in from..edges.len() {
        if best >= cap {
            break;
        }
        if edges[j] & used == 0 {
            best = best.max(1 + small_matching_number(edges, j + 1, used | edges[j], r, n));
        }
    }
    best
}
