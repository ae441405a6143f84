use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};

use super::union::{exact_dfs, greedy, UnionWitness};
use super::{bits, SetFamily};
use crate::combin::binomial;
use crate::error::{invalid, Result};
use crate::hypercore::VertexSet;

/// Which stage of the search produced the tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    Greedy,
    LocalSearch,
    Packing,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverResult {
    /// Member positions in colex order of the family.
    pub chosen: Vec<usize>,
    pub union_size: usize,
    /// Vertices covered more than once.
    pub overlap: VertexSet,
    /// How many chosen members contain each covered vertex.
    #[serde(serialize_with = "one_based_keys")]
    pub coverage: BTreeMap<u32, u32>,
    pub mode: CoverMode,
}

fn one_based_keys<S: Serializer>(m: &BTreeMap<u32, u32>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(&v, &d)| ((v + 1).to_string(), d)))
}

impl CoverResult {
    fn build(f: &SetFamily, chosen: Vec<usize>, mode: CoverMode) -> Self {
        let mut coverage = BTreeMap::new();
        for &i in &chosen {
            for v in bits(f.masks()[i]) {
                *coverage.entry(v).or_insert(0) += 1;
            }
        }
        let overlap = coverage.iter().filter(|(_, &d)| d >= 2).map(|(&v, _)| v).collect();
        CoverResult {
            union_size: coverage.len(),
            chosen,
            overlap,
            coverage,
            mode,
        }
    }

    /// |U| + Σ_{u ∈ W} (d(u) - 1), which double counting pins at k·s.
    pub fn incidence_total(&self) -> usize {
        self.union_size + self.overlap.iter().map(|v| self.coverage[&v] as usize - 1).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverSearch {
    pub s: usize,
    pub overlap_budget: usize,
    /// (k - C)·s, clamped at zero.
    pub target: usize,
    pub witness: Option<CoverResult>,
    /// Largest union seen, whether or not it reached the target.
    pub best: CoverResult,
    /// True when a missing witness is proven absent.
    pub exhaustive: bool,
}

/// Searches for s members whose union has at least (k - C)·s points: greedy
/// max-coverage first, then pairwise swaps, then exact search when the number
/// of s-subsets fits in `budget`.
pub fn almost_cover(f: &SetFamily, s: usize, c: usize, budget: u128) -> Result<CoverSearch> {
    if s == 0 {
        return invalid("need at least one member in the cover");
    }
    if f.is_empty() {
        return invalid("cannot cover from an empty family");
    }
    let m = f.masks();
    let target = f.k().saturating_sub(c) * s;
    let done = |best: CoverResult, exhaustive: bool| {
        let witness = (best.union_size >= target).then(|| best.clone());
        CoverSearch {
            s,
            overlap_budget: c,
            target,
            exhaustive: witness.is_none() && exhaustive,
            witness,
            best,
        }
    };

    if m.len() <= s {
        let mut chosen: Vec<usize> = (0..m.len()).collect();
        chosen.resize(s, 0);
        return Ok(done(CoverResult::build(f, chosen, CoverMode::Exact), true));
    }
    if target > f.n() {
        let g = greedy(m, s);
        return Ok(done(CoverResult::build(f, g.tuple, CoverMode::Greedy), true));
    }

    let g = greedy(m, s);
    if g.value >= target {
        return Ok(done(CoverResult::build(f, g.tuple, CoverMode::Greedy), false));
    }
    let mut chosen = g.tuple;
    let improved = local_search(m, &mut chosen, target);
    let mode = if improved { CoverMode::LocalSearch } else { CoverMode::Greedy };
    let local = CoverResult::build(f, chosen, mode);
    if local.union_size >= target {
        return Ok(done(local, false));
    }
    let mut work = PACKING_WORK;
    let (packed, complete) = packing(m, s, f.k(), target, &mut work);
    if let Some(tuple) = packed {
        return Ok(done(CoverResult::build(f, tuple, CoverMode::Packing), false));
    }
    if complete {
        return Ok(done(local, true));
    }
    if binomial(m.len() as u64, s as u64) > budget {
        return Ok(done(local, false));
    }
    let mut best = UnionWitness {
        value: local.union_size,
        tuple: local.chosen.clone(),
    };
    let cap = (f.k() * s).min(f.n()).min(target);
    exact_dfs(m, s, f.k(), cap, 0, 0, &mut Vec::with_capacity(s), &mut best);
    if best.value > local.union_size {
        best.tuple.sort_unstable();
        Ok(done(CoverResult::build(f, best.tuple, CoverMode::Exact), true))
    } else {
        Ok(done(local, true))
    }
}

/// Mask operations the packing stage may spend.
const PACKING_WORK: u64 = 1 << 28;

/// Depth-first search over index-increasing tuples whose total overlap stays
/// within k·s - target, trying children in order of least new overlap. The
/// allowed overlap grows level by level so that disjoint packings are found
/// first. Returns the tuple, and whether the final level ran to completion.
fn packing(m: &[u64], s: usize, k: usize, target: usize, work: &mut u64) -> (Option<Vec<usize>>, bool) {
    let max_slack = (k * s).saturating_sub(target);
    let levels = max_slack as u64 + 1;
    let mut complete = false;
    for (level, slack) in (0..=max_slack).enumerate() {
        // every level gets an equal share of what is left
        let mut share = *work / (levels - level as u64);
        let before = share;
        let mut stack = Vec::with_capacity(s);
        let found = pack_dfs(m, s, k, slack, 0, 0, &mut stack, &mut share);
        *work -= before - share;
        complete = share > 0;
        if found {
            return (Some(stack), false);
        }
    }
    (None, complete)
}

#[allow(clippy::too_many_arguments)]
fn pack_dfs(m: &[u64], s: usize, k: usize, slack: usize, from: usize, acc: u64, stack: &mut Vec<usize>, work: &mut u64) -> bool {
    if stack.len() == s {
        return true;
    }
    let lost = k * stack.len() - acc.count_ones() as usize;
    let cost = (m.len() - from.min(m.len())) as u64;
    if *work < cost {
        *work = 0;
        return false;
    }
    *work -= cost;
    let mut children: Vec<(u32, usize)> = (from..m.len())
        .map(|i| ((m[i] & acc).count_ones(), i))
        .filter(|&(ov, _)| lost + ov as usize <= slack)
        .collect();
    children.sort_unstable();
    for (_, i) in children {
        stack.push(i);
        if pack_dfs(m, s, k, slack, i + 1, acc | m[i], stack, work) {
            return true;
        }
        stack.pop();
        if *work == 0 {
            return false;
        }
    }
    false
}

/// Replaces one chosen member at a time by the outside member that most enlarges
/// the union. Returns whether anything changed.
fn local_search(m: &[u64], chosen: &mut [usize], target: usize) -> bool {
    let mut improved = false;
    loop {
        let mut moved = false;
        for p in 0..chosen.len() {
            let rest = chosen
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != p)
                .fold(0u64, |a, (_, &i)| a | m[i]);
            let current = (rest | m[chosen[p]]).count_ones();
            let mut best = (current, chosen[p]);
            for (i, &x) in m.iter().enumerate() {
                let u = (rest | x).count_ones();
                if u > best.0 && !chosen.contains(&i) {
                    best = (u, i);
                }
            }
            if best.1 != chosen[p] {
                chosen[p] = best.1;
                moved = true;
                improved = true;
                if best.0 as usize >= target {
                    return true;
                }
            }
        }
        if !moved {
            return improved;
        }
    }
}
