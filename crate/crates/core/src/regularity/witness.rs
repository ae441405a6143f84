use num::{BigRational, Signed};
use serde::{Deserialize, Serialize};

use super::probe::{density, extreme, Probe};
use crate::error::{invalid, Error, Result};
use crate::exact::{ceil_u64, ser_ratio, to_f64};
use crate::hypercore::{check_blocks, Hypergraph, VertexSet};
use crate::rng::Prng;

/// Default cap on the number of sub-block tuples an exhaustive scan may visit.
pub const DEFAULT_WITNESS_BUDGET: u128 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WitnessMode {
    /// Every sub-block choice in all but the last block; the last is optimised exactly.
    Exhaustive,
    /// Independent uniform sub-blocks of the minimum admissible size.
    Randomized { samples: usize },
    /// Random starts followed by alternating degree ascent.
    Guided { samples: usize },
}

impl WitnessMode {
    pub fn certifies(&self) -> bool {
        matches!(self, WitnessMode::Exhaustive)
    }
}

/// Sub-blocks X_i ⊆ V_i with |X_i| ≥ ε|V_i| whose density strays from the
/// tuple's density by more than εp.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrregularityWitness {
    /// 1-based colour, filled in by callers that scan several colours.
    pub colour: u32,
    /// Block indices of the tuple within its partition.
    pub blocks: Vec<usize>,
    pub subsets: Vec<VertexSet>,
    /// |d(X_1..X_r) - d(V_1..V_r)| as raw densities.
    #[serde(serialize_with = "ser_ratio")]
    pub gap: BigRational,
    /// gap / p
    pub gap_scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessSearch {
    pub witness: Option<IrregularityWitness>,
    /// True when an absent witness proves the tuple regular.
    pub certified: bool,
    pub examined: u64,
}

/// Looks for a violation of (ε, p)-regularity in the r-partite subgraph spanned by `blocks`.
pub fn find_irregular_witness(
    h: &Hypergraph,
    blocks: &[VertexSet],
    eps: &BigRational,
    p: &BigRational,
    mode: WitnessMode,
    seed: u64,
    budget: u128,
) -> Result<WitnessSearch> {
    let probe = Probe::new(h);
    let refs: Vec<&VertexSet> = blocks.iter().collect();
    search(&probe, &refs, eps, p, mode, seed, budget)
}

pub(crate) fn search(
    probe: &Probe,
    blocks: &[&VertexSet],
    eps: &BigRational,
    p: &BigRational,
    mode: WitnessMode,
    seed: u64,
    budget: u128,
) -> Result<WitnessSearch> {
    let r = probe.h.r();
    if blocks.len() != r {
        return invalid(format!("need r = {r} blocks, got {}", blocks.len()));
    }
    check_blocks(blocks)?;
    if !eps.is_positive() || !p.is_positive() {
        return invalid("ε and p must be positive");
    }
    let floors: Vec<usize> = blocks
        .iter()
        .map(|b| (ceil_u64(&(eps * BigRational::from_integer(b.len().into()))) as usize).clamp(1, b.len()))
        .collect();
    let pi0: u128 = blocks.iter().map(|b| b.len() as u128).product();
    let ctx = Ctx {
        probe,
        blocks,
        floors,
        d0: density(probe.count(blocks), pi0),
        threshold: eps * p,
        p,
    };
    match mode {
        WitnessMode::Exhaustive => ctx.exhaustive(budget),
        WitnessMode::Randomized { samples } => Ok(ctx.randomized(samples, seed)),
        WitnessMode::Guided { samples } => Ok(ctx.guided(samples, seed)),
    }
}

struct Ctx<'a> {
    probe: &'a Probe<'a>,
    blocks: &'a [&'a VertexSet],
    floors: Vec<usize>,
    d0: BigRational,
    threshold: BigRational,
    p: &'a BigRational,
}

impl Ctx<'_> {
    fn gap_of(&self, e: u64, pi: u128) -> BigRational {
        (density(e, pi) - &self.d0).abs()
    }

    fn witness(&self, subsets: Vec<VertexSet>, gap: BigRational) -> IrregularityWitness {
        IrregularityWitness {
            colour: 1,
            blocks: Vec::new(),
            subsets,
            gap_scaled: to_f64(&(&gap / self.p)),
            gap,
        }
    }

    fn finish(&self, best: Option<(BigRational, Vec<VertexSet>)>, certified: bool, examined: u64) -> WitnessSearch {
        let witness = best
            .filter(|(g, _)| *g > self.threshold)
            .map(|(g, s)| self.witness(s, g));
        WitnessSearch {
            certified: certified && witness.is_none(),
            witness,
            examined,
        }
    }

    /// Best completion of `fixed` by the last block: its top or bottom degree vertices.
    fn complete_last(&self, fixed: &[VertexSet]) -> (BigRational, VertexSet) {
        let r = self.blocks.len();
        let mut parts: Vec<&VertexSet> = fixed.iter().collect();
        parts.push(self.blocks[r - 1]);
        let deg = self.probe.degrees(&parts, r - 1);
        let m = self.floors[r - 1];
        let pi: u128 = fixed.iter().map(|x| x.len() as u128).product::<u128>() * m as u128;
        let (hi_set, hi) = extreme(&deg, m, true);
        let (lo_set, lo) = extreme(&deg, m, false);
        let (g_hi, g_lo) = (self.gap_of(hi, pi), self.gap_of(lo, pi));
        if g_hi >= g_lo {
            (g_hi, hi_set)
        } else {
            (g_lo, lo_set)
        }
    }

    fn exhaustive(&self, budget: u128) -> Result<WitnessSearch> {
        let r = self.blocks.len();
        let needed = self.blocks[..r - 1]
            .iter()
            .try_fold(1u128, |acc, b| 1u128.checked_shl(b.len() as u32).and_then(|x| acc.checked_mul(x)))
            .unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::BudgetExceeded {
                what: "sub-block tuples for an exhaustive witness scan".into(),
                needed,
                budget,
            });
        }
        let members: Vec<Vec<u32>> = self.blocks[..r - 1].iter().map(|b| b.to_vec()).collect();
        let mut best: Option<(BigRational, Vec<VertexSet>)> = None;
        let mut examined = 0u64;
        let mut fixed = Vec::with_capacity(r);
        self.enumerate(&members, &mut fixed, &mut best, &mut examined);
        Ok(self.finish(best, true, examined))
    }

    fn enumerate(&self, members: &[Vec<u32>], fixed: &mut Vec<VertexSet>, best: &mut Option<(BigRational, Vec<VertexSet>)>, examined: &mut u64) {
        let i = fixed.len();
        if i == members.len() {
            *examined += 1;
            let (g, last) = self.complete_last(fixed);
            if best.as_ref().is_none_or(|(b, _)| g > *b) {
                let mut subsets = fixed.clone();
                subsets.push(last);
                *best = Some((g, subsets));
            }
            return;
        }
        let vs = &members[i];
        for mask in 0u64..1 << vs.len() {
            if (mask.count_ones() as usize) < self.floors[i] {
                continue;
            }
            fixed.push((0..vs.len()).filter(|&k| mask >> k & 1 == 1).map(|k| vs[k]).collect());
            self.enumerate(members, fixed, best, examined);
            fixed.pop();
        }
    }

    fn random_subsets(&self, rng: &mut Prng) -> Vec<VertexSet> {
        self.blocks
            .iter()
            .zip(&self.floors)
            .map(|(b, &m)| {
                let vs = b.to_vec();
                rng.sample_distinct(vs.len(), m).into_iter().map(|k| vs[k as usize]).collect()
            })
            .collect()
    }

    fn evaluate(&self, subsets: &[VertexSet]) -> BigRational {
        let refs: Vec<&VertexSet> = subsets.iter().collect();
        let pi: u128 = subsets.iter().map(|x| x.len() as u128).product();
        self.gap_of(self.probe.count(&refs), pi)
    }

    fn randomized(&self, samples: usize, seed: u64) -> WitnessSearch {
        let mut rng = Prng::seeded(seed);
        for k in 0..samples {
            let subsets = self.random_subsets(&mut rng);
            let g = self.evaluate(&subsets);
            if g > self.threshold {
                return self.finish(Some((g, subsets)), false, k as u64 + 1);
            }
        }
        self.finish(None, false, samples as u64)
    }

    /// Grows each sub-block along its degree order as long as the gap does not shrink,
    /// so the witness outlines whole dense or sparse regions.
    fn widen(&self, cur: &mut [VertexSet], mut gap: BigRational, largest: bool) -> BigRational {
        for i in 0..cur.len() {
            let mut parts: Vec<&VertexSet> = cur.iter().collect();
            parts[i] = self.blocks[i];
            let mut deg = self.probe.degrees(&parts, i);
            if largest {
                deg.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            } else {
                deg.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
            }
            let others: u128 = cur.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, x)| x.len() as u128).product();
            let mut e: u64 = deg[..self.floors[i]].iter().map(|x| x.1).sum();
            let mut best = (self.gap_of(e, others * self.floors[i] as u128), self.floors[i]);
            for (j, &(_, dv)) in deg.iter().enumerate().skip(self.floors[i]) {
                e += dv;
                let g = self.gap_of(e, others * (j as u128 + 1));
                if g >= best.0 {
                    best = (g, j + 1);
                }
            }
            if best.0 >= gap {
                gap = best.0;
                cur[i] = deg[..best.1].iter().map(|x| x.0).collect();
            }
        }
        gap
    }

    fn guided(&self, samples: usize, seed: u64) -> WitnessSearch {
        let r = self.blocks.len();
        let mut rng = Prng::seeded(seed);
        let mut best: Option<(BigRational, Vec<VertexSet>)> = None;
        let mut examined = 0;
        for _ in 0..samples {
            let start = self.random_subsets(&mut rng);
            for largest in [true, false] {
                let mut cur = start.clone();
                let mut gap = self.evaluate(&cur);
                for _ in 0..4 {
                    let mut moved = false;
                    for i in 0..r {
                        let mut parts: Vec<&VertexSet> = cur.iter().collect();
                        parts[i] = self.blocks[i];
                        let deg = self.probe.degrees(&parts, i);
                        let (set, _) = extreme(&deg, self.floors[i], largest);
                        if set != cur[i] {
                            let old = std::mem::replace(&mut cur[i], set);
                            let g = self.evaluate(&cur);
                            examined += 1;
                            if g > gap {
                                gap = g;
                                moved = true;
                            } else {
                                cur[i] = old;
                            }
                        }
                    }
                    if !moved {
                        break;
                    }
                }
                gap = self.widen(&mut cur, gap, largest);
                if best.as_ref().is_none_or(|(b, _)| gap > *b) {
                    best = Some((gap, cur));
                }
            }
            if best.as_ref().is_some_and(|(b, _)| *b > self.threshold) {
                break;
            }
        }
        self.finish(best, false, examined)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::{complete, random_gnp, Edge};
    use num::One;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    /// The first half of block one sees all of block two; the second half sees nothing.
    fn half_split(half: u32, other: u32) -> (Hypergraph, [VertexSet; 2]) {
        let mut edges = Vec::new();
        for a in 0..half {
            for b in 2 * half..2 * half + other {
                edges.push(Edge::new(&[a, b]).unwrap());
            }
        }
        let n = (2 * half + other) as usize;
        (
            Hypergraph::new(n, 2, edges).unwrap(),
            [VertexSet::range(0, 2 * half), VertexSet::range(2 * half, 2 * half + other)],
        )
    }

    /// Oracle: every pair of admissible sub-blocks, densities compared directly.
    fn brute_max_gap(h: &Hypergraph, blocks: &[VertexSet; 2], eps: &BigRational) -> BigRational {
        let v: Vec<Vec<u32>> = blocks.iter().map(|b| b.to_vec()).collect();
        let e0 = h.edges().iter().filter(|e| blocks[0].contains(e.vertices()[0]) && blocks[1].contains(e.vertices()[1])).count();
        let d0 = r(e0 as i64, (v[0].len() * v[1].len()) as i64);
        let floor = |n: usize| ceil_u64(&(eps * r(n as i64, 1))).max(1) as u32;
        let mut best = BigRational::from_integer(0.into());
        for a in 1u32..1 << v[0].len() {
            if a.count_ones() < floor(v[0].len()) {
                continue;
            }
            for b in 1u32..1 << v[1].len() {
                if b.count_ones() < floor(v[1].len()) {
                    continue;
                }
                let mut e = 0;
                for (i, &x) in v[0].iter().enumerate() {
                    for (j, &y) in v[1].iter().enumerate() {
                        if a >> i & 1 == 1 && b >> j & 1 == 1 && h.contains_edge(&Edge::new(&[x, y]).unwrap()) {
                            e += 1;
                        }
                    }
                }
                let g = (r(e, (a.count_ones() * b.count_ones()) as i64) - &d0).abs();
                if g > best {
                    best = g;
                }
            }
        }
        best
    }

    #[test]
    fn complete_tuple_is_regular() {
        let h = complete(12, 2).unwrap();
        let blocks = [VertexSet::range(0, 6), VertexSet::range(6, 12)];
        for mode in [WitnessMode::Exhaustive, WitnessMode::Randomized { samples: 50 }, WitnessMode::Guided { samples: 5 }] {
            let s = find_irregular_witness(&h, &blocks, &r(1, 10), &BigRational::one(), mode, 1, DEFAULT_WITNESS_BUDGET).unwrap();
            assert!(s.witness.is_none());
            assert_eq!(s.certified, mode.certifies());
        }
    }

    #[test]
    fn half_split_has_witness() {
        let (h, blocks) = half_split(5, 10);
        let s = find_irregular_witness(&h, &blocks, &r(1, 10), &BigRational::one(), WitnessMode::Exhaustive, 0, DEFAULT_WITNESS_BUDGET)
            .unwrap();
        let w = s.witness.unwrap();
        assert_eq!(w.gap, r(1, 2));
        let g = find_irregular_witness(&h, &blocks, &r(1, 10), &BigRational::one(), WitnessMode::Guided { samples: 2 }, 3, 0).unwrap();
        assert!(g.witness.unwrap().gap > r(1, 10));
        let (big, blocks) = half_split(128, 256);
        let g = find_irregular_witness(&big, &blocks, &r(1, 10), &BigRational::one(), WitnessMode::Guided { samples: 1 }, 3, 0).unwrap();
        assert_eq!(g.witness.unwrap().gap, r(1, 2));
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        for seed in 0..6 {
            let g = random_gnp(14, 2, 0.5, seed).unwrap();
            let blocks = [VertexSet::range(0, 6), VertexSet::range(6, 13)];
            let eps = r(1, 3);
            let s = find_irregular_witness(&g, &blocks, &eps, &r(1, 2), WitnessMode::Exhaustive, 0, DEFAULT_WITNESS_BUDGET).unwrap();
            let oracle = brute_max_gap(&g, &blocks, &eps);
            match s.witness {
                Some(w) => assert_eq!(w.gap, oracle),
                None => assert!(oracle <= &eps * r(1, 2)),
            }
        }
    }

    #[test]
    fn random_half_density_tuple_regular_at_large_eps() {
        let g = random_gnp(20, 2, 0.5, 4).unwrap();
        let blocks = [VertexSet::range(0, 10), VertexSet::range(10, 20)];
        let s = find_irregular_witness(&g, &blocks, &r(45, 100), &BigRational::one(), WitnessMode::Exhaustive, 0, DEFAULT_WITNESS_BUDGET).unwrap();
        assert!(s.witness.is_none() && s.certified);
    }

    #[test]
    fn exhaustive_respects_budget() {
        let g = random_gnp(40, 2, 0.5, 4).unwrap();
        let blocks = [VertexSet::range(0, 20), VertexSet::range(20, 40)];
        assert!(matches!(
            find_irregular_witness(&g, &blocks, &r(1, 10), &BigRational::one(), WitnessMode::Exhaustive, 0, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
