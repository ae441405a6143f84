//! Families of k-subsets: shadows, shifting, union extremes, the shadow bound,
//! extremal matching families and the almost-cover search.

mod cover;
mod union;

pub use cover::{almost_cover, CoverMode, CoverResult, CoverSearch};
pub use union::{
    max_union, shadow_sweep, verify_shadow_bound, ShadowQuery, ShadowReport, ShadowSweep, SweepConfig, UnionMode,
    UnionWitness, DEFAULT_UNION_BUDGET,
};

use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combin::{binomial, Combinations};
use crate::error::{invalid, Result};
use crate::hypercore::{Edge, Hypergraph, VertexSet};
use crate::matching;
use crate::rng::Prng;

/// Families live on ground sets of at most this many points, one machine word per member.
pub const MAX_GROUND: usize = 64;

/// A k-uniform family over `0..n`, members kept as bitmasks in colex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: usize,
    k: usize,
    members: Vec<u64>,
}

pub(crate) fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros();
            m &= m - 1;
            b
        })
    })
}

fn mask_of(vs: &[u32]) -> u64 {
    vs.iter().fold(0, |m, &v| m | 1 << v)
}

impl SetFamily {
    pub fn new(n: usize, k: usize, members: impl IntoIterator<Item = VertexSet>) -> Result<Self> {
        let masks = members
            .into_iter()
            .map(|s| {
                if s.max_vertex().is_some_and(|m| m as usize >= n.min(MAX_GROUND)) {
                    return invalid(format!("member {s:?} leaves the ground set 0..{n}"));
                }
                Ok(s.words().first().copied().unwrap_or(0))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_masks(n, k, masks)
    }

    pub fn from_masks(n: usize, k: usize, mut members: Vec<u64>) -> Result<Self> {
        if n > MAX_GROUND {
            return invalid(format!("ground set size {n} exceeds {MAX_GROUND}"));
        }
        if k > n {
            return invalid(format!("member size {k} exceeds ground set size {n}"));
        }
        let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if let Some(&bad) = members.iter().find(|&&m| m & !limit != 0 || m.count_ones() as usize != k) {
            return invalid(format!("member {:?} is not a {k}-subset of the ground set", bits(bad).collect::<Vec<_>>()));
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily { n, k, members })
    }

    /// Every k-subset of the ground set.
    pub fn complete(n: usize, k: usize) -> Result<Self> {
        if n > MAX_GROUND || k > n {
            return invalid(format!("no complete family for n = {n}, k = {k}"));
        }
        let members = Combinations::new(n, k).map(|c| mask_of(&c)).collect();
        Ok(SetFamily { n, k, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.members
    }

    pub fn member(&self, i: usize) -> VertexSet {
        bits(self.members[i]).collect()
    }

    pub fn members(&self) -> impl Iterator<Item = VertexSet> + '_ {
        self.members.iter().map(|&m| bits(m).collect())
    }

    pub fn contains_mask(&self, m: u64) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    /// The members as edges of a k-graph on the same ground set.
    pub fn to_hypergraph(&self) -> Result<Hypergraph> {
        let edges = self
            .members
            .iter()
            .map(|&m| Edge::new(&bits(m).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Hypergraph::new(self.n, self.k.max(1), edges)
    }
}

/// All `l`-subsets of members. The 0-shadow of a non-empty family is the empty set alone.
pub fn shadow(f: &SetFamily, l: usize) -> Result<SetFamily> {
    if l >= f.k {
        return invalid(format!("shadow size {l} must be below the member size {}", f.k));
    }
    Ok(SetFamily {
        n: f.n,
        k: l,
        members: shadow_masks(&f.members, l),
    })
}

pub(crate) fn shadow_masks(members: &[u64], l: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for &m in members {
        let vs: Vec<u32> = bits(m).collect();
        let mut sub = Combinations::new(vs.len(), l);
        while let Some(idx) = sub.advance() {
            out.push(idx.iter().fold(0u64, |acc, &i| acc | 1 << vs[i as usize]));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn check_pair(f: &SetFamily, i: u32, j: u32) -> Result<()> {
    if i >= j || j as usize >= f.n {
        return invalid(format!("shift needs i < j < n, got ({i}, {j}) with n = {}", f.n));
    }
    Ok(())
}

/// The (i, j)-compression: members containing `j` but not `i` trade `j` for `i`
/// unless the traded set is already present.
pub fn shift(f: &SetFamily, i: u32, j: u32) -> Result<SetFamily> {
    check_pair(f, i, j)?;
    Ok(shift_masks(f, i, j).0)
}

fn shift_masks(f: &SetFamily, i: u32, j: u32) -> (SetFamily, bool) {
    let (bi, bj) = (1u64 << i, 1u64 << j);
    let mut changed = false;
    let mut members: Vec<u64> = f
        .members
        .iter()
        .map(|&m| {
            if m & bj != 0 && m & bi == 0 {
                let t = m & !bj | bi;
                if !f.contains_mask(t) {
                    changed = true;
                    return t;
                }
            }
            m
        })
        .collect();
    if changed {
        members.sort_unstable();
    }
    (SetFamily { members, ..*f }, changed)
}

/// Applies every compression in ascending (i, j) order until a full pass changes nothing.
pub fn make_shifted(f: &SetFamily) -> SetFamily {
    let mut cur = f.clone();
    loop {
        let mut any = false;
        for j in 1..f.n as u32 {
            for i in 0..j {
                let (next, changed) = shift_masks(&cur, i, j);
                if changed {
                    cur = next;
                    any = true;
                }
            }
        }
        if !any {
            return cur;
        }
    }
}

pub fn is_shifted(f: &SetFamily) -> bool {
    f.members.iter().all(|&m| {
        bits(m).all(|j| {
            (0..j)
                .filter(|&i| m >> i & 1 == 0)
                .all(|i| f.contains_mask(m & !(1 << j) | 1 << i))
        })
    })
}

/// All k-sets meeting the first `t` points.
pub fn emc_star(n: usize, k: usize, t: usize) -> Result<SetFamily> {
    if k == 0 || n < k || t > n {
        return invalid(format!("star needs 1 <= k <= n and t <= n, got n = {n}, k = {k}, t = {t}"));
    }
    let head = if t == 0 { 0 } else { (1u128 << t) as u64 - 1 };
    let all = SetFamily::complete(n, k)?;
    let members = all.members.into_iter().filter(|m| m & head != 0).collect();
    Ok(SetFamily { n, k, members })
}

/// All k-sets inside the first `k(t + 1) - 1` points.
pub fn emc_clique(n: usize, k: usize, t: usize) -> Result<SetFamily> {
    let span = k * (t + 1);
    if k == 0 || span == 0 || span - 1 > n || n > MAX_GROUND {
        return invalid(format!("clique needs 1 <= k and k(t+1)-1 <= n, got n = {n}, k = {k}, t = {t}"));
    }
    let members = Combinations::new(span - 1, k).map(|c| mask_of(&c)).collect();
    Ok(SetFamily { n, k, members })
}

/// Largest number of pairwise disjoint members.
pub fn matching_number(f: &SetFamily) -> Result<usize> {
    if f.k == 0 {
        return Ok(usize::from(!f.is_empty()));
    }
    Ok(matching::matching_number(&f.to_hypergraph()?))
}

/// A seeded random family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySample {
    pub family: SetFamily,
    pub beta: f64,
    pub target: usize,
    pub seed: u64,
}

/// Draws `min(round(beta * C(n, k)), cap)` distinct k-sets by seeded rejection.
/// Dense targets are reached by rejecting a complement sample instead.
pub fn sample_family(n: usize, k: usize, beta: f64, cap: usize, seed: u64) -> Result<FamilySample> {
    if n > MAX_GROUND || k > n {
        return invalid(format!("no k-sets for n = {n}, k = {k}"));
    }
    if !(0.0..=1.0).contains(&beta) {
        return invalid(format!("density {beta} is outside [0, 1]"));
    }
    let total = binomial(n as u64, k as u64);
    let target = ((beta * total as f64).round() as u128).min(cap as u128).min(total) as usize;
    let mut rng = Prng::seeded(seed);
    let mut draw = |count: usize| {
        let mut seen = HashSet::with_capacity(count);
        let mut order = Vec::with_capacity(count);
        while order.len() < count {
            let m = mask_of(&rng.sample_distinct(n, k));
            if seen.insert(m) {
                order.push(m);
            }
        }
        seen
    };
    let members: Vec<u64> = if 2 * target as u128 <= total {
        draw(target).into_iter().collect()
    } else {
        if total > 1 << 24 {
            return invalid(format!("dense sample of {target} out of {total} sets is too large"));
        }
        let drop = draw(total as usize - target);
        Combinations::new(n, k).map(|c| mask_of(&c)).filter(|m| !drop.contains(m)).collect()
    };
    Ok(FamilySample {
        family: SetFamily::from_masks(n, k, members)?,
        beta,
        target,
        seed,
    })
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    n: usize,
    k: usize,
    members: Vec<VertexSet>,
}

impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr {
            n: self.n,
            k: self.k,
            members: self.members().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FamilyRepr::deserialize(d)?;
        SetFamily::new(r.n, r.k, r.members).map_err(serde::de::Error::custom)
    }
}
