//! Proper colourings of Kneser hypergraphs by backtracking.

use serde::Serialize;

use crate::combin::binomial;
use crate::error::{invalid, Result};
use crate::hypercore::kneser_subset;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KneserVerdict {
    /// Colour (1-based) of every Kneser vertex, indexed by colex rank of its r-subset.
    Colourable { certificate: Vec<u32> },
    NotColourable,
    /// The node budget ran out before the search tree was exhausted.
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct KneserReport {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub q: usize,
    pub verdict: KneserVerdict,
    pub nodes: u64,
}

impl KneserReport {
    pub fn colourable(&self) -> Option<bool> {
        match self.verdict {
            KneserVerdict::Colourable { .. } => Some(true),
            KneserVerdict::NotColourable => Some(false),
            KneserVerdict::Unknown => None,
        }
    }
}

/// Decides whether KG^k(n, r) has a proper `q`-colouring: no colour class may
/// contain `k` pairwise disjoint r-subsets.
///
/// Vertices are coloured in ascending rank and a vertex may only open the
/// next unused colour, which removes colour-permutation symmetry.
pub fn kneser_colourable(n: usize, r: usize, k: usize, q: usize, node_budget: u64) -> Result<KneserReport> {
    if k < 2 || r == 0 || q == 0 {
        return invalid("need k >= 2, r >= 1, q >= 1");
    }
    if n > 64 {
        return invalid("kneser colouring supports n <= 64");
    }
    let count = binomial(n as u64, r as u64);
    if count > 1 << 20 {
        return invalid(format!("KG({n},{r}) has {count} vertices"));
    }
    let masks: Vec<u64> = (0..count as u64)
        .map(|i| kneser_subset(i, r).iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let mut search = Search {
        masks: &masks,
        k,
        q,
        colour: vec![0; masks.len()],
        classes: vec![Vec::new(); q],
        nodes: 0,
        budget: node_budget,
        exhausted_budget: false,
    };
    let found = search.colour_from(0, 0);
    let verdict = if found {
        KneserVerdict::Colourable {
            certificate: search.colour.iter().map(|&c| c as u32 + 1).collect(),
        }
    } else if search.exhausted_budget {
        KneserVerdict::Unknown
    } else {
        KneserVerdict::NotColourable
    };
    Ok(KneserReport {
        n,
        r,
        k,
        q,
        verdict,
        nodes: search.nodes,
    })
}

struct Search<'a> {
    masks: &'a [u64],
    k: usize,
    q: usize,
    colour: Vec<usize>,
    classes: Vec<Vec<u64>>,
    nodes: u64,
    budget: u64,
    exhausted_budget: bool,
}

impl Search<'_> {
    fn colour_from(&mut self, v: usize, used_colours: usize) -> bool {
        if v == self.masks.len() {
            return true;
        }
        let open = (used_colours + 1).min(self.q);
        for c in 0..open {
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted_budget = true;
                return false;
            }
            if has_disjoint_family(&self.classes[c], self.masks[v], self.k - 1) {
                continue;
            }
            self.colour[v] = c;
            self.classes[c].push(self.masks[v]);
            if self.colour_from(v + 1, used_colours.max(c + 1)) {
                return true;
            }
            self.classes[c].pop();
            if self.exhausted_budget {
                return false;
            }
        }
        false
    }
}

/// Whether `members` holds `need` pairwise disjoint sets all disjoint from `avoid`.
fn has_disjoint_family(members: &[u64], avoid: u64, need: usize) -> bool {
    if need == 0 {
        return true;
    }
    members
        .iter()
        .enumerate()
        .any(|(i, &m)| m & avoid == 0 && has_disjoint_family(&members[i + 1..], avoid | m, need - 1))
}

/// Checks a certificate independently: no colour class contains `k` pairwise
/// disjoint r-subsets.
pub fn is_proper_kneser_colouring(n: usize, r: usize, k: usize, colours: &[u32]) -> bool {
    let count = binomial(n as u64, r as u64) as usize;
    if colours.len() != count {
        return false;
    }
    let masks: Vec<u64> = (0..count as u64)
        .map(|i| kneser_subset(i, r).iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let max = colours.iter().copied().max().unwrap_or(0);
    (1..=max).all(|c| {
        let class: Vec<u64> = masks.iter().zip(colours).filter(|(_, &x)| x == c).map(|(m, _)| *m).collect();
        !has_disjoint_family(&class, 0, k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 50_000_000;

    #[test]
    fn petersen_thresholds() {
        let two = kneser_colourable(5, 2, 2, 2, BUDGET).unwrap();
        assert_eq!(two.colourable(), Some(false));
        let three = kneser_colourable(5, 2, 2, 3, BUDGET).unwrap();
        match &three.verdict {
            KneserVerdict::Colourable { certificate } => {
                assert!(is_proper_kneser_colouring(5, 2, 2, certificate));
                assert!(certificate.iter().all(|&c| (1..=3).contains(&c)));
            }
            other => panic!("expected a colouring, got {other:?}"),
        }
        assert_eq!(kneser_colourable(6, 2, 2, 3, BUDGET).unwrap().colourable(), Some(false));
        assert_eq!(kneser_colourable(6, 2, 2, 4, BUDGET).unwrap().colourable(), Some(true));
    }

    #[test]
    fn monotone_in_q() {
        for (n, r, k) in [(5, 2, 2), (6, 2, 2), (7, 2, 3), (6, 2, 3)] {
            let mut prev = false;
            for q in 1..6 {
                let now = kneser_colourable(n, r, k, q, BUDGET).unwrap().colourable().unwrap();
                assert!(!prev || now, "colourable at q-1 but not at q={q} for ({n},{r},{k})");
                prev = now;
            }
        }
    }

    #[test]
    fn hypergraph_threshold() {
        // n >= (q-1)(k-1) + kr forbids a q-colouring: (7,2,3): (q-1)*2 + 6 <= 7 iff q = 1
        assert_eq!(kneser_colourable(7, 2, 3, 1, BUDGET).unwrap().colourable(), Some(false));
        assert_eq!(kneser_colourable(7, 2, 3, 2, BUDGET).unwrap().colourable(), Some(true));
    }

    #[test]
    fn tiny_budget_is_unknown() {
        let rep = kneser_colourable(6, 2, 2, 3, 10).unwrap();
        assert_eq!(rep.verdict, KneserVerdict::Unknown);
    }

    #[test]
    fn rejects_improper_certificate() {
        assert!(!is_proper_kneser_colouring(5, 2, 2, &[1; 10]));
    }
}
