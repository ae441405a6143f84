use num::{BigInt, BigRational};

use crate::hypercore::{crossing_edges, Hypergraph, Incidence, VertexSet};

/// A hypergraph with its incidence lists, for repeated r-partite counting.
pub(crate) struct Probe<'a> {
    pub h: &'a Hypergraph,
    inc: Incidence,
}

impl<'a> Probe<'a> {
    pub fn new(h: &'a Hypergraph) -> Self {
        Probe { h, inc: Incidence::new(h) }
    }

    pub fn count(&self, parts: &[&VertexSet]) -> u64 {
        crossing_edges(self.h, &self.inc, parts)
    }

    /// For each vertex of `parts[target]`, the number of crossing edges through it.
    /// Returned in ascending vertex order.
    pub fn degrees(&self, parts: &[&VertexSet], target: usize) -> Vec<(u32, u64)> {
        let r = parts.len();
        let mut label = vec![u32::MAX; self.h.n()];
        for (i, p) in parts.iter().enumerate() {
            for v in p.iter() {
                label[v as usize] = i as u32;
            }
        }
        let cand: Vec<u32> = parts[target].iter().collect();
        let mut slot = vec![0u32; self.h.n()];
        for (k, &v) in cand.iter().enumerate() {
            slot[v as usize] = k as u32;
        }
        let mut deg = vec![0u64; cand.len()];
        let pivot = (0..r).filter(|&i| i != target).min_by_key(|&i| parts[i].len());
        let Some(pivot) = pivot else {
            return cand.into_iter().zip(deg).collect();
        };
        let mut hit = vec![false; r];
        for v in parts[pivot].iter() {
            'edges: for j in 0..self.inc.of(v).len() {
                hit.iter_mut().for_each(|x| *x = false);
                hit[pivot] = true;
                let mut at = u32::MAX;
                for &u in self.inc.others(v, j) {
                    let l = label[u as usize];
                    if l == u32::MAX || hit[l as usize] {
                        continue 'edges;
                    }
                    hit[l as usize] = true;
                    if l as usize == target {
                        at = u;
                    }
                }
                deg[slot[at as usize] as usize] += 1;
            }
        }
        cand.into_iter().zip(deg).collect()
    }
}

/// `size` entries with the largest (or smallest) degree, ties broken by vertex id.
pub(crate) fn extreme(degrees: &[(u32, u64)], size: usize, largest: bool) -> (VertexSet, u64) {
    let mut order: Vec<&(u32, u64)> = degrees.iter().collect();
    if largest {
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    } else {
        order.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    }
    let chosen = &order[..size.min(order.len())];
    (chosen.iter().map(|x| x.0).collect(), chosen.iter().map(|x| x.1).sum())
}

pub(crate) fn density(e: u64, pi: u128) -> BigRational {
    BigRational::new(BigInt::from(e), BigInt::from(pi))
}
