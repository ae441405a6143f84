//! Exact maximum matching by branch and bound over colex edge order.

use super::blossom::maximum_matching;
use crate::hypercore::{Edge, Hypergraph, Matching};

/// A maximum matching; among all maximum ones, the lexicographically least set
/// of edge positions.
pub fn max_matching_exact(h: &Hypergraph) -> Matching {
    let target = if h.r() == 2 {
        blossom_size(h)
    } else {
        (h.n() / h.r().max(1)).min(h.edge_count())
    };
    let chosen = BranchAndBound::new(h, target).run();
    Matching::new(chosen.into_iter().map(|i| h.edges()[i].clone()).collect(), None)
}

/// Size of a maximum matching (blossom for graphs, branch and bound otherwise).
pub fn matching_number(h: &Hypergraph) -> usize {
    match h.r() {
        1 => h.edge_count(),
        2 => blossom_size(h),
        _ => max_matching_exact(h).size(),
    }
}

/// A maximum matching of a 2-graph by Edmonds' algorithm (no tie-breaking guarantee).
pub fn blossom_matching(h: &Hypergraph) -> Matching {
    assert_eq!(h.r(), 2, "blossom_matching needs a 2-graph");
    let mates = maximum_matching(h.n(), &pairs(h));
    let mut edges = Vec::new();
    for (v, m) in mates.iter().enumerate() {
        if let Some(u) = *m {
            if (v as u32) < u {
                edges.push(Edge::new(&[v as u32, u]).expect("distinct"));
            }
        }
    }
    edges.sort();
    Matching::new(edges, None)
}

fn blossom_size(h: &Hypergraph) -> usize {
    maximum_matching(h.n(), &pairs(h)).iter().filter(|m| m.is_some()).count() / 2
}

fn pairs(h: &Hypergraph) -> Vec<(u32, u32)> {
    h.edges().iter().map(|e| (e.vertices()[0], e.vertices()[1])).collect()
}

/// Include-first DFS over edges in colex order visits matchings in
/// lexicographic order of their position sets, so the first matching of
/// maximum size found is the lexicographically least one.
struct BranchAndBound<'a> {
    h: &'a Hypergraph,
    words: usize,
    masks: Vec<u64>,
    target: usize,
    chosen: Vec<usize>,
    best: Vec<usize>,
    used: Vec<u64>,
    done: bool,
}

impl<'a> BranchAndBound<'a> {
    fn new(h: &'a Hypergraph, target: usize) -> Self {
        let words = h.n().div_ceil(64).max(1);
        let mut masks = vec![0u64; words * h.edge_count()];
        for (i, e) in h.edges().iter().enumerate() {
            for &v in e.vertices() {
                masks[i * words + v as usize / 64] |= 1 << (v % 64);
            }
        }
        BranchAndBound {
            h,
            words,
            masks,
            target,
            chosen: Vec::new(),
            best: Vec::new(),
            used: vec![0; words],
            done: false,
        }
    }

    fn run(mut self) -> Vec<usize> {
        if self.target > 0 {
            self.dfs(0);
        }
        self.best
    }

    fn mask(&self, i: usize) -> &[u64] {
        &self.masks[i * self.words..(i + 1) * self.words]
    }

    fn free(&self, i: usize) -> bool {
        self.mask(i).iter().zip(&self.used).all(|(a, b)| a & b == 0)
    }

    fn toggle(&mut self, i: usize) {
        for w in 0..self.words {
            self.used[w] ^= self.masks[i * self.words + w];
        }
    }

    fn dfs(&mut self, from: usize) {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
            if self.best.len() >= self.target {
                self.done = true;
                return;
            }
        }
        let avail: Vec<usize> = (from..self.h.edge_count()).filter(|&i| self.free(i)).collect();
        if avail.is_empty() || self.chosen.len() + self.upper_bound(&avail) <= self.best.len() {
            return;
        }
        for &j in &avail {
            if !self.free(j) {
                continue;
            }
            self.chosen.push(j);
            self.toggle(j);
            self.dfs(j + 1);
            self.toggle(j);
            self.chosen.pop();
            if self.done {
                return;
            }
        }
    }

    /// min(covered vertices / r, size of a greedy transversal) over the available edges.
    fn upper_bound(&self, avail: &[usize]) -> usize {
        let mut covered = vec![0u64; self.words];
        for &i in avail {
            for (c, m) in covered.iter_mut().zip(self.mask(i)) {
                *c |= m;
            }
        }
        let by_cover = covered.iter().map(|w| w.count_ones() as usize).sum::<usize>() / self.h.r();
        by_cover.min(greedy_transversal(self.h, avail))
    }
}

/// Size of a vertex set meeting every listed edge, picked by maximum degree.
/// Any transversal bounds the matching number from above.
fn greedy_transversal(h: &Hypergraph, avail: &[usize]) -> usize {
    let mut alive: Vec<&Edge> = avail.iter().map(|&i| &h.edges()[i]).collect();
    let mut degree = std::collections::HashMap::new();
    let mut size = 0;
    while !alive.is_empty() {
        degree.clear();
        for e in &alive {
            for &v in e.vertices() {
                *degree.entry(v).or_insert(0usize) += 1;
            }
        }
        let (&pick, _) = degree
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .expect("non-empty");
        alive.retain(|e| !e.contains(pick));
        size += 1;
    }
    size
}
