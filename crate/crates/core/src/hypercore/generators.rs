use super::hypergraph::{Edge, Hypergraph};
use super::vertex_set::MAX_VERTICES;
use crate::combin::{binomial, colex_unrank, Combinations};
use crate::error::{invalid, Result};
use crate::rng::Prng;

/// The complete `r`-graph on `n` vertices.
pub fn complete(n: usize, r: usize) -> Result<Hypergraph> {
    if r < 2 || r > n {
        return invalid(format!("complete({n}, {r}) needs 2 <= r <= n"));
    }
    if n > MAX_VERTICES {
        return invalid(format!("n = {n} exceeds the vertex cap"));
    }
    let mut edges = Vec::with_capacity(binomial(n as u64, r as u64).min(1 << 24) as usize);
    let mut cursor = Combinations::new(n, r);
    while let Some(c) = cursor.advance() {
        edges.push(Edge::from_sorted(c));
    }
    Ok(Hypergraph::from_sorted_unchecked(n, r, edges))
}

/// The Kneser hypergraph KG^k(n, r).
///
/// Vertex `i` stands for the `r`-subset of `0..n` with colex rank `i`; a `k`-set
/// of vertices is an edge iff its subsets are pairwise disjoint.
pub fn kneser(n: usize, r: usize, k: usize) -> Result<Hypergraph> {
    if k < 2 || r == 0 {
        return invalid(format!("kneser({n}, {r}, {k}) needs k >= 2 and r >= 1"));
    }
    if n < k * r {
        return invalid(format!("kneser({n}, {r}, {k}) needs n >= k*r = {}", k * r));
    }
    if n > 64 {
        return invalid("kneser supports n <= 64");
    }
    let count = binomial(n as u64, r as u64);
    if count > MAX_VERTICES as u128 {
        return invalid(format!("kneser({n}, {r}, {k}) has {count} vertices"));
    }
    let masks: Vec<u64> = (0..count as u64)
        .map(|i| kneser_subset(i, r).iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let mut edges = Vec::new();
    let mut stack = Vec::with_capacity(k);
    extend_disjoint(&masks, k, 0, 0, &mut stack, &mut edges);
    edges.sort_unstable();
    Ok(Hypergraph::from_sorted_unchecked(count as usize, k, edges))
}

/// The `r`-subset of `[n]` indexed by Kneser vertex `index`.
pub fn kneser_subset(index: u64, r: usize) -> Vec<u32> {
    colex_unrank(index, r)
}

fn extend_disjoint(
    masks: &[u64],
    k: usize,
    from: usize,
    used: u64,
    stack: &mut Vec<u32>,
    out: &mut Vec<Edge>,
) {
    if stack.len() == k {
        out.push(Edge::from_sorted(stack));
        return;
    }
    for (i, &m) in masks.iter().enumerate().skip(from) {
        if m & used == 0 {
            stack.push(i as u32);
            extend_disjoint(masks, k, i + 1, used | m, stack, out);
            stack.pop();
        }
    }
}

/// The binomial random `r`-graph: every `r`-set, visited in colex order, is kept
/// when the next uniform draw of the seeded stream is below `p`.
pub fn random_gnp(n: usize, r: usize, p: f64, seed: u64) -> Result<Hypergraph> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    if r < 2 {
        return invalid("uniformity must be at least 2");
    }
    if n > MAX_VERTICES {
        return invalid(format!("n = {n} exceeds the vertex cap"));
    }
    let mut rng = Prng::seeded(seed);
    let mut edges = Vec::new();
    let mut cursor = Combinations::new(n, r);
    while let Some(c) = cursor.advance() {
        if rng.bernoulli(p) {
            edges.push(Edge::from_sorted(c));
        }
    }
    Ok(Hypergraph::from_sorted_unchecked(n, r, edges))
}

/// `h` with `count` of its edges removed, chosen uniformly by the seeded stream.
pub fn delete_random_edges(h: &Hypergraph, count: usize, seed: u64) -> Result<Hypergraph> {
    if count > h.edge_count() {
        return invalid(format!("cannot delete {count} of {} edges", h.edge_count()));
    }
    let gone = Prng::seeded(seed).sample_distinct(h.edge_count(), count);
    let mut next = gone.iter().peekable();
    Ok(h.filter_edges(|i, _| {
        if next.peek() == Some(&&(i as u32)) {
            next.next();
            false
        } else {
            true
        }
    }))
}
