use crate::error::{invalid, Result};
use crate::hypercore::{check_blocks, Edge, Hypergraph, Matching, VertexSet};

/// Position of each vertex's part, `u32::MAX` outside all parts.
fn part_labels(n: usize, parts: &[VertexSet]) -> Vec<u32> {
    let mut label = vec![u32::MAX; n];
    for (i, p) in parts.iter().enumerate() {
        for v in p.iter().filter(|&v| (v as usize) < n) {
            label[v as usize] = i as u32;
        }
    }
    label
}

fn is_crossing(e: &Edge, label: &[u32], parts: usize) -> bool {
    let mut seen = 0u64;
    for &v in e.vertices() {
        let l = label[v as usize];
        if l == u32::MAX || seen >> l & 1 == 1 {
            return false;
        }
        seen |= 1 << l;
    }
    seen.count_ones() as usize == parts
}

/// Greedy maximal matching among edges with exactly one vertex per part, scanning
/// edges in colex order.
pub fn regular_tuple_matching(h: &Hypergraph, parts: &[VertexSet]) -> Result<Matching> {
    if parts.len() != h.r() {
        return invalid(format!("need r = {} parts, got {}", h.r(), parts.len()));
    }
    if parts.len() > 64 {
        return invalid("at most 64 parts");
    }
    let refs: Vec<&VertexSet> = parts.iter().collect();
    check_blocks(&refs)?;
    let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
    if sizes.iter().max().unwrap() - sizes.iter().min().unwrap() > 1 {
        return invalid(format!("part sizes {sizes:?} differ by more than one"));
    }
    let label = part_labels(h.n(), parts);
    let mut used = VertexSet::new();
    let mut edges = Vec::new();
    for e in h.edges() {
        if is_crossing(e, &label, parts.len()) && !e.meets(&used) {
            for &v in e.vertices() {
                used.insert(v);
            }
            edges.push(e.clone());
        }
    }
    Ok(Matching::new(edges, None))
}

/// No crossing edge of `h` avoids every vertex of `m`.
pub fn is_maximal_crossing(h: &Hypergraph, parts: &[VertexSet], m: &Matching) -> bool {
    let label = part_labels(h.n(), parts);
    let covered = m.covered();
    h.edges()
        .iter()
        .all(|e| !is_crossing(e, &label, parts.len()) || e.meets(&covered))
}
