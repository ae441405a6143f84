use num::{BigInt, BigRational, Zero};

use super::hypergraph::Hypergraph;
use super::vertex_set::VertexSet;
use crate::error::{invalid, Result};

/// Edge positions incident to each vertex, with the other r - 1 vertices of each
/// incident edge stored alongside so counting never touches the edge list.
pub struct Incidence {
    lists: Vec<Vec<u32>>,
    others: Vec<Vec<u32>>,
    arity: usize,
}

impl Incidence {
    pub fn new(h: &Hypergraph) -> Self {
        let mut lists = vec![Vec::new(); h.n()];
        let mut others = vec![Vec::new(); h.n()];
        for (i, e) in h.edges().iter().enumerate() {
            for &v in e.vertices() {
                lists[v as usize].push(i as u32);
                others[v as usize].extend(e.vertices().iter().copied().filter(|&u| u != v));
            }
        }
        Incidence {
            lists,
            others,
            arity: h.r().saturating_sub(1),
        }
    }

    pub fn of(&self, v: u32) -> &[u32] {
        &self.lists[v as usize]
    }

    /// The other vertices of the j-th edge in `of(v)`.
    pub fn others(&self, v: u32, j: usize) -> &[u32] {
        &self.others[v as usize][j * self.arity..(j + 1) * self.arity]
    }
}

/// |E(X_1, ..., X_r)|: edges with exactly one vertex in each part.
///
/// Parts must be pairwise disjoint; this is not re-checked here.
pub fn crossing_edges(h: &Hypergraph, inc: &Incidence, parts: &[&VertexSet]) -> u64 {
    if parts.len() != h.r() || parts.iter().any(|p| p.is_empty()) {
        return 0;
    }
    let mut label = vec![u32::MAX; h.n()];
    for (i, p) in parts.iter().enumerate() {
        for v in p.iter() {
            if (v as usize) < label.len() {
                label[v as usize] = i as u32;
            }
        }
    }
    let pivot = (0..parts.len()).min_by_key(|&i| parts[i].len()).unwrap();
    // an edge crosses when its r vertices carry r distinct part bits
    let r = parts.len() as u32;
    if r > 128 {
        return crossing_edges_wide(h, &label, parts, pivot);
    }
    let mut count = 0u64;
    for v in parts[pivot].iter() {
        if v as usize >= h.n() {
            continue;
        }
        let k = inc.arity;
        if k == 0 {
            count += inc.of(v).len() as u64;
            continue;
        }
        let flat = &inc.others[v as usize];
        'edges: for other in flat.chunks_exact(k) {
            let mut seen = 1u128 << (pivot % 128);
            for &u in other {
                let l = label[u as usize];
                if l == u32::MAX {
                    continue 'edges;
                }
                seen |= 1 << (l % 128);
            }
            count += (seen.count_ones() == r) as u64;
        }
    }
    count
}

/// Uniformities too large for a bitmask of parts.
fn crossing_edges_wide(h: &Hypergraph, label: &[u32], parts: &[&VertexSet], pivot: usize) -> u64 {
    let mut hit = vec![false; parts.len()];
    h.edges()
        .iter()
        .filter(|e| e.meets(parts[pivot]))
        .filter(|e| {
            hit.iter_mut().for_each(|x| *x = false);
            e.vertices().iter().all(|&u| {
                let l = label[u as usize];
                l != u32::MAX && !std::mem::replace(&mut hit[l as usize], true)
            })
        })
        .count() as u64
}

pub fn product_of_sizes(parts: &[&VertexSet]) -> u128 {
    parts.iter().map(|p| p.len() as u128).product()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartiteDensity {
    pub crossing: u64,
    pub pi: u128,
    /// |E(X_1..X_r)| / prod |X_i|
    pub raw: BigRational,
    /// raw / p
    pub scaled: BigRational,
}

pub(crate) fn check_blocks(blocks: &[&VertexSet]) -> Result<()> {
    for (i, a) in blocks.iter().enumerate() {
        if a.is_empty() {
            return invalid(format!("block {i} is empty"));
        }
        for b in &blocks[i + 1..] {
            if !a.is_disjoint(b) {
                return invalid("blocks overlap");
            }
        }
    }
    Ok(())
}

pub fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Raw and `p`-scaled density of the r-partite subgraph spanned by `blocks`.
pub fn partite_density(h: &Hypergraph, blocks: &[VertexSet], p: &BigRational) -> Result<PartiteDensity> {
    let refs: Vec<&VertexSet> = blocks.iter().collect();
    if refs.len() != h.r() {
        return invalid(format!("need exactly r = {} blocks, got {}", h.r(), refs.len()));
    }
    check_blocks(&refs)?;
    if *p <= BigRational::zero() {
        return invalid("density scale p must be positive");
    }
    let inc = Incidence::new(h);
    let crossing = crossing_edges(h, &inc, &refs);
    let pi = product_of_sizes(&refs);
    let raw = ratio(crossing as u128, pi);
    let scaled = &raw / p;
    Ok(PartiteDensity {
        crossing,
        pi,
        raw,
        scaled,
    })
}
