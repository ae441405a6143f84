//! Edge colourings: storage, colour classes, the block-weight extremal
//! constructions, and exhaustive or seeded enumeration.

use serde::{Deserialize, Serialize};

use crate::combin::saturating_pow;
use crate::error::{invalid, Error, Result};
use crate::hypercore::{complete, Edge, Hypergraph, VertexSet};
use crate::rng::Prng;

/// Default cap on exhaustive colouring enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;

/// Colour ids `1..=q`, one per edge, parallel to the hypergraph's colex edge order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colouring {
    pub q: u32,
    pub assignment: Vec<u32>,
}

impl Colouring {
    pub fn new(q: u32, assignment: Vec<u32>) -> Result<Self> {
        if q == 0 {
            return invalid("colour count must be at least 1");
        }
        if let Some(bad) = assignment.iter().find(|&&c| c == 0 || c > q) {
            return invalid(format!("colour {bad} outside 1..={q}"));
        }
        Ok(Colouring { q, assignment })
    }

    pub fn uniform(q: u32, edges: usize, colour: u32) -> Self {
        Colouring {
            q,
            assignment: vec![colour; edges],
        }
    }

    pub fn check_against(&self, h: &Hypergraph) -> Result<()> {
        if self.assignment.len() != h.edge_count() {
            return invalid(format!(
                "colouring has {} entries but the hypergraph has {} edges",
                self.assignment.len(),
                h.edge_count()
            ));
        }
        if let Some(bad) = self.assignment.iter().find(|&&c| c == 0 || c > self.q) {
            return invalid(format!("colour {bad} outside 1..={}", self.q));
        }
        Ok(())
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.q as usize];
        for &c in &self.assignment {
            sizes[c as usize - 1] += 1;
        }
        sizes
    }

    /// Colouring of `induced`, given the original positions of its edges.
    pub fn restrict(&self, positions: &[usize]) -> Colouring {
        Colouring {
            q: self.q,
            assignment: positions.iter().map(|&p| self.assignment[p]).collect(),
        }
    }
}

/// Spanning subgraph of the edges coloured `colour`.
pub fn colour_class(h: &Hypergraph, c: &Colouring, colour: u32) -> Result<Hypergraph> {
    if colour == 0 || colour > c.q {
        return invalid(format!("colour {colour} outside 1..={}", c.q));
    }
    c.check_against(h)?;
    Ok(h.filter_edges(|i, _| c.assignment[i] == colour))
}

/// All colour classes, index `i` holding colour `i + 1`.
pub fn colour_classes(h: &Hypergraph, c: &Colouring) -> Result<Vec<Hypergraph>> {
    (1..=c.q).map(|i| colour_class(h, c, i)).collect()
}

/// Positive block weights summing to `r + q - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightVector(Vec<u32>);

impl WeightVector {
    pub fn new(x: Vec<u32>, r: usize) -> Result<Self> {
        if x.is_empty() {
            return invalid("weight vector is empty");
        }
        if x.contains(&0) {
            return invalid("weights must be positive");
        }
        let sum: u64 = x.iter().map(|&v| v as u64).sum();
        let want = (r + x.len() - 1) as u64;
        if sum != want {
            return invalid(format!("weights sum to {sum}, expected r + q - 1 = {want}"));
        }
        Ok(WeightVector(x))
    }

    /// `(1, ..., 1, r)`: the construction with one large block.
    pub fn standard(r: usize, q: usize) -> Self {
        let mut x = vec![1; q];
        x[q - 1] = r as u32;
        WeightVector(x)
    }

    pub fn weights(&self) -> &[u32] {
        &self.0
    }

    pub fn q(&self) -> usize {
        self.0.len()
    }
}

/// Colours an edge by the smallest `i` with `|e ∩ V_i| >= x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalRule {
    pub weights: WeightVector,
    pub blocks: Vec<VertexSet>,
}

impl ExtremalRule {
    /// Blocks of sizes `floor(x_i * n / (r+q-1))`, remainder to the last block,
    /// laid out over ascending vertex ids.
    pub fn new(n: usize, r: usize, weights: WeightVector) -> Result<Self> {
        if n < r {
            return invalid(format!("n = {n} < r = {r}"));
        }
        let q = weights.q();
        let total = (r + q - 1) as u64;
        let mut blocks = Vec::with_capacity(q);
        let mut start = 0u32;
        for (i, &x) in weights.weights().iter().enumerate() {
            let size = if i + 1 == q {
                n as u32 - start
            } else {
                (x as u64 * n as u64 / total) as u32
            };
            blocks.push(VertexSet::range(start, start + size));
            start += size;
        }
        Ok(ExtremalRule { weights, blocks })
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    pub fn colour_of(&self, e: &Edge) -> u32 {
        for (i, (b, &x)) in self.blocks.iter().zip(self.weights.weights()).enumerate() {
            let hits = e.vertices().iter().filter(|&&v| b.contains(v)).count();
            if hits >= x as usize {
                return i as u32 + 1;
            }
        }
        // sum of (x_i - 1) is r - 1 < |e|, so some block always qualifies
        unreachable!("edge {e:?} meets no block in its weight")
    }

    pub fn colour(&self, h: &Hypergraph) -> Colouring {
        Colouring {
            q: self.weights.q() as u32,
            assignment: h.edges().iter().map(|e| self.colour_of(e)).collect(),
        }
    }

    /// Largest possible monochromatic matching: `max_i floor(|V_i| / x_i)`.
    pub fn matching_upper_bound(&self) -> usize {
        self.blocks
            .iter()
            .zip(self.weights.weights())
            .map(|(b, &x)| b.len() / x as usize)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalColouring {
    pub colouring: Colouring,
    pub rule: ExtremalRule,
}

/// The block-weight extremal colouring of the complete `r`-graph on `n` vertices.
pub fn extremal_colouring(n: usize, r: usize, q: usize, x: WeightVector) -> Result<ExtremalColouring> {
    if x.q() != q {
        return invalid(format!("weight vector has {} entries, expected q = {q}", x.q()));
    }
    let rule = ExtremalRule::new(n, r, x)?;
    let colouring = rule.colour(&complete(n, r)?);
    Ok(ExtremalColouring { colouring, rule })
}

/// Number of colourings enumeration would produce, or an error above `budget`.
pub fn enumeration_count(edges: usize, q: u32, budget: u128) -> Result<u128> {
    let count = saturating_pow(q as u128, edges as u64);
    if count > budget {
        return Err(Error::BudgetExceeded {
            what: format!("{q}^{edges} colourings"),
            needed: count,
            budget,
        });
    }
    Ok(count)
}

/// Every colouring of `h` with `q` colours, lexicographic in the assignment array.
pub fn enumerate_colourings(h: &Hypergraph, q: u32, budget: u128) -> Result<ColouringIter> {
    if q == 0 {
        return invalid("colour count must be at least 1");
    }
    enumeration_count(h.edge_count(), q, budget)?;
    Ok(ColouringIter {
        q,
        next: Some(vec![1; h.edge_count()]),
    })
}

pub struct ColouringIter {
    q: u32,
    next: Option<Vec<u32>>,
}

impl Iterator for ColouringIter {
    type Item = Colouring;

    fn next(&mut self) -> Option<Colouring> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if succ[i] < self.q {
                succ[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ[i] = 1;
        }
        Some(Colouring {
            q: self.q,
            assignment: cur,
        })
    }
}

/// Independent uniform colour per edge from the seeded stream.
pub fn random_colouring(h: &Hypergraph, q: u32, seed: u64) -> Result<Colouring> {
    if q == 0 {
        return invalid("colour count must be at least 1");
    }
    let mut rng = Prng::seeded(seed);
    let assignment = (0..h.edge_count()).map(|_| rng.below(q as u64) as u32 + 1).collect();
    Ok(Colouring { q, assignment })
}
