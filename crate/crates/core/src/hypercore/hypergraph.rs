use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use super::vertex_set::{VertexSet, MAX_VERTICES};
use crate::error::{invalid, Error, Result};

/// An edge as its sorted member list. Ordered colexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Edge(SmallVec<[u32; 4]>);

impl Edge {
    /// Builds an edge from distinct vertices in any order.
    pub fn new(vertices: &[u32]) -> Result<Self> {
        let mut v: SmallVec<[u32; 4]> = vertices.iter().copied().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("edge {vertices:?} repeats a vertex"));
        }
        Ok(Edge(v))
    }

    /// Caller guarantees `sorted` is strictly ascending.
    pub(crate) fn from_sorted(sorted: &[u32]) -> Self {
        debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
        Edge(sorted.iter().copied().collect())
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn to_set(&self) -> VertexSet {
        VertexSet::from_slice(&self.0)
    }

    pub fn is_disjoint(&self, other: &Edge) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn meets(&self, set: &VertexSet) -> bool {
        self.0.iter().any(|&v| set.contains(v))
    }

    pub fn is_inside(&self, set: &VertexSet) -> bool {
        self.0.iter().all(|&v| set.contains(v))
    }

    pub fn max_vertex(&self) -> Option<u32> {
        self.0.last().copied()
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        // colex: compare from the largest member down, then by length
        self.0
            .iter()
            .rev()
            .cmp(other.0.iter().rev())
            .then(self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|v| v + 1))
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<u32>::deserialize(d)?;
        if labels.iter().any(|&l| l == 0) {
            return Err(serde::de::Error::custom("vertex labels are 1-based"));
        }
        let zero: Vec<u32> = labels.iter().map(|l| l - 1).collect();
        Edge::new(&zero).map_err(serde::de::Error::custom)
    }
}

/// An `r`-uniform hypergraph on vertices `0..n` with colex-sorted, duplicate-free edges.
#[derive(Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    r: usize,
    edges: Vec<Edge>,
}

impl Hypergraph {
    /// Validates uniformity and range, then sorts and removes duplicate edges.
    pub fn new(n: usize, r: usize, mut edges: Vec<Edge>) -> Result<Self> {
        if n > MAX_VERTICES {
            return invalid(format!("n = {n} exceeds the vertex cap {MAX_VERTICES}"));
        }
        if r == 0 {
            return invalid("uniformity must be positive");
        }
        for e in &edges {
            if e.len() != r {
                return invalid(format!("edge {e:?} has {} vertices, expected {r}", e.len()));
            }
            if e.max_vertex().is_some_and(|m| m as usize >= n) {
                return invalid(format!("edge {e:?} leaves the vertex range 0..{n}"));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Hypergraph { n, r, edges })
    }

    /// Used by generators that already emit sorted, valid edges.
    pub(crate) fn from_sorted_unchecked(n: usize, r: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Hypergraph { n, r, edges }
    }

    pub fn edgeless(n: usize, r: usize) -> Self {
        Hypergraph {
            n,
            r,
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn position(&self, e: &Edge) -> Option<usize> {
        self.edges.binary_search(e).ok()
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.position(e).is_some()
    }

    /// Spanning subgraph keeping the edges whose positions satisfy `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, &Edge) -> bool) -> Hypergraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, e)| keep(*i, e))
            .map(|(_, e)| e.clone())
            .collect();
        Hypergraph {
            n: self.n,
            r: self.r,
            edges,
        }
    }

    /// Sub-hypergraph induced on `s`, relabelled so the i-th smallest member of `s` becomes vertex i.
    pub fn induced(&self, s: &VertexSet) -> Hypergraph {
        self.induced_with_positions(s).0
    }

    /// As [`Hypergraph::induced`], also returning the original position of every kept edge.
    pub fn induced_with_positions(&self, s: &VertexSet) -> (Hypergraph, Vec<usize>) {
        let members = s.to_vec();
        let mut relabel = std::collections::HashMap::with_capacity(members.len());
        for (i, &v) in members.iter().enumerate() {
            relabel.insert(v, i as u32);
        }
        let mut kept = Vec::new();
        let mut positions = Vec::new();
        for (pos, e) in self.edges.iter().enumerate() {
            if e.is_inside(s) {
                let mapped: SmallVec<[u32; 4]> = e.0.iter().map(|v| relabel[v]).collect();
                // relabelling is monotone, so members stay sorted and colex order is kept
                kept.push(Edge(mapped));
                positions.push(pos);
            }
        }
        (
            Hypergraph {
                n: members.len(),
                r: self.r,
                edges: kept,
            },
            positions,
        )
    }

    /// True iff every `r`-subset of `s` is an edge; vacuous when `|s| < r`.
    pub fn is_clique(&self, s: &VertexSet) -> bool {
        let members = s.to_vec();
        if members.len() < self.r {
            return true;
        }
        let mut cursor = crate::combin::Combinations::new(members.len(), self.r);
        let mut buf = Vec::with_capacity(self.r);
        while let Some(idx) = cursor.advance() {
            buf.clear();
            buf.extend(idx.iter().map(|&i| members[i as usize]));
            if !self.contains_edge(&Edge::from_sorted(&buf)) {
                return false;
            }
        }
        true
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }
}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypergraph")
            .field("n", &self.n)
            .field("r", &self.r)
            .field("edges", &self.edges)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct HypergraphFile {
    n: usize,
    r: usize,
    edges: Vec<Edge>,
}

impl Serialize for Hypergraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HypergraphFile {
            n: self.n,
            r: self.r,
            edges: self.edges.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypergraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = HypergraphFile::deserialize(d)?;
        Hypergraph::new(file.n, file.r, file.edges).map_err(serde::de::Error::custom)
    }
}

impl Hypergraph {
    /// Compact text form: `n r` on the first line, then one edge per line (1-based).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.r);
        for e in &self.edges {
            let line: Vec<String> = e.vertices().iter().map(|v| (v + 1).to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Format("empty hypergraph text".into()))?;
        let nums = parse_line(header)?;
        if nums.len() != 2 {
            return Err(Error::Format(format!("header {header:?} must be \"n r\"")));
        }
        let (n, r) = (nums[0] as usize, nums[1] as usize);
        let mut edges = Vec::new();
        for line in lines {
            let labels = parse_line(line)?;
            if labels.contains(&0) {
                return Err(Error::Format(format!("line {line:?}: labels are 1-based")));
            }
            let zero: Vec<u32> = labels.iter().map(|l| l - 1).collect();
            edges.push(Edge::new(&zero)?);
        }
        Hypergraph::new(n, r, edges)
    }
}

fn parse_line(line: &str) -> Result<Vec<u32>> {
    line.split_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| Error::Format(format!("bad integer {t:?}"))))
        .collect()
}

/// Pairwise disjoint edges, optionally tagged with the colour they share.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub edges: Vec<Edge>,
    pub colour: Option<u32>,
}

impl Matching {
    pub fn new(edges: Vec<Edge>, colour: Option<u32>) -> Self {
        Matching { edges, colour }
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = VertexSet::new();
        for e in &self.edges {
            for &v in e.vertices() {
                if !seen.insert(v) {
                    return false;
                }
            }
        }
        true
    }

    pub fn covered(&self) -> VertexSet {
        self.edges.iter().flat_map(|e| e.vertices().iter().copied()).collect()
    }
}
