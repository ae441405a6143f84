use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::hypercore::VertexSet;

/// Ordered disjoint non-empty blocks covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<VertexSet>,
    equipartition: bool,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<VertexSet>) -> Result<Self> {
        let mut seen = VertexSet::new();
        let mut total = 0;
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return invalid(format!("block {i} is empty"));
            }
            if b.max_vertex().is_some_and(|m| m as usize >= n) {
                return invalid(format!("block {i} leaves the vertex range 0..{n}"));
            }
            if !seen.is_disjoint(b) {
                return invalid(format!("block {i} overlaps an earlier block"));
            }
            seen.union_with(b);
            total += b.len();
        }
        if total != n {
            return invalid(format!("blocks cover {total} of {n} vertices"));
        }
        let equipartition = match (blocks.iter().map(|b| b.len()).min(), blocks.iter().map(|b| b.len()).max()) {
            (Some(lo), Some(hi)) => hi - lo <= 1,
            _ => true,
        };
        Ok(Partition {
            n,
            blocks,
            equipartition,
        })
    }

    /// `t` blocks of consecutive vertex ids, the larger blocks first.
    pub fn contiguous(n: usize, t: usize) -> Result<Self> {
        if t == 0 || t > n {
            return invalid(format!("cannot split {n} vertices into {t} non-empty blocks"));
        }
        let mut blocks = Vec::with_capacity(t);
        let mut lo = 0;
        for i in 0..t {
            let size = n / t + usize::from(i < n % t);
            blocks.push(VertexSet::range(lo as u32, (lo + size) as u32));
            lo += size;
        }
        Ok(Partition {
            n,
            blocks,
            equipartition: true,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks.
    pub fn order(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[VertexSet] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &VertexSet {
        &self.blocks[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    pub fn min_size(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).min().unwrap_or(0)
    }

    pub fn is_equipartition(&self) -> bool {
        self.equipartition
    }

    /// Block index of every vertex.
    pub fn labels(&self) -> Vec<u32> {
        let mut label = vec![0u32; self.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for v in b.iter() {
                label[v as usize] = i as u32;
            }
        }
        label
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    blocks: Vec<VertexSet>,
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PartitionRepr {
            blocks: self.blocks.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PartitionRepr::deserialize(d)?;
        let n = r.blocks.iter().map(|b| b.len()).sum();
        Partition::new(n, r.blocks).map_err(serde::de::Error::custom)
    }
}
