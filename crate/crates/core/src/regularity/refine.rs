use std::collections::BTreeMap;

use num::{BigInt, BigRational, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::energy::{multicolour_energy, EnergyLedger};
use super::{IrregularityWitness, Partition};
use crate::error::{invalid, Error, Result};
use crate::exact::{rpow, ser_ratio};
use crate::hypercore::{Hypergraph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefineMode {
    /// The chunk construction with its exact part count and size floor.
    Faithful,
    /// Venn atoms cut into the smallest equipartition that gains energy.
    Practical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefineParams {
    pub mode: RefineMode,
    #[serde(serialize_with = "ser_ratio")]
    pub eps: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub p: BigRational,
    /// Largest order the practical mode may produce.
    pub order_cap: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RefineTrace {
    /// Venn atoms inside each old block.
    pub atoms: Vec<usize>,
    /// Faithful mode: the chunk size d and chunk count ℓ per block.
    pub chunk_size: Option<usize>,
    pub chunks_per_block: Option<usize>,
    /// Faithful mode: vertices left outside the chunks before redistribution.
    pub uncovered: usize,
    /// Vertices placed in a block dominated by a different atom.
    pub misplaced: usize,
    /// Practical mode: candidate orders whose energy was evaluated.
    pub tried: Vec<usize>,
    /// ε^(r+3) / (r^r · 2^(2r+4))
    pub increment_bound: String,
    pub meets_increment_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefineOutcome {
    pub partition: Partition,
    pub mode: RefineMode,
    pub before: EnergyLedger,
    pub after: EnergyLedger,
    #[serde(serialize_with = "ser_ratio")]
    pub delta: BigRational,
    pub trace: RefineTrace,
}

/// The guaranteed energy increment per refinement, ε^(r+3) / (r^r · 2^(2r+4)).
pub fn increment_bound(eps: &BigRational, r: usize) -> BigRational {
    let den = BigInt::from(r).pow(r as u32) * BigInt::from(2).pow(2 * r as u32 + 4);
    rpow(eps, r as u32 + 3) / BigRational::from_integer(den)
}

/// Refines `partition` along the witnesses' sub-blocks. Fails with
/// [`Error::NoEnergyGain`] unless the total energy strictly increases.
pub fn refine_step(
    hs: &[Hypergraph],
    partition: &Partition,
    witnesses: &[IrregularityWitness],
    params: &RefineParams,
) -> Result<RefineOutcome> {
    let before = multicolour_energy(hs, partition, &params.p)?;
    let r = hs[0].r();
    if hs.iter().any(|h| h.r() != r) {
        return invalid("colour classes differ in uniformity");
    }
    let bound = increment_bound(&params.eps, r);
    if witnesses.is_empty() {
        return Ok(RefineOutcome {
            partition: partition.clone(),
            mode: params.mode,
            after: before.clone(),
            before,
            delta: BigRational::zero(),
            trace: RefineTrace {
                increment_bound: bound.to_string(),
                ..Default::default()
            },
        });
    }
    let atoms = venn_atoms(partition, witnesses, r)?;
    let mut trace = RefineTrace {
        atoms: atoms.iter().map(|a| a.len()).collect(),
        increment_bound: bound.to_string(),
        ..Default::default()
    };
    let (next, after) = match params.mode {
        RefineMode::Faithful => {
            let next = faithful(partition, &atoms, r, &mut trace)?;
            let after = multicolour_energy(hs, &next, &params.p)?;
            (next, after)
        }
        RefineMode::Practical => practical(hs, partition, &atoms, witnesses.len(), params, &before, &mut trace)?,
    };
    let delta = &after.total - &before.total;
    if !delta.is_positive() {
        return Err(Error::NoEnergyGain { order: partition.order() });
    }
    trace.meets_increment_bound = delta >= bound;
    Ok(RefineOutcome {
        partition: next,
        mode: params.mode,
        before,
        after,
        delta,
        trace,
    })
}

/// Atoms of each block, ordered by membership signature, vertices ascending.
fn venn_atoms(partition: &Partition, witnesses: &[IrregularityWitness], r: usize) -> Result<Vec<Vec<Vec<u32>>>> {
    let t = partition.order();
    let mut cuts: Vec<Vec<&VertexSet>> = vec![Vec::new(); t];
    for (k, w) in witnesses.iter().enumerate() {
        if w.blocks.len() != r || w.subsets.len() != r {
            return invalid(format!("witness {k} does not name {r} blocks"));
        }
        for (&i, x) in w.blocks.iter().zip(&w.subsets) {
            if i >= t || !x.is_subset(partition.block(i)) {
                return invalid(format!("witness {k} has a sub-block outside block {i}"));
            }
            cuts[i].push(x);
        }
    }
    Ok(partition
        .blocks()
        .iter()
        .zip(&cuts)
        .map(|(b, cs)| {
            let mut atoms: BTreeMap<Vec<bool>, Vec<u32>> = BTreeMap::new();
            for v in b.iter() {
                atoms.entry(cs.iter().map(|x| !x.contains(v)).collect()).or_default().push(v);
            }
            atoms.into_values().collect()
        })
        .collect())
}

fn faithful(partition: &Partition, atoms: &[Vec<Vec<u32>>], r: usize, trace: &mut RefineTrace) -> Result<Partition> {
    let (n, t) = (partition.n(), partition.order());
    if !partition.is_equipartition() {
        return invalid("faithful refinement needs an equipartition");
    }
    let e = (t as u32).checked_pow(r as u32 - 1).filter(|&e| e <= 20);
    let Some(e) = e else {
        return invalid(format!("t^(r-1) for t = {t}, r = {r} is beyond any feasible block size"));
    };
    let need = 8u128.pow(e);
    if (partition.min_size() as u128) < need {
        return invalid(format!(
            "faithful refinement of order {t} needs blocks of at least {need} vertices, that is n >= {}",
            need * t as u128
        ));
    }
    let four = 4usize.pow(e);
    let ell = four - 2usize.pow(e);
    let d = (n / t) / four;
    trace.chunk_size = Some(d);
    trace.chunks_per_block = Some(ell);

    let mut blocks = Vec::with_capacity(t * ell);
    for (i, block_atoms) in atoms.iter().enumerate() {
        // chunks of d consecutive atom members, taken round-robin across atoms
        let per_atom: Vec<usize> = block_atoms.iter().map(|a| a.len() / d).collect();
        if per_atom.iter().sum::<usize>() < ell {
            return invalid(format!("block {i} splits into too many atoms to carve {ell} chunks"));
        }
        let mut chunks: Vec<(usize, Vec<u32>)> = Vec::with_capacity(ell);
        let mut taken = vec![0usize; block_atoms.len()];
        'carve: for round in 0.. {
            for (a, atom) in block_atoms.iter().enumerate() {
                if round < per_atom[a] {
                    chunks.push((a, atom[round * d..(round + 1) * d].to_vec()));
                    taken[a] += 1;
                    if chunks.len() == ell {
                        break 'carve;
                    }
                }
            }
        }
        let leftovers: Vec<(usize, u32)> = block_atoms
            .iter()
            .enumerate()
            .flat_map(|(a, atom)| atom[taken[a] * d..].iter().map(move |&v| (a, v)))
            .collect();
        trace.uncovered += leftovers.len();
        trace.misplaced += spread(&mut chunks, leftovers);
        blocks.extend(chunks.into_iter().map(|(_, c)| c.into_iter().collect::<VertexSet>()));
    }
    let next = Partition::new(n, blocks)?;
    debug_assert!(next.is_equipartition() && next.order() == t * ell);
    Ok(next)
}

/// Hands leftover vertices to chunks as evenly as possible, keeping each vertex
/// with a chunk of its own atom when quota allows. Returns how many could not.
fn spread(chunks: &mut [(usize, Vec<u32>)], leftovers: Vec<(usize, u32)>) -> usize {
    let ell = chunks.len();
    let base = leftovers.len() / ell;
    let mut extra = leftovers.len() % ell;
    let mut got = vec![0usize; ell];
    let mut pending = leftovers;
    let mut misplaced = 0;
    for (same_atom, cap) in [(true, base), (true, base + 1), (false, base), (false, base + 1)] {
        let mut rest = Vec::new();
        let mut cursor = 0;
        for (a, v) in pending {
            let slot = (0..ell)
                .map(|k| (cursor + k) % ell)
                .find(|&h| (!same_atom || chunks[h].0 == a) && got[h] < cap && (cap == base || extra > 0));
            match slot {
                Some(h) => {
                    if got[h] == base {
                        extra -= 1;
                    }
                    got[h] += 1;
                    chunks[h].1.push(v);
                    misplaced += usize::from(chunks[h].0 != a);
                    cursor = h + 1;
                }
                None => rest.push((a, v)),
            }
        }
        pending = rest;
    }
    debug_assert!(pending.is_empty());
    misplaced
}

fn practical(
    hs: &[Hypergraph],
    partition: &Partition,
    atoms: &[Vec<Vec<u32>>],
    witnesses: usize,
    params: &RefineParams,
    before: &EnergyLedger,
    trace: &mut RefineTrace,
) -> Result<(Partition, EnergyLedger)> {
    let (n, t, r) = (partition.n(), partition.order(), hs[0].r());
    let growth = 1usize.checked_shl((r * witnesses).min(63) as u32).unwrap_or(usize::MAX);
    let hi = t.saturating_mul(growth).min(params.order_cap).min(n);
    if hi <= t {
        return Err(Error::BudgetExceeded {
            what: "partition order".into(),
            needed: t as u128 + 1,
            budget: params.order_cap as u128,
        });
    }
    let mut seq = Vec::with_capacity(n);
    let mut atom_of = Vec::with_capacity(n);
    for atom in atoms.iter().flatten() {
        let id = atom_of.last().map_or(0, |&x: &usize| x + 1);
        seq.extend_from_slice(atom);
        atom_of.extend(std::iter::repeat_n(id, atom.len()));
    }
    let limit = &params.eps * BigRational::from_integer(n.into());
    let candidates: Vec<(usize, usize)> = (t + 1..=hi).map(|k| (k, misplaced_in_cut(&atom_of, k))).collect();
    let cut = |k: usize| -> Result<Partition> {
        let mut blocks = Vec::with_capacity(k);
        let mut lo = 0;
        for i in 0..k {
            let size = n / k + usize::from(i < n % k);
            blocks.push(seq[lo..lo + size].iter().copied().collect());
            lo += size;
        }
        Partition::new(n, blocks)
    };
    let close: Vec<usize> = candidates
        .iter()
        .filter(|(_, m)| BigRational::from_integer((*m).into()) <= limit)
        .map(|&(k, _)| k)
        .collect();
    let others: Vec<usize> = candidates.iter().map(|&(k, _)| k).filter(|k| !close.contains(k)).collect();
    for k in close.into_iter().chain(others) {
        let next = cut(k)?;
        let after = multicolour_energy(hs, &next, &params.p)?;
        trace.tried.push(k);
        if after.total > before.total {
            trace.misplaced = candidates[k - t - 1].1;
            return Ok((next, after));
        }
    }
    Err(Error::NoEnergyGain { order: t })
}

/// Vertices outside the majority atom of their piece when the atom sequence is
/// cut into `k` consecutive near-equal pieces.
fn misplaced_in_cut(atom_of: &[usize], k: usize) -> usize {
    let n = atom_of.len();
    let mut lo = 0;
    let mut total = 0;
    for i in 0..k {
        let size = n / k + usize::from(i < n % k);
        let piece = &atom_of[lo..lo + size];
        let mut best = 0;
        let mut run = 0;
        for (j, &a) in piece.iter().enumerate() {
            run = if j > 0 && piece[j - 1] == a { run + 1 } else { 1 };
            best = best.max(run);
        }
        total += size - best;
        lo += size;
    }
    total
}
