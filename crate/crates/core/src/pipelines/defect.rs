use std::collections::{HashMap, HashSet};
use std::time::Instant;

use num::{BigRational, One, Signed};
use serde::{Deserialize, Serialize};

use super::{lap, Timings};
use crate::colouring::Colouring;
use crate::combin::{binomial, Combinations};
use crate::error::{invalid, Result};
use crate::exact::{ceil_u64, ser_ratio};
use crate::hypercore::{Edge, Hypergraph, Matching, VertexSet};
use crate::matching::max_monochromatic_matching;
use crate::rng::Prng;
use crate::setfamily::{almost_cover, CoverMode, SetFamily, MAX_GROUND};

/// Family size requested from sampling when the caller gives none.
pub const DEFAULT_FAMILY_SIZE: usize = 2000;

/// Where the clique family comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySource {
    /// Exhaustive when C(n, k) fits the family budget, sampled otherwise.
    Auto { count: usize, seed: u64 },
    Exhaustive,
    /// k-sets cut from seeded random permutations until `count` cliques are kept.
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectParams {
    pub k: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub mu: BigRational,
    pub family: FamilySource,
    /// Cover overlap budget C; `None` means ⌈kμ²/4⌉.
    pub overlap: Option<usize>,
    pub family_budget: u64,
    pub cover_budget: u64,
    pub threads: usize,
}

impl DefectParams {
    pub fn new(k: usize, mu: BigRational, seed: u64) -> Self {
        DefectParams {
            k,
            mu,
            family: FamilySource::Auto {
                count: DEFAULT_FAMILY_SIZE,
                seed,
            },
            overlap: None,
            family_budget: 1 << 20,
            cover_budget: 1 << 22,
            threads: std::thread::available_parallelism().map_or(1, |p| p.get()),
        }
    }

    /// s = ⌈(1 − μ²)·n/k⌉.
    pub fn cover_count(&self, n: usize) -> usize {
        let x = (BigRational::one() - &self.mu * &self.mu) * BigRational::from_integer(n.into())
            / BigRational::from_integer(self.k.into());
        ceil_u64(&x) as usize
    }

    pub fn overlap_budget(&self) -> usize {
        self.overlap.unwrap_or_else(|| {
            let x = &self.mu * &self.mu * BigRational::from_integer(self.k.into()) / BigRational::from_integer(4.into());
            ceil_u64(&x) as usize
        })
    }

    fn validate(&self, n: usize, r: usize) -> Result<()> {
        if self.k < r || self.k > n {
            return invalid(format!("k = {} must lie between r = {r} and n = {n}", self.k));
        }
        if !self.mu.is_positive() || self.mu >= BigRational::one() {
            return invalid("μ must lie in (0, 1)");
        }
        if n > MAX_GROUND {
            return invalid(format!("the clique-family cover works on at most {MAX_GROUND} vertices, got {n}"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineTrace {
    pub n: usize,
    pub r: usize,
    pub q: u32,
    pub k: usize,
    /// "exhaustive" or "sampled".
    pub family_mode: String,
    pub seed: Option<u64>,
    /// k-sets examined while building the family.
    pub draws: u64,
    pub family_size: usize,
    /// family_size / draws.
    pub clique_ratio: f64,
    /// Per-set matchings come from exact search, never smaller than the guaranteed bound.
    pub per_set_solver: String,
    /// How many per-set maximum matchings landed in each colour.
    pub colour_counts: Vec<usize>,
    pub majority: Option<u32>,
    pub family_prime: usize,
    pub min_set_matching: Option<usize>,
    /// ⌊k/(r+q−1)⌋.
    pub set_floor: usize,
    pub s: usize,
    pub overlap_budget: usize,
    pub cover_target: usize,
    pub cover_union: usize,
    pub cover_mode: Option<CoverMode>,
    pub chosen: Vec<VertexSet>,
    /// No s-tuple reaching the cover target was found; the best cover was used.
    pub shortfall: bool,
    pub w: VertexSet,
    pub w_degree_sum: usize,
    pub raw_size: usize,
    /// Edges left after deleting every M_{F_i} edge that meets W.
    pub pruned_size: usize,
    /// Size of the returned matching. Every vertex of W is handed to one chosen
    /// member containing it and each member is re-matched on what it owns, so
    /// this never falls below `pruned_size`.
    pub rematched_size: usize,
    /// (1 − μ)·n/(r+q−1).
    #[serde(serialize_with = "ser_ratio")]
    pub target: BigRational,
    pub meets_target: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectRun {
    pub matching: Matching,
    pub trace: PipelineTrace,
    pub timings: Timings,
}

/// k-cliques of `h` plus the number of k-sets looked at.
fn clique_family(h: &Hypergraph, k: usize, source: FamilySource, budget: u64) -> (Vec<VertexSet>, u64, bool, Option<u64>) {
    let n = h.n();
    let exhaustive = match source {
        FamilySource::Exhaustive => true,
        FamilySource::Sampled { .. } => false,
        FamilySource::Auto { .. } => binomial(n as u64, k as u64) <= budget as u128,
    };
    if exhaustive {
        let mut out = Vec::new();
        let mut draws = 0;
        let mut cursor = Combinations::new(n, k);
        while let Some(c) = cursor.advance() {
            draws += 1;
            let s = VertexSet::from_slice(c);
            if h.is_clique(&s) {
                out.push(s);
            }
        }
        return (out, draws, true, None);
    }
    let (FamilySource::Auto { count, seed } | FamilySource::Sampled { count, seed }) = source else {
        unreachable!()
    };
    let mut rng = Prng::seeded(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut draws = 0u64;
    let cap = 64 * count.max(1) as u64;
    let mut perm: Vec<u32> = (0..n as u32).collect();
    while out.len() < count && draws < cap {
        rng.shuffle(&mut perm);
        for block in perm.chunks_exact(k) {
            draws += 1;
            let s = VertexSet::from_slice(block);
            if h.is_clique(&s) && seen.insert(s.clone()) {
                out.push(s);
                if out.len() == count {
                    break;
                }
            }
        }
    }
    (out, draws, false, Some(seed))
}

/// Maximum monochromatic matching inside each member, in original vertex ids.
fn set_matchings(h: &Hypergraph, c: &Colouring, family: &[VertexSet], threads: usize) -> Result<Vec<(u32, Matching)>> {
    let chunk = family.len().div_ceil(threads.max(1)).max(1);
    let parts: Vec<Result<Vec<(u32, Matching)>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = family
            .chunks(chunk)
            .map(|sets| {
                scope.spawn(move || {
                    sets.iter()
                        .map(|f| {
                            let members = f.to_vec();
                            let (g, pos) = h.induced_with_positions(f);
                            let (colour, m) = max_monochromatic_matching(&g, &c.restrict(&pos))?;
                            let edges = m
                                .edges
                                .iter()
                                .map(|e| {
                                    let back: Vec<u32> = e.vertices().iter().map(|&v| members[v as usize]).collect();
                                    Edge::new(&back).expect("distinct vertices")
                                })
                                .collect();
                            Ok((colour, Matching::new(edges, Some(colour))))
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("matching worker panicked")).collect()
    });
    Ok(parts.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

/// Maximum matching of `colour` inside `set`, in original vertex ids.
fn rematch(h: &Hypergraph, c: &Colouring, set: &VertexSet, colour: u32) -> Result<Matching> {
    let members = set.to_vec();
    let (g, pos) = h.induced_with_positions(set);
    let keep = c.restrict(&pos);
    let class = g.filter_edges(|i, _| keep.assignment[i] == colour);
    let m = crate::matching::max_matching_exact(&class);
    let edges = m
        .edges
        .iter()
        .map(|e| {
            let back: Vec<u32> = e.vertices().iter().map(|&v| members[v as usize]).collect();
            Edge::new(&back).expect("distinct vertices")
        })
        .collect();
    Ok(Matching::new(edges, Some(colour)))
}

/// Builds the family of k-cliques, takes a maximum monochromatic matching inside
/// each, keeps the members whose matching has the majority colour, picks s of them
/// that almost cover the vertex set, and drops the vertices W covered more than
/// once. Those vertices are then handed back one member each and every member is
/// re-matched on what it owns, which keeps at least every old edge avoiding W.
pub fn defect_pipeline(h: &Hypergraph, c: &Colouring, params: &DefectParams) -> Result<DefectRun> {
    let (n, r, q, k) = (h.n(), h.r(), c.q, params.k);
    c.check_against(h)?;
    params.validate(n, r)?;
    let mut timings = Timings::new();
    let s = params.cover_count(n);
    let overlap_budget = params.overlap_budget();
    let target = (BigRational::one() - &params.mu) * BigRational::from_integer(n.into())
        / BigRational::from_integer((r + q as usize - 1).into());

    let start = Instant::now();
    let (family, draws, exhaustive, seed) = clique_family(h, k, params.family, params.family_budget);
    lap(&mut timings, "family", start);

    let start = Instant::now();
    let per_set = set_matchings(h, c, &family, params.threads)?;
    let mut colour_counts = vec![0usize; q as usize];
    for (colour, _) in &per_set {
        colour_counts[*colour as usize - 1] += 1;
    }
    let majority = (!family.is_empty()).then(|| {
        let best = *colour_counts.iter().max().unwrap();
        colour_counts.iter().position(|&x| x == best).unwrap() as u32 + 1
    });
    let prime: Vec<usize> = (0..family.len()).filter(|&i| Some(per_set[i].0) == majority).collect();
    lap(&mut timings, "matchings", start);

    let mut trace = PipelineTrace {
        n,
        r,
        q,
        k,
        family_mode: if exhaustive { "exhaustive" } else { "sampled" }.to_string(),
        seed,
        draws,
        family_size: family.len(),
        clique_ratio: if draws == 0 { 0.0 } else { family.len() as f64 / draws as f64 },
        per_set_solver: "exact".to_string(),
        colour_counts,
        majority,
        family_prime: prime.len(),
        min_set_matching: per_set.iter().map(|(_, m)| m.size()).min(),
        set_floor: k / (r + q as usize - 1),
        s,
        overlap_budget,
        cover_target: k.saturating_sub(overlap_budget) * s,
        cover_union: 0,
        cover_mode: None,
        chosen: Vec::new(),
        shortfall: true,
        w: VertexSet::new(),
        w_degree_sum: 0,
        raw_size: 0,
        pruned_size: 0,
        rematched_size: 0,
        meets_target: BigRational::from_integer(0.into()) >= target,
        target,
    };
    if prime.is_empty() {
        return Ok(DefectRun {
            matching: Matching::new(Vec::new(), majority),
            trace,
            timings,
        });
    }

    let start = Instant::now();
    let fam = SetFamily::new(n, k, prime.iter().map(|&i| family[i].clone()))?;
    let by_mask: HashMap<u64, usize> = prime
        .iter()
        .map(|&i| (family[i].words().first().copied().unwrap_or(0), i))
        .collect();
    let search = almost_cover(&fam, s, overlap_budget, params.cover_budget as u128)?;
    let cover = search.witness.clone().unwrap_or_else(|| search.best.clone());
    lap(&mut timings, "cover", start);

    let start = Instant::now();
    let chosen: Vec<usize> = cover.chosen.iter().map(|&j| by_mask[&fam.masks()[j]]).collect();
    let w = cover.overlap.clone();
    let w_degree_sum: usize = w.iter().map(|u| cover.coverage[&u] as usize).sum();
    let mut raw = 0;
    let mut pruned = 0;
    let colour = majority.expect("non-empty family has a majority colour");
    let mut owned: Vec<VertexSet> = Vec::with_capacity(chosen.len());
    let mut current: Vec<usize> = Vec::with_capacity(chosen.len());
    for &i in &chosen {
        let m = &per_set[i].1;
        raw += m.size();
        let kept = m.edges.iter().filter(|e| !e.meets(&w)).count();
        pruned += kept;
        let rest = family[i].difference(&w);
        let size = rematch(h, c, &rest, colour)?.size();
        debug_assert!(size >= kept);
        owned.push(rest);
        current.push(size);
    }
    // each vertex of W goes to the first holder whose matching grows the most
    for u in w.iter() {
        let mut best: Option<(usize, usize)> = None;
        for (slot, &i) in chosen.iter().enumerate() {
            if !family[i].contains(u) || owned.iter().any(|o| o.contains(u)) {
                continue;
            }
            let mut grown = owned[slot].clone();
            grown.insert(u);
            let size = rematch(h, c, &grown, colour)?.size();
            if best.is_none_or(|(_, b)| size - current[slot] > b) {
                best = Some((slot, size - current[slot]));
            }
        }
        if let Some((slot, gain)) = best {
            owned[slot].insert(u);
            current[slot] += gain;
        }
    }
    let mut edges = Vec::new();
    for set in &owned {
        edges.extend(rematch(h, c, set, colour)?.edges);
    }
    edges.sort();
    let matching = Matching::new(edges, majority);
    assert!(matching.is_valid(), "matchings inside disjoint owned sets must be disjoint");
    debug_assert!(pruned + w_degree_sum >= raw);
    lap(&mut timings, "prune", start);

    trace.cover_union = cover.union_size;
    trace.cover_mode = Some(cover.mode);
    trace.chosen = chosen.iter().map(|&i| family[i].clone()).collect();
    trace.shortfall = search.witness.is_none();
    trace.w = w;
    trace.w_degree_sum = w_degree_sum;
    trace.raw_size = raw;
    trace.pruned_size = pruned;
    trace.rematched_size = matching.size();
    trace.meets_target = BigRational::from_integer(matching.size().into()) >= trace.target;
    Ok(DefectRun { matching, trace, timings })
}
