//! Matching solvers: exact branch and bound, blossom, monochromatic maxima,
//! the guaranteed-size bound with its verifiers, tuple matchings and Kneser colourability.

mod afl;
mod blossom;
mod exact;
mod kneser;
mod tuple;

pub use afl::{afl_bound, max_monochromatic_size, verify_afl_exhaustive, verify_afl_sampled, AflReport, SampledAflReport};
pub use blossom::maximum_matching as blossom_mates;
pub use exact::{blossom_matching, matching_number, max_matching_exact};
pub use kneser::{is_proper_kneser_colouring, kneser_colourable, KneserReport, KneserVerdict};
pub use tuple::{is_maximal_crossing, regular_tuple_matching};

use crate::colouring::{colour_class, Colouring};
use crate::error::{invalid, Result};
use crate::hypercore::{Edge, Hypergraph, Matching, VertexSet};

/// The colour whose class has the largest matching (smallest id on ties), with
/// that class's lexicographically least maximum matching.
pub fn max_monochromatic_matching(h: &Hypergraph, c: &Colouring) -> Result<(u32, Matching)> {
    c.check_against(h)?;
    let mut best: Option<(u32, Matching)> = None;
    for colour in 1..=c.q {
        let mut m = max_matching_exact(&colour_class(h, c, colour)?);
        m.colour = Some(colour);
        if best.as_ref().is_none_or(|(_, b)| m.size() > b.size()) {
            best = Some((colour, m));
        }
    }
    Ok(best.expect("q >= 1"))
}

/// A perfect matching if one exists.
pub fn perfect_matching(h: &Hypergraph) -> Result<Option<Matching>> {
    let (n, r) = (h.n(), h.r());
    if r == 0 || n % r != 0 {
        return invalid(format!("r = {r} does not divide n = {n}"));
    }
    if n == 0 {
        return Ok(Some(Matching::default()));
    }
    if r == 2 {
        let m = blossom_matching(h);
        return Ok((m.size() == n / 2).then_some(m));
    }
    let mut by_min: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in h.edges().iter().enumerate() {
        for &v in e.vertices() {
            by_min[v as usize].push(i);
        }
    }
    if by_min.iter().any(|l| l.is_empty()) {
        return Ok(None);
    }
    let mut chosen = Vec::new();
    let mut used = VertexSet::new();
    if cover_lowest(h, &by_min, &mut used, &mut chosen) {
        let edges: Vec<Edge> = chosen.iter().map(|&i| h.edges()[i].clone()).collect();
        Ok(Some(Matching::new(edges, None)))
    } else {
        Ok(None)
    }
}

/// Branches on the edges through the lowest uncovered vertex.
fn cover_lowest(h: &Hypergraph, incident: &[Vec<usize>], used: &mut VertexSet, chosen: &mut Vec<usize>) -> bool {
    let Some(v) = (0..h.n() as u32).find(|&v| !used.contains(v)) else {
        return true;
    };
    for &i in &incident[v as usize] {
        let e = &h.edges()[i];
        if e.meets(used) {
            continue;
        }
        for &u in e.vertices() {
            used.insert(u);
        }
        chosen.push(i);
        if cover_lowest(h, incident, used, chosen) {
            return true;
        }
        chosen.pop();
        for &u in e.vertices() {
            used.remove(u);
        }
    }
    false
}
