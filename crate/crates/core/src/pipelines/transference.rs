use std::time::Instant;

use num::BigRational;
use serde::Serialize;

use super::defect::{defect_pipeline, DefectParams, PipelineTrace};
use super::{lap, Timings};
use crate::colouring::{colour_classes, Colouring};
use crate::combin::binomial;
use crate::error::Result;
use crate::exact::ser_ratio;
use crate::hypercore::{Hypergraph, Matching, VertexSet};
use crate::matching::regular_tuple_matching;
use crate::regularity::{cluster_from_scan, regularize, Partition, RegularityOutcome, RegularityParams};

/// One cluster edge of the reduced matching and what it lifted to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftRow {
    /// 1-based block indices.
    pub blocks: Vec<u32>,
    pub colour: u32,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferTrace {
    pub n: usize,
    pub r: usize,
    pub q: u32,
    pub edges: usize,
    /// The host has no edges at all.
    pub degenerate: bool,
    pub regularity: RegularityOutcome,
    pub cluster_edges: usize,
    pub cluster_colour_counts: Vec<usize>,
    /// e(R) / C(t, r).
    pub cluster_density: f64,
    pub cluster_certified: bool,
    pub defect: PipelineTrace,
    pub lifts: Vec<LiftRow>,
    pub final_size: usize,
    /// (1 − μ)·n/(r+q−1).
    #[serde(serialize_with = "ser_ratio")]
    pub target: BigRational,
    pub meets_target: bool,
    /// Anything that weakens the result: non-convergence, uncertified regularity, cover shortfall.
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferRun {
    pub matching: Matching,
    pub partition: Partition,
    pub trace: TransferTrace,
    pub timings: Timings,
}

/// Regularizes the colour classes, runs the defect pipeline on the cluster
/// hypergraph and lifts every matched cluster edge to a matching between its blocks.
pub fn transference_pipeline(g: &Hypergraph, c: &Colouring, reg: &RegularityParams, def: &DefectParams) -> Result<TransferRun> {
    let (n, r, q) = (g.n(), g.r(), c.q);
    let mut timings = Timings::new();
    let classes = colour_classes(g, c)?;

    let start = Instant::now();
    let outcome = regularize(&classes, reg)?;
    lap(&mut timings, "regularize", start);

    let start = Instant::now();
    let (partition, scan) = if outcome.converged {
        (&outcome.partition, &outcome.scan)
    } else {
        (&outcome.best_partition, &outcome.best_scan)
    };
    let partition = partition.clone();
    let cluster = cluster_from_scan(scan, &partition, &reg.eps, &reg.p);
    let t = partition.order();
    lap(&mut timings, "cluster", start);

    let start = Instant::now();
    // lower k until the cluster hypergraph has k-cliques at all
    let mut inner = def.clone();
    inner.k = def.k.min(t).max(r);
    let mut reduced = defect_pipeline(&cluster.graph, &cluster.colouring, &inner)?;
    while reduced.trace.family_size == 0 && inner.k > r {
        inner.k -= 1;
        reduced = defect_pipeline(&cluster.graph, &cluster.colouring, &inner)?;
    }
    for (stage, ms) in &reduced.timings {
        timings.insert(format!("defect.{stage}"), *ms);
    }
    lap(&mut timings, "defect", start);

    let start = Instant::now();
    let colour = reduced.matching.colour;
    let mut lifts = Vec::new();
    let mut edges = Vec::new();
    if let Some(colour) = colour {
        let class = &classes[colour as usize - 1];
        for e in &reduced.matching.edges {
            let parts: Vec<VertexSet> = e.vertices().iter().map(|&i| partition.block(i as usize).clone()).collect();
            let m = regular_tuple_matching(class, &parts)?;
            lifts.push(LiftRow {
                blocks: e.vertices().iter().map(|&i| i + 1).collect(),
                colour,
                size: m.size(),
            });
            edges.extend(m.edges);
        }
    }
    edges.sort();
    let matching = Matching::new(edges, colour);
    assert!(matching.is_valid(), "lifts from disjoint cluster edges must be disjoint");
    lap(&mut timings, "lift", start);

    let target = (BigRational::from_integer(1.into()) - &def.mu) * BigRational::from_integer(n.into())
        / BigRational::from_integer((r + q as usize - 1).into());
    let mut flags = Vec::new();
    let degenerate = g.edge_count() == 0;
    if degenerate {
        flags.push("degenerate".to_string());
    }
    if !outcome.converged {
        flags.push(format!("regularity_stopped:{:?}", outcome.stop));
        flags.push(format!("using_round:{}", outcome.best_round));
    }
    if !cluster.certified {
        flags.push("regularity_not_refuted_only".to_string());
    }
    if reduced.trace.shortfall {
        flags.push("cover_shortfall".to_string());
    }
    let mut cluster_colour_counts = vec![0; q as usize];
    for &x in &cluster.colouring.assignment {
        cluster_colour_counts[x as usize - 1] += 1;
    }
    let trace = TransferTrace {
        n,
        r,
        q,
        edges: g.edge_count(),
        degenerate,
        cluster_edges: cluster.graph.edge_count(),
        cluster_colour_counts,
        cluster_density: cluster.graph.edge_count() as f64 / binomial(t as u64, r as u64) as f64,
        cluster_certified: cluster.certified,
        regularity: outcome,
        defect: reduced.trace,
        lifts,
        final_size: matching.size(),
        meets_target: BigRational::from_integer(matching.size().into()) >= target,
        target,
        flags,
    };
    Ok(TransferRun {
        matching,
        partition,
        trace,
        timings,
    })
}
