use std::path::{Path, PathBuf};

use hypermatch::colouring::{extremal_colouring, random_colouring, Colouring, ExtremalRule, WeightVector};
use hypermatch::exact::{parse_ratio, to_f64};
use hypermatch::hypercore::{complete, delete_random_edges, kneser, random_gnp, Hypergraph};
use hypermatch::matching::{
    kneser_colourable, max_matching_exact, max_monochromatic_matching, perfect_matching, verify_afl_exhaustive, verify_afl_sampled,
};
use hypermatch::pipelines::{
    defect_pipeline, discrepancy_experiment, transference_pipeline, DefectParams, DiscrepancyParams, FamilySource,
};
use hypermatch::regularity::{regularize, RefineMode, RegularityOutcome, RegularityParams, WitnessMode};
use hypermatch::setfamily::{
    almost_cover, emc_clique, emc_star, is_shifted, make_shifted, sample_family, shadow_sweep, shift, verify_shadow_bound, SetFamily,
    ShadowQuery, SweepConfig,
};
use num::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::io::{read_graph, read_json, write, write_graph, write_json};
use crate::record::{CliError, Outcome};
use crate::sweep;

type Res = Result<Outcome, CliError>;

pub fn dispatch(command: Command) -> (Value, Res) {
    fn go<A: Serialize>(a: A, f: impl FnOnce(A) -> Res) -> (Value, Res) {
        (serde_json::to_value(&a).expect("serializable"), f(a))
    }
    match command {
        Command::Gen(a) => go(a, gen),
        Command::Colour(a) => go(a, colour),
        Command::Match(a) => go(a, matching),
        Command::AflVerify(a) => go(a, afl),
        Command::Kneser(a) => go(a, kneser_cmd),
        Command::ShadowVerify(a) => go(a, shadow),
        Command::Shift(a) => go(a, shift_cmd),
        Command::Cover(a) => go(a, cover),
        Command::Defect(a) => go(a, defect),
        Command::Regularize(a) => go(a, regularize_cmd),
        Command::Transfer(a) => go(a, transfer),
        Command::Discrepancy(a) => go(a, discrepancy),
        Command::Sweep(a) => go(a, sweep::run),
    }
}

fn ratio(s: &str) -> Result<BigRational, CliError> {
    Ok(parse_ratio(s)?)
}

fn list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Input(format!("not a list of integers: {s:?}"))))
        .collect()
}

fn weights(given: Option<&str>, r: usize, q: usize) -> Result<WeightVector, CliError> {
    match given {
        None => Ok(WeightVector::standard(r, q)),
        Some(s) => Ok(WeightVector::new(list(s)?.into_iter().map(|x| x as u32).collect(), r)?),
    }
}

fn threads(t: Option<usize>) -> usize {
    t.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

fn graph_summary(h: &Hypergraph) -> Value {
    json!({ "n": h.n(), "r": h.r(), "edges": h.edge_count() })
}

fn save_graph(h: &Hypergraph, out: &Path) -> Res {
    write_graph(out, h)?;
    Ok(Outcome::new(graph_summary(h)).output(out))
}

fn save_family(f: &SetFamily, out: &Path) -> Res {
    write_json(out, f)?;
    Ok(Outcome::new(json!({ "n": f.n(), "k": f.k(), "size": f.len() })).output(out))
}

fn gen(cmd: GenCmd) -> Res {
    match cmd {
        GenCmd::Complete(a) => save_graph(&complete(a.n, a.r)?, &a.out),
        GenCmd::Gnp(a) => Ok(save_graph(&random_gnp(a.n, a.r, a.p, a.seed)?, &a.out)?.seed("seed", a.seed)),
        GenCmd::Kneser(a) => save_graph(&kneser(a.n, a.r, a.k)?, &a.out),
        GenCmd::Delete(a) => {
            let h = read_graph(&a.graph)?;
            let count = match (a.count, a.fraction) {
                (Some(c), _) => c,
                (None, Some(f)) if (0.0..=1.0).contains(&f) => (f * h.edge_count() as f64).round() as usize,
                (None, Some(f)) => return Err(CliError::Input(format!("fraction {f} outside [0, 1]"))),
                (None, None) => return Err(CliError::Usage("give --count or --fraction".into())),
            };
            let g = delete_random_edges(&h, count, a.seed)?;
            let mut out = save_graph(&g, &a.out)?.seed("seed", a.seed);
            out.result["deleted"] = json!(count);
            Ok(out)
        }
        GenCmd::Family(a) => {
            let s = sample_family(a.n, a.k, a.beta, a.cap, a.seed)?;
            let mut out = save_family(&s.family, &a.out)?.seed("seed", a.seed);
            out.result["target"] = json!(s.target);
            Ok(out)
        }
        GenCmd::Star(a) => save_family(&emc_star(a.n, a.k, a.t)?, &a.out),
        GenCmd::Clique(a) => save_family(&emc_clique(a.n, a.k, a.t)?, &a.out),
    }
}

fn colour(cmd: ColourCmd) -> Res {
    match cmd {
        ColourCmd::Extremal(a) => {
            let x = weights(a.weights.as_deref(), a.r, a.q)?;
            let (c, rule) = match &a.graph {
                None => {
                    let ext = extremal_colouring(a.n, a.r, a.q, x)?;
                    (ext.colouring, ext.rule)
                }
                Some(path) => {
                    let h = read_graph(path)?;
                    if h.n() != a.n || h.r() != a.r {
                        return Err(CliError::Input(format!("graph has n = {}, r = {}", h.n(), h.r())));
                    }
                    let rule = ExtremalRule::new(a.n, a.r, x)?;
                    (rule.colour(&h), rule)
                }
            };
            write_json(&a.out, &c)?;
            Ok(Outcome::new(json!({
                "q": c.q,
                "class_sizes": c.class_sizes(),
                "block_sizes": rule.block_sizes(),
                "matching_upper_bound": rule.matching_upper_bound(),
            }))
            .output(&a.out))
        }
        ColourCmd::Random(a) => {
            let h = read_graph(&a.graph)?;
            let c = random_colouring(&h, a.q, a.seed)?;
            write_json(&a.out, &c)?;
            Ok(Outcome::new(json!({ "q": c.q, "class_sizes": c.class_sizes() })).output(&a.out).seed("seed", a.seed))
        }
    }
}

fn read_colouring(path: &Path, h: &Hypergraph) -> Result<Colouring, CliError> {
    let c: Colouring = read_json(path)?;
    c.check_against(h)?;
    Ok(c)
}

fn maybe_write<T: Serialize>(out: &mut Outcome, path: Option<&PathBuf>, value: &T) -> Result<(), CliError> {
    if let Some(p) = path {
        write_json(p, value)?;
        out.outputs.push(p.display().to_string());
    }
    Ok(())
}

fn matching(a: MatchArgs) -> Res {
    let h = read_graph(&a.graph)?;
    let (m, result) = if a.perfect {
        let m = perfect_matching(&h)?;
        let found = m.is_some();
        (m.unwrap_or_default(), json!({ "perfect": found }))
    } else if let Some(path) = &a.colouring {
        let c = read_colouring(path, &h)?;
        let (colour, m) = max_monochromatic_matching(&h, &c)?;
        (m, json!({ "colour": colour }))
    } else {
        (max_matching_exact(&h), json!({}))
    };
    let mut result = result;
    result["size"] = json!(m.size());
    let mut out = Outcome::new(result);
    maybe_write(&mut out, a.out.as_ref(), &m)?;
    Ok(out)
}

fn afl(a: AflArgs) -> Res {
    let (report, seed) = match a.samples {
        Some(samples) => {
            let seed = a.seed.ok_or_else(|| CliError::Usage("--samples needs --seed".into()))?;
            (serde_json::to_value(verify_afl_sampled(a.n, a.r, a.q, samples, seed)?).unwrap(), Some(seed))
        }
        None => (serde_json::to_value(verify_afl_exhaustive(a.n, a.r, a.q, a.budget as u128)?).unwrap(), None),
    };
    let mut out = Outcome::new(report.clone());
    if let Some(s) = seed {
        out = out.seed("seed", s);
    }
    maybe_write(&mut out, a.out.as_ref(), &report)?;
    Ok(out)
}

fn kneser_cmd(a: KneserArgs) -> Res {
    let report = kneser_colourable(a.n, a.r, a.k, a.q, a.budget)?;
    let mut value = serde_json::to_value(&report).unwrap();
    value["colourable"] = json!(report.colourable());
    let mut out = Outcome::new(value.clone());
    maybe_write(&mut out, a.out.as_ref(), &value)?;
    Ok(out)
}

fn sweep_keys(items: &[String]) -> Result<(usize, usize, usize), CliError> {
    let (mut n, mut k, mut m) = (None, None, None);
    for item in items {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("sweep setting {item:?} is not key=value")))?;
        let v: usize = value.parse().map_err(|_| CliError::Usage(format!("sweep setting {item:?} needs an integer")))?;
        match key {
            "n" => n = Some(v),
            "k" => k = Some(v),
            "maxsize" | "max_size" => m = Some(v),
            _ => return Err(CliError::Usage(format!("unknown sweep setting {key:?}"))),
        }
    }
    match (n, k, m) {
        (Some(n), Some(k), Some(m)) => Ok((n, k, m)),
        _ => Err(CliError::Usage("sweep needs n=, k= and maxsize=".into())),
    }
}

fn shadow(a: ShadowArgs) -> Res {
    if let Some(path) = &a.family {
        let f: SetFamily = read_json(path)?;
        let q = ShadowQuery::new(a.s.unwrap(), a.b.unwrap(), f.k())?;
        let report = verify_shadow_bound(&f, q, a.budget as u128)?;
        let mut out = Outcome::new(serde_json::to_value(&report).unwrap());
        maybe_write(&mut out, a.out.as_ref(), &report)?;
        return Ok(out);
    }
    if a.sweep.is_empty() {
        return Err(CliError::Usage("give --family with -s and -b, or --sweep n=.. k=.. maxsize=..".into()));
    }
    let (n, k, max_size) = sweep_keys(&a.sweep)?;
    let mut cfg = SweepConfig::new(n, k, max_size);
    cfg.s_values = list(&a.s_values)?;
    cfg.b_values = list(&a.b_values)?;
    cfg.with_shifted = !a.no_shifted;
    cfg.keep_rows = true;
    cfg.threads = threads(a.threads);
    let sweep = shadow_sweep(&cfg)?;
    let path = a.out.clone().unwrap_or_else(|| PathBuf::from("shadow-sweep.csv"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "k", "size", "s", "b", "hypothesis", "lhs", "rhs", "pass", "shifted"]).unwrap();
    let mut written = 0u64;
    for row in sweep.rows.iter().filter(|row| !a.failures_only || !row.report.pass) {
        let r = &row.report;
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            r.size.to_string(),
            r.s.to_string(),
            r.b.to_string(),
            r.hypothesis_holds.to_string(),
            r.lhs.to_string(),
            r.rhs.clone(),
            r.pass.to_string(),
            row.shifted.to_string(),
        ])
        .unwrap();
        written += 1;
    }
    write(&path, std::str::from_utf8(&w.into_inner().unwrap()).unwrap())?;
    Ok(Outcome::new(json!({
        "families": sweep.families,
        "instances": sweep.instances,
        "hypothesis_instances": sweep.hypothesis_instances,
        "failures": sweep.failures,
        "rows": written,
    }))
    .output(&path))
}

fn shift_cmd(a: ShiftArgs) -> Res {
    let f: SetFamily = read_json(&a.family)?;
    let g = match (a.i, a.j) {
        (Some(i), Some(j)) => {
            if i == 0 || j == 0 {
                return Err(CliError::Input("elements are 1-based".into()));
            }
            shift(&f, i - 1, j - 1)?
        }
        _ => make_shifted(&f),
    };
    write_json(&a.out, &g)?;
    Ok(Outcome::new(json!({ "size": g.len(), "shifted": is_shifted(&g) })).output(&a.out))
}

fn cover(a: CoverArgs) -> Res {
    let f: SetFamily = read_json(&a.family)?;
    let search = almost_cover(&f, a.s, a.c, a.budget as u128)?;
    let mut out = Outcome::new(json!({
        "found": search.witness.is_some(),
        "target": search.target,
        "union": search.best.union_size,
        "exhaustive": search.exhaustive,
    }));
    maybe_write(&mut out, a.out.as_ref(), &search)?;
    Ok(out)
}

fn defect_params(o: &DefectOpts, seed: u64, threads: usize) -> Result<DefectParams, CliError> {
    let mut p = DefectParams::new(o.k, ratio(&o.mu)?, seed);
    p.family = if o.exhaustive {
        FamilySource::Exhaustive
    } else if o.sampled {
        FamilySource::Sampled {
            count: o.family_count,
            seed,
        }
    } else {
        FamilySource::Auto {
            count: o.family_count,
            seed,
        }
    };
    p.overlap = o.overlap;
    p.family_budget = o.family_budget;
    p.cover_budget = o.cover_budget;
    p.threads = threads;
    Ok(p)
}

fn defect(a: DefectArgs) -> Res {
    let h = read_graph(&a.graph)?;
    let c = read_colouring(&a.colouring, &h)?;
    let params = defect_params(&a.defect, a.seed, threads(a.threads))?;
    let run = defect_pipeline(&h, &c, &params)?;
    let t = &run.trace;
    let mut out = Outcome::new(json!({
        "size": run.matching.size(),
        "colour": run.matching.colour,
        "target": t.target.to_string(),
        "success": t.meets_target,
        "shortfall": t.shortfall,
        "family_size": t.family_size,
        "cover_union": t.cover_union,
        "w": t.w.len(),
        "raw_size": t.raw_size,
        "pruned_size": t.pruned_size,
    }))
    .seed("seed", a.seed);
    out.timings = run.timings.clone();
    maybe_write(&mut out, a.out.as_ref(), &run.matching)?;
    maybe_write(&mut out, a.trace_out.as_ref(), &run.trace)?;
    Ok(out)
}

fn witness_mode(s: &str) -> Result<WitnessMode, CliError> {
    let (kind, samples) = s.split_once(':').unwrap_or((s, "16"));
    let samples: usize = samples.parse().map_err(|_| CliError::Input(format!("bad witness sample count in {s:?}")))?;
    match kind {
        "exhaustive" => Ok(WitnessMode::Exhaustive),
        "randomized" => Ok(WitnessMode::Randomized { samples }),
        "guided" => Ok(WitnessMode::Guided { samples }),
        _ => Err(CliError::Input(format!("unknown witness mode {kind:?}"))),
    }
}

fn regularity_params(o: &RegularityOpts, seed: u64, threads: usize) -> Result<RegularityParams, CliError> {
    let mut p = RegularityParams::new(ratio(&o.eps)?, ratio(&o.p)?);
    p.d = ratio(&o.d)?;
    p.eta = ratio(&o.eta)?;
    p.t0 = o.t0;
    p.t_cap = o.t_cap;
    p.mode = match o.mode.as_str() {
        "practical" => RefineMode::Practical,
        "faithful" => RefineMode::Faithful,
        m => return Err(CliError::Input(format!("unknown refine mode {m:?}"))),
    };
    p.witness = witness_mode(&o.witness)?;
    p.seed = seed;
    p.budget = o.budget as u128;
    p.threads = threads;
    Ok(p)
}

fn rounds_csv(outcome: &RegularityOutcome, q: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["round".to_string(), "t".to_string()];
    header.extend((1..=q).map(|j| format!("energy_{j}")));
    header.extend((1..=q).map(|j| format!("irregular_{j}")));
    header.extend(["tuples", "mode", "refined"].map(String::from));
    w.write_record(&header).unwrap();
    for r in &outcome.rounds {
        let mut row = vec![r.round.to_string(), r.t.to_string()];
        row.extend(r.energies.iter().map(|e| to_f64(e).to_string()));
        row.extend(r.irregular.iter().map(|x| x.to_string()));
        row.push(r.tuples.to_string());
        row.push(format!("{:?}", r.mode).to_lowercase());
        row.push(r.refined.to_string());
        w.write_record(&row).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn classes(h: &Hypergraph, colouring: Option<&PathBuf>) -> Result<Vec<Hypergraph>, CliError> {
    match colouring {
        None => Ok(vec![h.clone()]),
        Some(path) => Ok(hypermatch::colouring::colour_classes(h, &read_colouring(path, h)?)?),
    }
}

fn regularize_cmd(a: RegularizeArgs) -> Res {
    let h = read_graph(&a.graph)?;
    let hs = classes(&h, a.colouring.as_ref())?;
    let params = regularity_params(&a.regularity, a.seed, threads(a.threads))?;
    let outcome = regularize(&hs, &params)?;
    let mut out = Outcome::new(json!({
        "t": outcome.partition.order(),
        "rounds": outcome.rounds.len(),
        "converged": outcome.converged,
        "stop": outcome.stop,
        "monotone": outcome.monotone,
        "energy": to_f64(&outcome.ledger.total),
        "iteration_cap": outcome.iteration_cap,
    }))
    .seed("seed", a.seed);
    maybe_write(&mut out, a.out.as_ref(), &outcome.partition)?;
    if let Some(p) = &a.rounds_out {
        write(p, &rounds_csv(&outcome, hs.len()))?;
        out = out.output(p);
    }
    maybe_write(&mut out, a.trace_out.as_ref(), &outcome)?;
    Ok(out)
}

fn transfer(a: TransferArgs) -> Res {
    let g = read_graph(&a.graph)?;
    let c = read_colouring(&a.colouring, &g)?;
    let threads = threads(a.threads);
    let reg = regularity_params(&a.regularity, a.seed, threads)?;
    let def = defect_params(&a.defect, a.seed, threads)?;
    let run = transference_pipeline(&g, &c, &reg, &def)?;
    let t = &run.trace;
    let mut out = Outcome::new(json!({
        "size": run.matching.size(),
        "colour": run.matching.colour,
        "target": t.target.to_string(),
        "success": t.meets_target,
        "t": run.partition.order(),
        "cluster_edges": t.cluster_edges,
        "cluster_density": t.cluster_density,
        "lifts": t.lifts.iter().map(|l| l.size).collect::<Vec<_>>(),
        "flags": t.flags,
    }))
    .seed("seed", a.seed);
    out.timings = run.timings.clone();
    maybe_write(&mut out, a.out.as_ref(), &run.matching)?;
    maybe_write(&mut out, a.trace_out.as_ref(), &run.trace)?;
    Ok(out)
}

fn discrepancy(a: DiscrepancyArgs) -> Res {
    let c = match &a.colouring {
        Some(path) => read_json(path)?,
        None => extremal_colouring(a.n, a.r, a.q, weights(a.weights.as_deref(), a.r, a.q)?)?.colouring,
    };
    let params = DiscrepancyParams {
        n: a.n,
        r: a.r,
        p1: a.p1,
        p2: a.p2,
        mu: ratio(&a.mu)?,
        seed: a.seed,
    };
    let (report, timings) = discrepancy_experiment(&c, &params)?;
    let mut out = Outcome::new(json!({
        "success": report.success,
        "perfect": report.perfect,
        "first_size": report.first_size,
        "first_max": report.first_max,
        "uncovered": report.uncovered,
        "same_colour": report.same_colour,
        "colour": report.colour,
        "bound": report.bound.to_string(),
    }))
    .seed("seed", a.seed)
    .seed("first", report.first_seed)
    .seed("second", report.second_seed);
    out.timings = timings;
    maybe_write(&mut out, a.out.as_ref(), &report)?;
    Ok(out)
}
