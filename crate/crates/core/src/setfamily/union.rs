use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};

use super::{make_shifted, shadow_masks, SetFamily};
use crate::combin::binomial;
use crate::error::{invalid, Error, Result};

/// Largest number of s-subsets of a family that exact mode will scan.
pub const DEFAULT_UNION_BUDGET: u128 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnionMode {
    Exact,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionWitness {
    pub value: usize,
    /// Member positions; repeats appear only when the family has fewer than s members.
    pub tuple: Vec<usize>,
}

/// Maximum of |F_1 ∪ … ∪ F_s| over s-tuples of members. Greedy mode gives a lower bound.
pub fn max_union(f: &SetFamily, s: usize, mode: UnionMode, budget: u128) -> Result<UnionWitness> {
    if f.is_empty() {
        return invalid("max_union needs a non-empty family");
    }
    if s == 0 {
        return invalid("tuple length must be positive");
    }
    let m = f.masks();
    if m.len() <= s {
        let mut tuple: Vec<usize> = (0..m.len()).collect();
        tuple.resize(s, 0);
        let value = m.iter().fold(0u64, |a, &b| a | b).count_ones() as usize;
        return Ok(UnionWitness { value, tuple });
    }
    match mode {
        UnionMode::Greedy => Ok(greedy(m, s)),
        UnionMode::Exact => {
            let needed = binomial(m.len() as u64, s as u64);
            if needed > budget {
                return Err(Error::BudgetExceeded {
                    what: format!("{s}-subsets of a {}-member family", m.len()),
                    needed,
                    budget,
                });
            }
            let cap = (f.k() * s).min(f.n());
            let mut best = greedy(m, s);
            let mut stack = Vec::with_capacity(s);
            exact_dfs(m, s, f.k(), cap, 0, 0, &mut stack, &mut best);
            best.tuple.sort_unstable();
            Ok(best)
        }
    }
}

pub(super) fn greedy(m: &[u64], s: usize) -> UnionWitness {
    let mut acc = 0u64;
    let mut tuple = Vec::with_capacity(s);
    for _ in 0..s {
        let (i, _) = m
            .iter()
            .enumerate()
            .filter(|(i, _)| !tuple.contains(i))
            .map(|(i, &x)| (i, (x & !acc).count_ones()))
            .fold((usize::MAX, 0), |b, c| if b.0 == usize::MAX || c.1 > b.1 { c } else { b });
        acc |= m[i];
        tuple.push(i);
    }
    UnionWitness {
        value: acc.count_ones() as usize,
        tuple,
    }
}

#[allow(clippy::too_many_arguments)]
pub(super) fn exact_dfs(m: &[u64], s: usize, k: usize, cap: usize, from: usize, acc: u64, stack: &mut Vec<usize>, best: &mut UnionWitness) {
    let have = acc.count_ones() as usize;
    if stack.len() == s {
        if have > best.value {
            *best = UnionWitness {
                value: have,
                tuple: stack.clone(),
            };
        }
        return;
    }
    let left = s - stack.len();
    if best.value >= cap || (have + left * k).min(cap) <= best.value {
        return;
    }
    for i in from..=m.len() - left {
        stack.push(i);
        exact_dfs(m, s, k, cap, i + 1, acc | m[i], stack, best);
        stack.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowQuery {
    pub s: usize,
    pub b: usize,
}

impl ShadowQuery {
    pub fn new(s: usize, b: usize, k: usize) -> Result<Self> {
        if s < 2 || b == 0 || b > k {
            return invalid(format!("need s >= 2 and 1 <= b <= k = {k}, got s = {s}, b = {b}"));
        }
        Ok(ShadowQuery { s, b })
    }

    /// The union cap ks - (b-1)(s-1) - 1 from the hypothesis.
    pub fn union_cap(&self, k: usize) -> usize {
        k * self.s - (self.b - 1) * (self.s - 1) - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowReport {
    pub n: usize,
    pub k: usize,
    pub size: usize,
    pub s: usize,
    pub b: usize,
    pub max_union: usize,
    pub hypothesis_holds: bool,
    /// Size of the (k - b)-shadow.
    pub lhs: usize,
    /// |F| / (s - 1)^b, reduced.
    pub rhs: String,
    /// Vacuously true when the hypothesis fails.
    pub pass: bool,
}

/// Checks whether a family whose s-fold unions stay small has a (k - b)-shadow of
/// size at least |F| / (s - 1)^b.
pub fn verify_shadow_bound(f: &SetFamily, q: ShadowQuery, budget: u128) -> Result<ShadowReport> {
    let q = ShadowQuery::new(q.s, q.b, f.k())?;
    let mu = max_union(f, q.s, UnionMode::Exact, budget)?.value;
    let lhs = shadow_masks(f.masks(), f.k() - q.b).len();
    Ok(report(f, q, mu, lhs))
}

fn report(f: &SetFamily, q: ShadowQuery, max_union: usize, lhs: usize) -> ShadowReport {
    let hypothesis_holds = max_union <= q.union_cap(f.k());
    let scale = ((q.s - 1) as u128).pow(q.b as u32);
    let holds = lhs as u128 * scale >= f.len() as u128;
    let rhs = BigRational::new(BigInt::from(f.len()), BigInt::from(scale));
    ShadowReport {
        n: f.n(),
        k: f.k(),
        size: f.len(),
        s: q.s,
        b: q.b,
        max_union,
        hypothesis_holds,
        lhs,
        rhs: rhs.to_string(),
        pass: !hypothesis_holds || holds,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    pub max_size: usize,
    pub s_values: Vec<usize>,
    pub b_values: Vec<usize>,
    /// Also test the shifted normalization of every family.
    pub with_shifted: bool,
    /// Keep every row, not just the failing ones.
    pub keep_rows: bool,
    pub threads: usize,
}

impl SweepConfig {
    pub fn new(n: usize, k: usize, max_size: usize) -> Self {
        SweepConfig {
            n,
            k,
            max_size,
            s_values: vec![2, 3],
            b_values: (1..=k).collect(),
            with_shifted: true,
            keep_rows: false,
            threads: std::thread::available_parallelism().map_or(1, |p| p.get()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub report: ShadowReport,
    pub shifted: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowSweep {
    pub families: u64,
    pub instances: u64,
    pub hypothesis_instances: u64,
    pub failures: u64,
    pub rows: Vec<SweepRow>,
}

impl ShadowSweep {
    fn absorb(&mut self, other: ShadowSweep) {
        self.families += other.families;
        self.instances += other.instances;
        self.hypothesis_instances += other.hypothesis_instances;
        self.failures += other.failures;
        self.rows.extend(other.rows);
    }
}

/// Every family of 1..=max_size k-subsets of 0..n against every query. Work is
/// sharded by the colex rank of the smallest member; rows come back in
/// enumeration order regardless of thread count.
pub fn shadow_sweep(cfg: &SweepConfig) -> Result<ShadowSweep> {
    let all = SetFamily::complete(cfg.n, cfg.k)?;
    let queries = cfg
        .s_values
        .iter()
        .flat_map(|&s| cfg.b_values.iter().map(move |&b| ShadowQuery::new(s, b, cfg.k)))
        .collect::<Result<Vec<_>>>()?;
    let families = (1..=cfg.max_size.min(all.len()))
        .map(|sz| binomial(all.len() as u64, sz as u64))
        .sum::<u128>();
    if families > DEFAULT_UNION_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "families in the sweep".into(),
            needed: families,
            budget: DEFAULT_UNION_BUDGET,
        });
    }
    let masks = all.masks().to_vec();
    let threads = cfg.threads.max(1);
    let mut shards: Vec<ShadowSweep> = vec![ShadowSweep::default(); masks.len()];
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        let workers: Vec<_> = (0..threads)
            .map(|_| {
                let (masks, queries, next) = (&masks, &queries, &next);
                scope.spawn(move || {
                    let mut done = Vec::new();
                    loop {
                        let first = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if first >= masks.len() {
                            return done;
                        }
                        let mut out = ShadowSweep::default();
                        let mut chosen = vec![masks[first]];
                        walk(cfg, masks, queries, first + 1, &mut chosen, &mut out);
                        done.push((first, out));
                    }
                })
            })
            .collect();
        for w in workers {
            for (i, out) in w.join().expect("sweep worker panicked") {
                shards[i] = out;
            }
        }
    });
    let mut total = ShadowSweep::default();
    for s in shards {
        total.absorb(s);
    }
    Ok(total)
}

fn walk(cfg: &SweepConfig, masks: &[u64], queries: &[ShadowQuery], from: usize, chosen: &mut Vec<u64>, out: &mut ShadowSweep) {
    let f = SetFamily {
        n: cfg.n,
        k: cfg.k,
        members: chosen.clone(),
    };
    out.families += 1;
    check_family(cfg, &f, queries, false, out);
    if cfg.with_shifted {
        check_family(cfg, &make_shifted(&f), queries, true, out);
    }
    if chosen.len() == cfg.max_size {
        return;
    }
    for i in from..masks.len() {
        chosen.push(masks[i]);
        walk(cfg, masks, queries, i + 1, chosen, out);
        chosen.pop();
    }
}

fn check_family(cfg: &SweepConfig, f: &SetFamily, queries: &[ShadowQuery], shifted: bool, out: &mut ShadowSweep) {
    let mut unions = Vec::new();
    let mut shadows = vec![None; cfg.k + 1];
    for &q in queries {
        let mu = match unions.iter().find(|(s, _)| *s == q.s) {
            Some(&(_, v)) => v,
            None => {
                let v = max_union(f, q.s, UnionMode::Exact, u128::MAX).expect("non-empty family").value;
                unions.push((q.s, v));
                v
            }
        };
        let l = cfg.k - q.b;
        let lhs = *shadows[l].get_or_insert_with(|| shadow_masks(f.masks(), l).len());
        let rep = report(f, q, mu, lhs);
        out.instances += 1;
        out.hypothesis_instances += u64::from(rep.hypothesis_holds);
        out.failures += u64::from(!rep.pass);
        if cfg.keep_rows || !rep.pass {
            out.rows.push(SweepRow { report: rep, shifted });
        }
    }
}
