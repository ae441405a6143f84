use num::{BigInt, BigRational, One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use super::energy::{multicolour_energy, tuple_counts, EnergyLedger};
use super::probe::Probe;
use super::refine::{refine_step, RefineMode, RefineParams};
use super::witness::search;
use super::{IrregularityWitness, Partition, WitnessMode, DEFAULT_WITNESS_BUDGET};
use crate::combin::{binomial, colex_unrank};
use crate::error::{invalid, Error, Result};
use crate::exact::{rpow, ser_ratio, ser_ratios, to_f64};
use crate::hypercore::{Hypergraph, VertexSet};
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityParams {
    #[serde(serialize_with = "ser_ratio")]
    pub eps: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub p: BigRational,
    /// Upper-uniformity constant D.
    #[serde(serialize_with = "ser_ratio")]
    pub d: BigRational,
    /// Block-size floor fraction η.
    #[serde(serialize_with = "ser_ratio")]
    pub eta: BigRational,
    pub t0: usize,
    pub t_cap: usize,
    pub mode: RefineMode,
    pub witness: WitnessMode,
    pub seed: u64,
    #[serde(serialize_with = "ser_u128")]
    pub budget: u128,
    pub threads: usize,
}

fn ser_u128<S: Serializer>(x: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl RegularityParams {
    /// Practical mode with randomized witnesses, D = 2, η = 1/100, t0 = 4 and T = 64.
    pub fn new(eps: BigRational, p: BigRational) -> Self {
        RegularityParams {
            eps,
            p,
            d: BigRational::from_integer(2.into()),
            eta: BigRational::new(1.into(), 100.into()),
            t0: 4,
            t_cap: 64,
            mode: RefineMode::Practical,
            witness: WitnessMode::Randomized { samples: 16 },
            seed: 0,
            budget: DEFAULT_WITNESS_BUDGET,
            threads: std::thread::available_parallelism().map_or(1, |p| p.get()),
        }
    }

    fn validate(&self, n: usize, r: usize) -> Result<()> {
        let one = BigRational::one();
        if !self.eps.is_positive() || self.eps >= one {
            return invalid("ε must lie in (0, 1)");
        }
        if !self.p.is_positive() || self.p > one {
            return invalid("p must lie in (0, 1]");
        }
        if self.d <= one {
            return invalid("D must exceed 1");
        }
        if !self.eta.is_positive() || self.eta >= one {
            return invalid("η must lie in (0, 1)");
        }
        if self.t0 > self.t_cap {
            return invalid(format!("t0 = {} exceeds the order cap {}", self.t0, self.t_cap));
        }
        if self.t0 < r || self.t0 > n {
            return invalid(format!("t0 = {} must lie between r = {r} and n = {n}", self.t0));
        }
        Ok(())
    }

    /// r^r · 2^(2r+4) · q·D² / ε^(r+3), rounded up.
    pub fn iteration_cap(&self, r: usize, q: usize) -> u64 {
        let num = BigInt::from(r).pow(r as u32) * BigInt::from(2).pow(2 * r as u32 + 4) * BigInt::from(q);
        let s = BigRational::from_integer(num) * &self.d * &self.d / rpow(&self.eps, r as u32 + 3);
        s.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Few enough irregular tuples in every colour.
    Regular,
    /// The next refinement would exceed the order cap.
    OrderCap,
    /// The iteration bound derived from the energy cap was reached.
    IterationCap,
    /// No refinement candidate increased the energy.
    NoEnergyGain,
    /// Faithful refinement needs larger blocks than the graph provides.
    SizePrecondition,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundLog {
    pub round: usize,
    pub t: usize,
    #[serde(serialize_with = "ser_ratios")]
    pub energies: Vec<BigRational>,
    #[serde(serialize_with = "ser_ratio")]
    pub total: BigRational,
    /// Irregular tuples per colour.
    pub irregular: Vec<usize>,
    pub tuples: usize,
    pub mode: RefineMode,
    /// Total ≤ q·D², checked when every block has at least ηn vertices.
    pub cap_ok: Option<bool>,
    pub refined: bool,
}

impl RoundLog {
    pub fn energies_f64(&self) -> Vec<f64> {
        self.energies.iter().map(to_f64).collect()
    }
}

/// Per-colour results of scanning every r-subset of blocks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TupleScan {
    pub t: usize,
    pub r: usize,
    /// `irregular[j][rank]`: a witness was found in colour j + 1 for the tuple of that colex rank.
    pub irregular: Vec<Vec<bool>>,
    /// Crossing edges per colour and tuple.
    pub counts: Vec<Vec<u64>>,
    pub certified: bool,
}

impl TupleScan {
    pub fn irregular_counts(&self) -> Vec<usize> {
        self.irregular.iter().map(|v| v.iter().filter(|&&x| x).count()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityOutcome {
    pub partition: Partition,
    pub ledger: EnergyLedger,
    pub rounds: Vec<RoundLog>,
    pub converged: bool,
    pub stop: StopReason,
    pub iteration_cap: u64,
    /// Energy never decreased between rounds.
    pub monotone: bool,
    pub scan: TupleScan,
    /// Round with the smallest worst-colour share of irregular tuples (earliest on ties).
    pub best_round: usize,
    pub best_partition: Partition,
    pub best_scan: TupleScan,
}

/// Witness search over every r-subset of blocks in every colour, split across threads.
pub(crate) fn scan_tuples(
    probes: &[Probe],
    partition: &Partition,
    eps: &BigRational,
    p: &BigRational,
    mode: WitnessMode,
    seed: u64,
    round: usize,
    budget: u128,
    threads: usize,
) -> Result<(TupleScan, Vec<Vec<Option<IrregularityWitness>>>)> {
    let r = probes[0].h.r();
    let t = partition.order();
    let tuples = binomial(t as u64, r as u64) as usize;
    let labels = partition.labels();
    let counts: Vec<Vec<u64>> = probes.iter().map(|pr| tuple_counts(pr.h, &labels, t)).collect();
    let jobs: Vec<(usize, usize)> = (0..probes.len()).flat_map(|j| (0..tuples).map(move |k| (j, k))).collect();
    let chunk = jobs.len().div_ceil(threads.max(1)).max(1);
    let results: Vec<Result<Vec<Option<IrregularityWitness>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| {
                let counts = &counts;
                scope.spawn(move || {
                    part.iter()
                        .map(|&(j, rank)| {
                            if counts[j][rank] == 0 {
                                return Ok(None);
                            }
                            let idx: Vec<usize> = colex_unrank(rank as u64, r).into_iter().map(|i| i as usize).collect();
                            let blocks: Vec<&VertexSet> = idx.iter().map(|&i| partition.block(i)).collect();
                            let s = derive_seed(seed, &[round as u64, j as u64, rank as u64]);
                            let found = search(&probes[j], &blocks, eps, p, mode, s, budget)?;
                            Ok(found.witness.map(|mut w| {
                                w.colour = j as u32 + 1;
                                w.blocks = idx;
                                w
                            }))
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scan worker panicked")).collect()
    });
    let mut witnesses = vec![Vec::with_capacity(tuples); probes.len()];
    for (found, &(j, _)) in results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().zip(&jobs) {
        witnesses[j].push(found);
    }
    let irregular = witnesses.iter().map(|ws| ws.iter().map(|w| w.is_some()).collect()).collect();
    Ok((
        TupleScan {
            t,
            r,
            irregular,
            counts,
            certified: mode.certifies(),
        },
        witnesses,
    ))
}

/// Iterates witness scans and refinements from a contiguous equipartition of order t0
/// until at most ε·C(t, r) tuples are irregular in every colour.
pub fn regularize(hs: &[Hypergraph], params: &RegularityParams) -> Result<RegularityOutcome> {
    let Some(first) = hs.first() else {
        return invalid("need at least one colour class");
    };
    let (n, r, q) = (first.n(), first.r(), hs.len());
    if hs.iter().any(|h| h.n() != n || h.r() != r) {
        return invalid("colour classes must share vertex set and uniformity");
    }
    params.validate(n, r)?;
    let cap = params.iteration_cap(r, q);
    let energy_cap = BigRational::from_integer(q.into()) * &params.d * &params.d;
    let floor = &params.eta * BigRational::from_integer(n.into());
    let probes: Vec<Probe> = hs.iter().map(Probe::new).collect();
    let refine = RefineParams {
        mode: params.mode,
        eps: params.eps.clone(),
        p: params.p.clone(),
        order_cap: params.t_cap,
    };

    let mut partition = Partition::contiguous(n, params.t0)?;
    let mut rounds: Vec<RoundLog> = Vec::new();
    let mut monotone = true;
    // (worst irregular count, tuples, round, partition, scan)
    let mut best: Option<(usize, usize, usize, Partition, TupleScan)> = None;
    for round in 0.. {
        let ledger = multicolour_energy(hs, &partition, &params.p)?;
        let (scan, witnesses) = scan_tuples(
            &probes,
            &partition,
            &params.eps,
            &params.p,
            params.witness,
            params.seed,
            round,
            params.budget,
            params.threads,
        )?;
        let irregular = scan.irregular_counts();
        let t = partition.order();
        let tuples = binomial(t as u64, r as u64) as usize;
        let allowed = &params.eps * BigRational::from_integer(tuples.into());
        let bad = irregular.iter().position(|&c| BigRational::from_integer(c.into()) > allowed);
        if let Some(prev) = rounds.last() {
            monotone &= ledger.total >= prev.total;
        }
        let worst = irregular.iter().copied().max().unwrap_or(0);
        if best.as_ref().is_none_or(|b| (worst as u128) * (b.1 as u128) < (b.0 as u128) * (tuples as u128)) {
            best = Some((worst, tuples, round, partition.clone(), scan.clone()));
        }
        let cap_ok = (BigRational::from_integer(partition.min_size().into()) >= floor).then(|| ledger.total <= energy_cap);
        rounds.push(RoundLog {
            round,
            t,
            energies: ledger.per_colour.clone(),
            total: ledger.total.clone(),
            irregular,
            tuples,
            mode: params.mode,
            cap_ok,
            refined: false,
        });
        let stop = |reason: StopReason, partition: Partition, rounds: Vec<RoundLog>| RegularityOutcome {
            partition,
            ledger: ledger.clone(),
            rounds,
            converged: reason == StopReason::Regular,
            stop: reason,
            iteration_cap: cap,
            monotone,
            scan: scan.clone(),
            best_round: best.as_ref().unwrap().2,
            best_partition: best.as_ref().unwrap().3.clone(),
            best_scan: best.as_ref().unwrap().4.clone(),
        };
        let Some(j) = bad else {
            return Ok(stop(StopReason::Regular, partition, rounds));
        };
        if round as u64 >= cap {
            return Ok(stop(StopReason::IterationCap, partition, rounds));
        }
        let chosen: Vec<IrregularityWitness> = witnesses[j].iter().flatten().cloned().collect();
        if params.mode == RefineMode::Faithful {
            let e = (t as u32).checked_pow(r as u32 - 1).unwrap_or(u32::MAX);
            let next = 4usize.checked_pow(e).map(|f| t * (f - 2usize.pow(e)));
            if next.is_none_or(|k| k > params.t_cap) {
                return Ok(stop(StopReason::OrderCap, partition, rounds));
            }
        }
        match refine_step(hs, &partition, &chosen, &refine) {
            Ok(out) => {
                rounds.last_mut().unwrap().refined = true;
                partition = out.partition;
            }
            Err(Error::BudgetExceeded { .. }) => return Ok(stop(StopReason::OrderCap, partition, rounds)),
            Err(Error::NoEnergyGain { .. }) => return Ok(stop(StopReason::NoEnergyGain, partition, rounds)),
            Err(Error::InvalidParameter(_)) if params.mode == RefineMode::Faithful => {
                return Ok(stop(StopReason::SizePrecondition, partition, rounds))
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("the round loop only exits by returning")
}
