use num::{BigRational, Signed};
use serde::{Deserialize, Serialize};

use super::probe::{density, extreme, Probe};
use crate::error::{invalid, Error, Result};
use crate::exact::{ceil_u64, ser_ratio};
use crate::hypercore::{Hypergraph, VertexSet};
use crate::rng::Prng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum UniformMode {
    /// All tuples of disjoint sets of the minimum size or more; tiny n only.
    Exhaustive,
    /// Random disjoint tuples with sizes drawn between the floor and n/r.
    Sampled { tuples: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformReport {
    pub mode: UniformMode,
    /// No checked tuple exceeded D·p.
    pub ok: bool,
    /// True only for an exhaustive pass.
    pub certified: bool,
    pub min_size: usize,
    pub tuples_checked: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub min_density: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub max_density: BigRational,
    pub counterexample: Option<Vec<VertexSet>>,
}

/// Checks d(X_1..X_r) ≤ D·p over disjoint sets with |X_i| ≥ ⌈ηn⌉. Exhaustive mode
/// visits every choice of X_1..X_{r-1} and takes the extreme X_r; its cost is
/// r^n sub-block assignments, capped by `budget`.
pub fn check_upper_uniform(
    h: &Hypergraph,
    eta: &BigRational,
    p: &BigRational,
    d: &BigRational,
    mode: UniformMode,
    seed: u64,
    budget: u128,
) -> Result<UniformReport> {
    let (n, r) = (h.n(), h.r());
    if !eta.is_positive() || !p.is_positive() {
        return invalid("η and p must be positive");
    }
    let m0 = (ceil_u64(&(eta * BigRational::from_integer(n.into()))) as usize).max(1);
    if m0 * r > n {
        return invalid(format!("no {r} disjoint sets of size {m0} fit in {n} vertices"));
    }
    let cap = d * p;
    let probe = Probe::new(h);
    let mut st = State {
        min: None,
        max: None,
        violation: None,
        checked: 0,
        cap: &cap,
    };
    let certified = match mode {
        UniformMode::Exhaustive => {
            let needed = (r as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            if needed > budget {
                return Err(Error::BudgetExceeded {
                    what: "set assignments for an exhaustive uniformity check".into(),
                    needed,
                    budget,
                });
            }
            let mut fixed = Vec::new();
            exhaustive(&probe, n, r, m0, &VertexSet::new(), &mut fixed, &mut st);
            true
        }
        UniformMode::Sampled { tuples } => {
            let mut rng = Prng::seeded(seed);
            let mut perm: Vec<u32> = (0..n as u32).collect();
            for _ in 0..tuples {
                rng.shuffle(&mut perm);
                let mut at = 0;
                let sets: Vec<VertexSet> = (0..r)
                    .map(|_| {
                        let size = rng.range_inclusive(m0 as u64, (n / r) as u64) as usize;
                        let s = perm[at..at + size].iter().copied().collect();
                        at += size;
                        s
                    })
                    .collect();
                let refs: Vec<&VertexSet> = sets.iter().collect();
                let pi: u128 = sets.iter().map(|s| s.len() as u128).product();
                st.record(density(probe.count(&refs), pi), || sets.clone());
            }
            false
        }
    };
    let zero = || BigRational::from_integer(0.into());
    Ok(UniformReport {
        mode,
        ok: st.violation.is_none(),
        certified,
        min_size: m0,
        tuples_checked: st.checked,
        min_density: st.min.unwrap_or_else(zero),
        max_density: st.max.unwrap_or_else(zero),
        counterexample: st.violation,
    })
}

struct State<'a> {
    min: Option<BigRational>,
    max: Option<BigRational>,
    violation: Option<Vec<VertexSet>>,
    checked: u64,
    cap: &'a BigRational,
}

impl State<'_> {
    fn record(&mut self, d: BigRational, sets: impl FnOnce() -> Vec<VertexSet>) {
        self.checked += 1;
        if d > *self.cap && self.violation.is_none() {
            self.violation = Some(sets());
        }
        if self.min.as_ref().is_none_or(|m| d < *m) {
            self.min = Some(d.clone());
        }
        if self.max.as_ref().is_none_or(|m| d > *m) {
            self.max = Some(d);
        }
    }
}

fn exhaustive(probe: &Probe, n: usize, r: usize, m0: usize, used: &VertexSet, fixed: &mut Vec<VertexSet>, st: &mut State) {
    let free: Vec<u32> = (0..n as u32).filter(|&v| !used.contains(v)).collect();
    if fixed.len() == r - 1 {
        if free.len() < m0 {
            return;
        }
        let rest: VertexSet = free.iter().copied().collect();
        let mut parts: Vec<&VertexSet> = fixed.iter().collect();
        parts.push(&rest);
        let deg = probe.degrees(&parts, r - 1);
        let pi: u128 = fixed.iter().map(|x| x.len() as u128).product::<u128>() * m0 as u128;
        for largest in [true, false] {
            let (set, e) = extreme(&deg, m0, largest);
            st.record(density(e, pi), || {
                let mut s = fixed.clone();
                s.push(set);
                s
            });
        }
        return;
    }
    // leave room for the remaining sets
    let reserve = (r - 1 - fixed.len()) * m0;
    if free.len() < m0 + reserve {
        return;
    }
    for mask in 1u64..1 << free.len() {
        let k = mask.count_ones() as usize;
        if k < m0 || free.len() - k < reserve {
            continue;
        }
        let x: VertexSet = (0..free.len()).filter(|&i| mask >> i & 1 == 1).map(|i| free[i]).collect();
        let next = used.union(&x);
        fixed.push(x);
        exhaustive(probe, n, r, m0, &next, fixed, st);
        fixed.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::{complete, random_gnp, Edge};
    use num::One;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn bipartite(half: u32) -> Hypergraph {
        let mut edges = Vec::new();
        for a in 0..half {
            for b in half..2 * half {
                edges.push(Edge::new(&[a, b]).unwrap());
            }
        }
        Hypergraph::new(2 * half as usize, 2, edges).unwrap()
    }

    #[test]
    fn complete_graph_is_uniform() {
        let h = complete(10, 2).unwrap();
        let rep = check_upper_uniform(&h, &r(1, 5), &BigRational::one(), &r(3, 2), UniformMode::Exhaustive, 0, u128::MAX).unwrap();
        assert!(rep.ok && rep.certified);
        assert_eq!(rep.max_density, BigRational::one());
    }

    #[test]
    fn bipartite_violates() {
        let h = bipartite(5);
        for mode in [UniformMode::Exhaustive, UniformMode::Sampled { tuples: 200 }] {
            let rep = check_upper_uniform(&h, &r(2, 5), &r(1, 2), &r(3, 2), mode, 1, u128::MAX).unwrap();
            assert!(!rep.ok, "{mode:?}");
            let x = rep.counterexample.unwrap();
            let pi = (x[0].len() * x[1].len()) as i64;
            let e = h.edges().iter().filter(|e| {
                let [a, b] = [e.vertices()[0], e.vertices()[1]];
                (x[0].contains(a) && x[1].contains(b)) || (x[0].contains(b) && x[1].contains(a))
            });
            assert!(r(e.count() as i64, pi) > r(3, 4));
        }
    }

    /// Oracle: every assignment of vertices to X_1, X_2 or neither.
    fn brute_extremes(h: &Hypergraph, m0: usize) -> (BigRational, BigRational) {
        let n = h.n();
        let (mut lo, mut hi) = (r(i64::MAX, 1), r(-1, 1));
        for code in 0..3usize.pow(n as u32) {
            let (mut a, mut b, mut c) = (VertexSet::new(), VertexSet::new(), code);
            for v in 0..n as u32 {
                match c % 3 {
                    1 => a.insert(v),
                    2 => b.insert(v),
                    _ => false,
                };
                c /= 3;
            }
            if a.len() < m0 || b.len() < m0 {
                continue;
            }
            let e = h
                .edges()
                .iter()
                .filter(|e| {
                    let [x, y] = [e.vertices()[0], e.vertices()[1]];
                    (a.contains(x) && b.contains(y)) || (a.contains(y) && b.contains(x))
                })
                .count();
            let d = r(e as i64, (a.len() * b.len()) as i64);
            lo = lo.min(d.clone());
            hi = hi.max(d);
        }
        (lo, hi)
    }

    #[test]
    fn exhaustive_extremes_match_oracle() {
        let cases = [(bipartite(5), r(2, 5)), (bipartite(4), r(1, 4)), (random_gnp(9, 2, 0.4, 5).unwrap(), r(1, 5))];
        for (h, eta) in cases {
            let rep = check_upper_uniform(&h, &eta, &r(1, 2), &r(3, 2), UniformMode::Exhaustive, 1, u128::MAX).unwrap();
            assert_eq!((rep.min_density, rep.max_density), brute_extremes(&h, rep.min_size));
        }
        // both sets may sit inside one class when the floor allows it
        let rep = check_upper_uniform(&bipartite(4), &r(1, 4), &r(1, 2), &r(3, 2), UniformMode::Exhaustive, 1, u128::MAX).unwrap();
        assert_eq!(rep.min_density, r(0, 1));
    }

    #[test]
    fn exhaustive_three_uniform() {
        let g = random_gnp(9, 3, 0.5, 2).unwrap();
        let rep = check_upper_uniform(&g, &r(1, 5), &r(1, 2), &r(2, 1), UniformMode::Exhaustive, 0, u128::MAX).unwrap();
        assert!(rep.ok && rep.tuples_checked > 0);
        assert!(rep.max_density <= BigRational::one());
    }

    #[test]
    fn sampled_random_graph_concentrates() {
        let n = 1500;
        let p = r(60, n as i64);
        let g = random_gnp(n, 2, 60.0 / n as f64, 3).unwrap();
        let rep = check_upper_uniform(&g, &r(1, 10), &p, &r(3, 2), UniformMode::Sampled { tuples: 100 }, 9, 0).unwrap();
        assert!(rep.ok && !rep.certified);
        assert!(rep.min_density >= &p / BigRational::from_integer(2.into()));
    }

    #[test]
    fn refuses_large_exhaustive() {
        let g = random_gnp(30, 2, 0.5, 2).unwrap();
        assert!(matches!(
            check_upper_uniform(&g, &r(1, 5), &r(1, 2), &r(2, 1), UniformMode::Exhaustive, 0, 1 << 20),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
