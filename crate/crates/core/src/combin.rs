//! Binomials, colex rank/unrank and colex-ordered subset enumeration.

/// C(n, k), saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        match acc.checked_mul(num) {
            Some(v) => acc = v / den,
            None => {
                let g = gcd(acc, den);
                let (a, d) = (acc / g, den / g);
                match a.checked_mul(num / d) {
                    Some(v) if num % d == 0 => acc = v,
                    _ => return u128::MAX,
                }
            }
        }
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `base^exp`, saturating.
pub fn saturating_pow(base: u128, exp: u64) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}

/// Colex rank of a sorted ascending subset: sum of C(s_i, i + 1).
pub fn colex_rank(sorted: &[u32]) -> u64 {
    sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| binomial(s as u64, i as u64 + 1) as u64)
        .sum()
}

/// Inverse of [`colex_rank`] for `k`-subsets.
pub fn colex_unrank(mut rank: u64, k: usize) -> Vec<u32> {
    let mut out = vec![0u32; k];
    for i in (0..k).rev() {
        // largest s with C(s, i + 1) <= rank
        let mut s = i as u64;
        while binomial(s + 1, i as u64 + 1) as u64 <= rank {
            s += 1;
        }
        rank -= binomial(s, i as u64 + 1) as u64;
        out[i] = s as u32;
    }
    out
}

/// All `k`-subsets of `0..n` in colex order, as sorted vectors.
///
/// [`Combinations::advance`] walks the same sequence without allocating.
pub struct Combinations {
    n: u32,
    cur: Vec<u32>,
    started: bool,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n: n as u32,
            cur: (0..k as u32).collect(),
            started: false,
            done: k > n,
        }
    }

    pub fn advance(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.cur);
        }
        let k = self.cur.len();
        let mut i = 0;
        loop {
            if i == k {
                self.done = true;
                return None;
            }
            let limit = if i + 1 < k { self.cur[i + 1] } else { self.n };
            if self.cur[i] + 1 < limit {
                self.cur[i] += 1;
                for (j, c) in self.cur.iter_mut().enumerate().take(i) {
                    *c = j as u32;
                }
                return Some(&self.cur);
            }
            i += 1;
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        self.advance().map(|s| s.to_vec())
    }
}

/// Calls `f` on every `k`-subset of `items` (positions chosen in colex order).
pub fn for_each_subset<T: Clone>(items: &[T], k: usize, mut f: impl FnMut(&[T])) {
    let mut buf = Vec::with_capacity(k);
    for idx in Combinations::new(items.len(), k) {
        buf.clear();
        buf.extend(idx.iter().map(|&i| items[i as usize].clone()));
        f(&buf);
    }
}
