//! Prime sieves: a smallest-prime-factor table for factorization inside a
//! bounded range, and a segmented stream for long prime ranges with an
//! optional residue-class filter.

use crate::arith::squares::isqrt;
use crate::error::{Error, Result};

/// Upper bound accepted by [`SpfTable::new`].
pub const MAX_SPF_BOUND: u64 = 400_000_000;

/// Primes `<= limit` by a plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table built by a linear sieve.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit > MAX_SPF_BOUND {
            return Err(Error::Capacity(format!(
                "factor table bound {limit} exceeds {MAX_SPF_BOUND}"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si || i * p as usize > n {
                    break;
                }
                spf[i * p as usize] = p;
            }
        }
        Ok(SpfTable { spf, primes })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    #[inline]
    pub fn smallest_factor(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    /// Prime factorization of `1 <= n <= limit` as `(p, e)` pairs, ascending.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// Table of radicals (product of distinct prime divisors) for `n <= limit`.
    pub fn radicals(&self) -> Vec<u32> {
        let n = self.spf.len() - 1;
        let mut rad = vec![0u32; n + 1];
        if n >= 1 {
            rad[1] = 1;
        }
        for i in 2..=n {
            let p = self.spf[i] as usize;
            let rest = i / p;
            rad[i] = if rest % p == 0 {
                rad[rest]
            } else {
                rad[rest] * p as u32
            };
        }
        rad
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const SEGMENT: u64 = 1 << 18;

/// Primes `p` with `lower < p <= upper`, ascending, optionally restricted to
/// `p ≡ residue (mod modulus)`.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    upper: u64,
    residue_filter: Option<(u64, u64)>,
    base: Vec<u64>,
    seg_start: u64,
    buffer: Vec<u64>,
    pos: usize,
}

impl PrimeStream {
    pub fn new(lower: u64, upper: u64) -> Self {
        let base = primes_up_to(isqrt(upper));
        PrimeStream {
            upper,
            residue_filter: None,
            base,
            seg_start: lower + 1,
            buffer: Vec::new(),
            pos: 0,
        }
    }

    pub fn with_residue(mut self, modulus: u64, residue: u64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        self.residue_filter = Some((modulus, residue % modulus));
        self
    }

    fn fill_segment(&mut self) -> bool {
        self.buffer.clear();
        self.pos = 0;
        while self.buffer.is_empty() {
            if self.seg_start > self.upper || self.seg_start == 0 {
                return false;
            }
            let lo = self.seg_start.max(2);
            let hi = self.upper.min(lo.saturating_add(SEGMENT - 1));
            self.seg_start = hi.saturating_add(1);
            if lo > hi {
                continue;
            }
            let len = (hi - lo + 1) as usize;
            let mut composite = vec![false; len];
            for &p in &self.base {
                if p * p > hi {
                    break;
                }
                let first = (p * p).max(lo.div_ceil(p) * p);
                let mut m = first;
                while m <= hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            for (i, &c) in composite.iter().enumerate() {
                if c {
                    continue;
                }
                let n = lo + i as u64;
                if let Some((m, r)) = self.residue_filter {
                    if n % m != r {
                        continue;
                    }
                }
                self.buffer.push(n);
            }
        }
        true
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buffer.len() && !self.fill_segment() {
            return None;
        }
        let p = self.buffer[self.pos];
        self.pos += 1;
        Some(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_matches_plain_sieve() {
        let all = primes_up_to(2_000_000);
        let streamed: Vec<u64> = PrimeStream::new(1000, 2_000_000).collect();
        let expected: Vec<u64> = all.iter().copied().filter(|&p| p > 1000).collect();
        assert_eq!(streamed, expected);
    }

    #[test]
    fn stream_bounds_are_half_open() {
        let v: Vec<u64> = PrimeStream::new(7, 13).collect();
        assert_eq!(v, vec![11, 13]);
        let v: Vec<u64> = PrimeStream::new(0, 2).collect();
        assert_eq!(v, vec![2]);
        assert_eq!(PrimeStream::new(24, 28).count(), 0);
    }

    #[test]
    fn residue_filter() {
        let v: Vec<u64> = PrimeStream::new(1, 50).with_residue(4, 3).collect();
        assert_eq!(v, vec![3, 7, 11, 19, 23, 31, 43, 47]);
        let v: Vec<u64> = PrimeStream::new(1, 50).with_residue(4, 1).collect();
        assert_eq!(v, vec![5, 13, 17, 29, 37, 41]);
    }

    #[test]
    fn spf_factorization_and_radicals() {
        let t = SpfTable::new(1000).unwrap();
        assert_eq!(t.factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(t.factorize(1), vec![]);
        let rad = t.radicals();
        assert_eq!(rad[360], 30);
        assert_eq!(rad[1], 1);
        assert_eq!(rad[997], 997);
        for n in 2..=1000u64 {
            assert_eq!(t.is_prime(n), is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn miller_rabin_large() {
        assert!(is_prime(1_000_000_007));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(1_000_000_007u64 * 998_244_353));
    }
}
