//! Square-related predicates on machine integers.

use num_bigint::BigInt;
use num_rational::BigRational;

/// Floor of the square root.
#[inline]
pub fn isqrt(n: u64) -> u64 {
    n.isqrt()
}

/// Exact perfect-square test (integer square root, no floating point).
#[inline]
pub fn is_perfect_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Product of the primes dividing `n` to an odd power.
///
/// `n·m` is a square exactly when the kernels of `n` and `m` coincide.
pub fn squarefree_kernel(mut n: u64) -> u64 {
    assert!(n >= 1, "kernel of zero");
    let mut kernel = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e % 2 == 1 {
                kernel *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    kernel * n
}

/// Distinct prime divisors of `n` by trial division.
pub fn distinct_primes(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `Π_{p | nm} (1 + 1/p)^{-1}` as an exact rational; 1 for `nm = 1`.
pub fn local_factor_prod(nm: u64) -> BigRational {
    assert!(nm >= 1, "local factor of zero");
    let mut num = BigInt::from(1u32);
    let mut den = BigInt::from(1u32);
    for p in distinct_primes(nm) {
        num *= p;
        den *= p + 1;
    }
    BigRational::new(num, den)
}

/// Squarefree flags for `lo..=hi` by sieving with prime squares.
pub fn squarefree_flags(lo: u64, hi: u64) -> Vec<bool> {
    if hi < lo {
        return Vec::new();
    }
    let mut flags = vec![true; (hi - lo + 1) as usize];
    if lo == 0 {
        flags[0] = false;
    }
    for p in crate::arith::primes::primes_up_to(isqrt(hi)) {
        let sq = p * p;
        let mut m = lo.div_ceil(sq) * sq;
        if m == 0 {
            m = sq;
        }
        while m <= hi {
            flags[(m - lo) as usize] = false;
            m += sq;
        }
    }
    flags
}
