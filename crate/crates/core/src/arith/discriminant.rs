//! Positive fundamental discriminants.

use crate::arith::squares::{distinct_primes, squarefree_flags};
use crate::error::{Error, Result};

/// A positive fundamental discriminant `r > 1`.
///
/// Either `r ≡ 1 (mod 4)` squarefree, or `r = 4m` with `m ≡ 2, 3 (mod 4)`
/// squarefree. The trivial discriminant 1 is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FundamentalDiscriminant(u64);

impl FundamentalDiscriminant {
    pub fn new(r: u64) -> Option<Self> {
        is_fundamental_discriminant(r).then_some(FundamentalDiscriminant(r))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn is_squarefree_slow(n: u64) -> bool {
    distinct_primes(n).iter().product::<u64>() == n
}

/// Independent predicate by trial division.
pub fn is_fundamental_discriminant(r: u64) -> bool {
    if r <= 1 {
        return false;
    }
    match r % 4 {
        1 => is_squarefree_slow(r),
        0 => {
            let m = r / 4;
            (m % 4 == 2 || m % 4 == 3) && is_squarefree_slow(m)
        }
        _ => false,
    }
}

/// All fundamental discriminants in `(y_low, y_high]`, ascending.
///
/// Real bounds are floored: the range is the integers in
/// `(⌊y_low⌋, ⌊y_high⌋]`.
pub fn enumerate_fundamental_discriminants(
    y_low: f64,
    y_high: f64,
) -> Result<Vec<FundamentalDiscriminant>> {
    if !(y_low.is_finite() && y_high.is_finite() && y_low >= 1.0 && y_low < y_high) {
        return Err(Error::Validation(format!(
            "discriminant range needs 1 <= y_low < y_high (got {y_low}, {y_high})"
        )));
    }
    if y_high > 1e12 {
        return Err(Error::Capacity(format!("discriminant bound {y_high} too large")));
    }
    let lo = y_low.floor() as u64;
    let hi = y_high.floor() as u64;
    if hi <= lo {
        return Ok(Vec::new());
    }
    // flags[i] <-> squarefreeness of i + 1
    let flags = squarefree_flags(1, hi);
    let sf = |n: u64| flags[(n - 1) as usize];
    let mut out = Vec::new();
    for r in (lo + 1).max(2)..=hi {
        let ok = match r % 4 {
            1 => sf(r),
            0 => {
                let m = r / 4;
                (m % 4 == 2 || m % 4 == 3) && sf(m)
            }
            _ => false,
        };
        if ok {
            debug_assert!(is_fundamental_discriminant(r));
            out.push(FundamentalDiscriminant(r));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker::kronecker;

    fn list(a: f64, b: f64) -> Vec<u64> {
        enumerate_fundamental_discriminants(a, b)
            .unwrap()
            .into_iter()
            .map(FundamentalDiscriminant::get)
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(list(4.0, 17.0), vec![5, 8, 12, 13, 17]);
        assert_eq!(list(1.0, 4.0), Vec::<u64>::new());
        assert_eq!(list(4.0, 8.0), vec![5, 8]);
        assert_eq!(list(4.5, 8.9), vec![5, 8]);
    }

    #[test]
    fn sieve_matches_predicate() {
        let fast = list(1.0, 20_000.0);
        let slow: Vec<u64> = (2..=20_000).filter(|&r| is_fundamental_discriminant(r)).collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn invalid_range() {
        assert!(enumerate_fundamental_discriminants(0.5, 4.0).is_err());
        assert!(enumerate_fundamental_discriminants(5.0, 5.0).is_err());
        assert!(enumerate_fundamental_discriminants(f64::NAN, 5.0).is_err());
    }

    #[test]
    fn characters_are_primitive() {
        for r in list(1.0, 200.0) {
            let chi: Vec<i32> = (0..2 * r as i64).map(|n| kronecker(r as i64, n)).collect();
            let period = (1..=r as usize)
                .find(|&d| (0..r as usize).all(|n| chi[n] == chi[n + d]))
                .unwrap();
            assert_eq!(period as u64, r, "character mod {r}");
        }
    }
}
