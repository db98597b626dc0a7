//! Euler-product constants at the central point and their local factors.
//!
//! Products run over primes up to a cutoff in fixed-size blocks: each block
//! is multiplied out sequentially and the block results are combined in
//! order, so the value is independent of the number of worker threads.

use num_bigint::BigInt;
use num_integer::binomial;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::{is_prime, primes_up_to, PrimeStream};
use crate::error::{Error, Result};
use crate::real::Real;

/// Which per-prime factor to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LocalFactorKind {
    /// Fundamental-discriminant family, all primes.
    T,
    /// Prime-modulus family, all primes.
    S,
    /// Gaussian-ideal family, split primes `p ≡ 1 (mod 4)`.
    N1mod4,
    /// Gaussian-ideal family, inert primes `p ≡ 3 (mod 4)`.
    N3mod4,
    /// Gaussian-ideal family, the ramified prime 2.
    N2adic,
    /// `(1 − p^{-2})^{-1/2}` for `p ≡ 3 (mod 4)`.
    LandauRamanujan,
}

impl LocalFactorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LocalFactorKind::T => "T",
            LocalFactorKind::S => "S",
            LocalFactorKind::N1mod4 => "N1mod4",
            LocalFactorKind::N3mod4 => "N3mod4",
            LocalFactorKind::N2adic => "N2adic",
            LocalFactorKind::LandauRamanujan => "LandauRamanujan",
        }
    }

    /// Residue class `(modulus, residue)` of admissible primes, if restricted.
    pub fn residue_class(self) -> Option<(u64, u64)> {
        match self {
            LocalFactorKind::T | LocalFactorKind::S => None,
            LocalFactorKind::N1mod4 => Some((4, 1)),
            LocalFactorKind::N3mod4 | LocalFactorKind::LandauRamanujan => Some((4, 3)),
            LocalFactorKind::N2adic => Some((4, 2)),
        }
    }

    fn admits(self, p: u64) -> bool {
        match self.residue_class() {
            None => true,
            Some((m, r)) => p % m == r,
        }
    }
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

/// `Σ_i C(2k, 2i) p^{k−i}`, the numerator of the even part of
/// `(1 − p^{-1/2})^{-2k}` after clearing `(1 − 1/p)^{2k}`.
fn even_binomial_sum(k: u32, p: u64) -> BigInt {
    (0..=k as u64)
        .map(|i| BigInt::from(binomial(2 * k as u64, 2 * i)) * num_traits::pow(big(p), (k as u64 - i) as usize))
        .sum()
}

/// `(1 − 1/p)^{2k²−k} Σ_i C(2k,2i) p^{-i}` as an exact ratio.
fn factor_s(k: u32, p: u64) -> Real {
    let e = (2 * k * k - k) as usize;
    let num = num_traits::pow(big(p - 1), e) * even_binomial_sum(k, p);
    let den = num_traits::pow(big(p), (2 * k * k) as usize);
    Real::from_ratio(num, den)
}

/// `(1 − 1/p)^{2k²−k}((1 − 1/p)^{2k} + p Σ_i C(2k,2i) p^{-i}) / (1 + 1/p)`.
fn factor_t(k: u32, p: u64) -> Real {
    let e = (2 * k * k - k) as usize;
    let inner = num_traits::pow(big(p - 1), 2 * k as usize)
        + even_binomial_sum(k, p) * num_traits::pow(big(p), k as usize + 1);
    let num = num_traits::pow(big(p - 1), e) * inner;
    let den = num_traits::pow(big(p), (2 * k * k + k) as usize) * big(p + 1);
    Real::from_ratio(num, den)
}

/// `Σ_n C(n+2ℓ−1, 2ℓ−1)² p^{-n}`, summed until a geometric bound on the
/// remainder drops below `1e-60` of the partial sum.
fn split_series(l: u32, p: u64) -> Real {
    let r = 2 * l as u64 - 1;
    let tol = Real::from_ratio(1, num_traits::pow(BigInt::from(10u32), 60));
    // term_{n+1}/term_n = ((n + 2ℓ)/(n + 1))² / p, decreasing in n
    let ratio = |n: u64| Real::from_ratio(big(n + r + 1) * big(n + r + 1), big(n + 1) * big(n + 1) * big(p));
    let mut term = Real::one();
    let mut sum = Real::one();
    let mut n = 0u64;
    loop {
        term = &term * &ratio(n);
        sum = &sum + &term;
        n += 1;
        let next = ratio(n);
        if next < Real::one() {
            let remainder = &(&term * &next) / &(Real::one() - next);
            if remainder <= &tol * &sum {
                return sum;
            }
        }
    }
}

fn one_minus_inv_pow(p: u64, e: usize) -> Real {
    Real::from_ratio(num_traits::pow(big(p - 1), e), num_traits::pow(big(p), e))
}

/// `(1 − 1/p)^{4ℓ²} Σ_n C(n+2ℓ−1, 2ℓ−1)² p^{-n}`.
fn factor_n1(l: u32, p: u64) -> Real {
    one_minus_inv_pow(p, (4 * l * l) as usize) * split_series(l, p)
}

/// `((2+√2)^{2ℓ} + (2−√2)^{2ℓ}) / 2^{2ℓ²+ℓ+1}`.
pub fn two_adic_factor(l: u32) -> Real {
    // (2+√2)^{2ℓ} + (2−√2)^{2ℓ} = 2 Σ_j C(2ℓ, 2j) 2^{2ℓ−2j} 2^j, an integer
    let l = l as u64;
    let num: BigInt = (0..=l)
        .map(|j| BigInt::from(binomial(2 * l, 2 * j)) * (BigInt::from(1u32) << (2 * l - j)))
        .sum::<BigInt>()
        * 2u32;
    Real::from_ratio(num, BigInt::from(1u32) << (2 * l * l + l + 1))
}

/// The per-prime factor of the given kind.
pub fn local_factor(kind: LocalFactorKind, k: u32, p: u64) -> Result<Real> {
    if k == 0 {
        return Err(Error::Validation("fold count must be positive".into()));
    }
    if !is_prime(p) {
        return Err(Error::Validation(format!("{p} is not prime")));
    }
    if !kind.admits(p) {
        return Err(Error::ResidueClass {
            p,
            kind: kind.as_str().into(),
        });
    }
    Ok(match kind {
        LocalFactorKind::T => factor_t(k, p),
        LocalFactorKind::S => factor_s(k, p),
        LocalFactorKind::N1mod4 => factor_n1(k, p),
        LocalFactorKind::N3mod4 => one_minus_inv_pow(p, (2 * k * k - k) as usize),
        LocalFactorKind::N2adic => two_adic_factor(k),
        LocalFactorKind::LandauRamanujan => {
            Real::from_ratio(big(p) * big(p), big(p) * big(p) - 1).sqrt()
        }
    })
}

/// Number of primes multiplied sequentially inside one block.
const BLOCK: usize = 2048;

fn primes_of_kind(kind: LocalFactorKind, cutoff: u64) -> Vec<u64> {
    match kind.residue_class() {
        None => primes_up_to(cutoff),
        Some((m, r)) => primes_up_to(cutoff).into_iter().filter(|p| p % m == r).collect(),
    }
}

/// `Π_{p <= cutoff} local_factor(kind, k, p)` over admissible primes; the
/// empty product is 1.
pub fn euler_product(kind: LocalFactorKind, k: u32, cutoff: u64) -> Result<Real> {
    if k == 0 {
        return Err(Error::Validation("fold count must be positive".into()));
    }
    if kind == LocalFactorKind::N2adic {
        return Ok(if cutoff >= 2 { two_adic_factor(k) } else { Real::one() });
    }
    let primes = primes_of_kind(kind, cutoff);
    let blocks: Vec<Real> = primes
        .par_chunks(BLOCK)
        .map(|chunk| {
            chunk.iter().fold(Real::one(), |acc, &p| {
                let f = local_factor(kind, k, p).expect("admissible prime");
                acc * f
            })
        })
        .collect();
    Ok(blocks.into_iter().fold(Real::one(), |acc, b| acc * b))
}

/// Estimated bound on `Σ_{p > cutoff} |log f_p|` assuming
/// `|log f_p| <= C/p²`; `C` is twice the largest `p²|log f_p|` over the next
/// 64 admissible primes, and `Σ_{p > P} p^{-2} < 1/(P − 1)`.
pub fn tail_bound(kind: LocalFactorKind, k: u32, cutoff: u64) -> Result<f64> {
    // (P, 2P + 10⁴] holds far more than 64 primes of either odd class
    let upper = cutoff.saturating_mul(2).saturating_add(10_000);
    let mut stream = match kind.residue_class() {
        None => PrimeStream::new(cutoff, upper),
        Some((m, r)) => PrimeStream::new(cutoff, upper).with_residue(m, r),
    };
    let mut c: f64 = 0.0;
    for _ in 0..64 {
        let p = stream.next().expect("window holds 64 primes");
        let f = local_factor(kind, k, p)?;
        let pf = p as f64;
        c = c.max(f.ln_f64().abs() * pf * pf);
    }
    Ok(2.0 * c / (cutoff.max(2) - 1) as f64)
}

/// A truncated Euler-product constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantResult {
    pub name: String,
    pub k_or_l: u32,
    pub value: Real,
    pub prime_cutoff: u64,
    /// Bound on `|log(true value) − log(value)|`.
    pub tail_bound: f64,
}

/// JSON record for a constant.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantRecord {
    pub name: String,
    pub k_or_l: u32,
    pub value_decimal_string: String,
    pub cutoff: u64,
    pub tail_bound: f64,
}

impl ConstantResult {
    /// Absolute error implied by the log-tail bound.
    pub fn abs_error_bound(&self) -> f64 {
        self.value.to_f64().abs() * self.tail_bound.exp_m1()
    }

    pub fn record(&self) -> ConstantRecord {
        ConstantRecord {
            name: self.name.clone(),
            k_or_l: self.k_or_l,
            value_decimal_string: self.value.to_decimal_string(60),
            cutoff: self.prime_cutoff,
            tail_bound: self.tail_bound,
        }
    }
}

fn check_cutoff(cutoff: u64) -> Result<()> {
    if cutoff == 0 {
        return Err(Error::Validation("prime cutoff must be positive".into()));
    }
    if cutoff > 400_000_000 {
        return Err(Error::Capacity(format!("prime cutoff {cutoff} exceeds 4e8")));
    }
    Ok(())
}

/// `b = 2^{-1/2} Π_{p ≡ 3 (4), p <= cutoff} (1 − p^{-2})^{-1/2}`.
pub fn landau_ramanujan(cutoff: u64) -> Result<ConstantResult> {
    if cutoff < 100 {
        return Err(Error::Validation(format!(
            "Landau-Ramanujan cutoff must be at least 100 (got {cutoff})"
        )));
    }
    check_cutoff(cutoff)?;
    Ok(landau_ramanujan_unchecked(cutoff))
}

fn landau_ramanujan_unchecked(cutoff: u64) -> ConstantResult {
    let prod = euler_product(LocalFactorKind::LandauRamanujan, 1, cutoff).expect("valid kind");
    let value = prod / Real::from_int(2).sqrt();
    // ½ Σ_{p>P} −log(1 − p^{-2}) <= ½ (1 − P^{-2})^{-1} Σ_{n>P} n^{-2}
    let p = cutoff.max(2) as f64;
    let tail = 0.5 / (1.0 - 1.0 / (p * p)) / (p - 1.0);
    ConstantResult {
        name: "landau_ramanujan".into(),
        k_or_l: 1,
        value,
        prime_cutoff: cutoff,
        tail_bound: tail,
    }
}

/// `a(T) = 2 Π_{p <= cutoff} local_factor(T, k, p)`.
pub fn a_t(k: u32, cutoff: u64) -> Result<ConstantResult> {
    check_cutoff(cutoff)?;
    let prod = euler_product(LocalFactorKind::T, k, cutoff)?;
    Ok(ConstantResult {
        name: "a_T".into(),
        k_or_l: k,
        value: prod * Real::from_int(2),
        prime_cutoff: cutoff,
        tail_bound: tail_bound(LocalFactorKind::T, k, cutoff)?,
    })
}

/// `a(S) = 2 Π_{p <= cutoff} local_factor(S, k, p)`.
pub fn a_s(k: u32, cutoff: u64) -> Result<ConstantResult> {
    check_cutoff(cutoff)?;
    let prod = euler_product(LocalFactorKind::S, k, cutoff)?;
    Ok(ConstantResult {
        name: "a_S".into(),
        k_or_l: k,
        value: prod * Real::from_int(2),
        prime_cutoff: cutoff,
        tail_bound: tail_bound(LocalFactorKind::S, k, cutoff)?,
    })
}

/// `a(N) = 2 (π/(8b²))^{ℓ(2ℓ−1)} · two-adic factor · Π_{p ≡ 1 (4)} f_p`, with
/// `b` truncated at the same cutoff.
pub fn a_n(l: u32, cutoff: u64) -> Result<ConstantResult> {
    check_cutoff(cutoff)?;
    if l == 0 {
        return Err(Error::Validation("fold count must be positive".into()));
    }
    let b = landau_ramanujan_unchecked(cutoff.max(2));
    let e = (l * (2 * l - 1)) as i64;
    let ratio = Real::pi() / (Real::from_int(8) * &b.value * &b.value);
    let split = euler_product(LocalFactorKind::N1mod4, l, cutoff)?;
    let value = Real::from_int(2) * ratio.powi(e) * two_adic_factor(l) * split;
    let tail = tail_bound(LocalFactorKind::N1mod4, l, cutoff)? + 2.0 * e as f64 * b.tail_bound;
    Ok(ConstantResult {
        name: "a_N".into(),
        k_or_l: l,
        value,
        prime_cutoff: cutoff,
        tail_bound: tail,
    })
}

/// `a(N)` assembled from the per-class products before folding the inert and
/// split `(1 − 1/p)` powers into `b`: the inert product
/// `Π_{p ≡ 3} (1 − 1/p)^{E}` is regularised through
/// `L(1, χ_{−4}) = π/4`, i.e. replaced by
/// `(π/4)^E Π_{p ≡ 3}(1 − p^{-2})^E Π_{p ≡ 1}(1 − 1/p)^E` with `E = 2ℓ² − ℓ`.
pub fn a_n_unfolded(l: u32, cutoff: u64) -> Result<Real> {
    check_cutoff(cutoff)?;
    if l == 0 {
        return Err(Error::Validation("fold count must be positive".into()));
    }
    let e = (2 * l * l - l) as usize;
    let inert: Real = primes_of_kind(LocalFactorKind::N3mod4, cutoff)
        .iter()
        .fold(Real::one(), |acc, &p| {
            acc * Real::from_ratio(
                num_traits::pow(big(p) * big(p) - 1, e),
                num_traits::pow(big(p) * big(p), e),
            )
        });
    // per split prime: (1 − 1/p)^{2ℓ²+ℓ} Σ_n …, times (1 − 1/p)^E from the L-function
    let split: Real = primes_of_kind(LocalFactorKind::N1mod4, cutoff)
        .iter()
        .fold(Real::one(), |acc, &p| {
            acc * one_minus_inv_pow(p, (2 * l * l + l) as usize)
                * split_series(l, p)
                * one_minus_inv_pow(p, e)
        });
    let quarter_pi = Real::pi() / Real::from_int(4);
    Ok(Real::from_int(2) * two_adic_factor(l) * quarter_pi.powi(e as i64) * inert * split)
}

/// `12/π²`, the value of `a(S)` for `k = 1`.
pub fn twelve_over_pi_squared() -> Real {
    let pi = Real::pi();
    Real::from_int(12) / (&pi * &pi)
}

/// `a` for a setting tag (`T`, `S` or `N`).
pub fn constant_for(setting: char, k: u32, cutoff: u64) -> Result<ConstantResult> {
    match setting {
        'T' => a_t(k, cutoff),
        'S' => a_s(k, cutoff),
        'N' => a_n(k, cutoff),
        other => Err(Error::Validation(format!("unknown setting {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The T and S factors straight from their defining expressions in
    /// `p^{-1/2}`.
    fn direct(kind: LocalFactorKind, k: u32, p: u64) -> Real {
        let t = Real::from_ratio(1, p as i64);
        let s = t.sqrt();
        let one = Real::one();
        let e = (2 * k * k + k) as i64;
        let pre = (&one - &t).powi(e);
        let even = ((&one + &s).powi(-2 * k as i64) + (&one - &s).powi(-2 * k as i64))
            / Real::from_int(2);
        match kind {
            LocalFactorKind::T => {
                pre * (one.clone() + Real::from_int(p as i64) * even)
                    / Real::from_int(p as i64 + 1)
            }
            LocalFactorKind::S => pre * even,
            _ => unreachable!(),
        }
    }

    fn close(a: &Real, b: &Real, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol
    }

    #[test]
    fn rational_forms_match_direct_forms() {
        for k in 1..=4 {
            for p in [2u64, 3, 5, 7, 101, 1_000_003] {
                for kind in [LocalFactorKind::T, LocalFactorKind::S] {
                    let a = local_factor(kind, k, p).unwrap();
                    let b = direct(kind, k, p);
                    assert!(close(&a, &b, 1e-80), "{kind:?} k={k} p={p}");
                }
            }
        }
    }

    #[test]
    fn s_factor_k_one() {
        for p in [2u64, 3, 5, 97] {
            let f = local_factor(LocalFactorKind::S, 1, p).unwrap();
            let expected = Real::from_ratio(p * p - 1, p * p);
            assert_eq!(f, expected);
        }
    }

    #[test]
    fn t_factor_k_one_large_prime() {
        let f = local_factor(LocalFactorKind::T, 1, 1_000_003).unwrap();
        assert!((f.to_f64() - 1.0).abs() < 1e-11);
        // 1 − 4/p² + O(p^{-3})
        let p = 1_000_003f64;
        assert!(((f.to_f64() - 1.0) * p * p + 4.0).abs() < 1e-4);
    }

    #[test]
    fn two_adic() {
        assert_eq!(two_adic_factor(1), Real::from_ratio(3, 4));
        let s2 = Real::from_int(2).sqrt();
        let two = Real::from_int(2);
        for l in 1..=4u32 {
            let direct = ((&two + &s2).powi(2 * l as i64) + (&two - &s2).powi(2 * l as i64))
                / Real::from_ratio(BigInt::from(1u32) << (2 * l * l + l + 1), 1);
            assert!(close(&two_adic_factor(l), &direct, 1e-80));
        }
    }

    #[test]
    fn split_series_matches_unswapped_sum() {
        // Σ_n p^{-n} (Σ_r C(r+ℓ−1,ℓ−1) C(n−r+ℓ−1,ℓ−1))², truncated far out
        for l in 1..=3u32 {
            let p = 13u64;
            let mut sum = Real::zero();
            for n in 0..120u64 {
                let inner: BigInt = (0..=n)
                    .map(|r| {
                        BigInt::from(binomial(r + l as u64 - 1, l as u64 - 1))
                            * BigInt::from(binomial(n - r + l as u64 - 1, l as u64 - 1))
                    })
                    .sum();
                sum = sum + Real::from_ratio(&inner * &inner, num_traits::pow(big(p), n as usize));
            }
            let e = (4 * l * l) as usize;
            let pre = Real::from_ratio(num_traits::pow(big(p - 1), e), num_traits::pow(big(p), e));
            let f = local_factor(LocalFactorKind::N1mod4, l, p).unwrap();
            assert!(close(&(pre * sum), &f, 1e-55), "l = {l}");
        }
    }

    #[test]
    fn residue_class_violations() {
        assert!(matches!(
            local_factor(LocalFactorKind::N1mod4, 1, 7),
            Err(Error::ResidueClass { p: 7, .. })
        ));
        assert!(matches!(
            local_factor(LocalFactorKind::N3mod4, 1, 5),
            Err(Error::ResidueClass { .. })
        ));
        assert!(matches!(
            local_factor(LocalFactorKind::N2adic, 1, 3),
            Err(Error::ResidueClass { .. })
        ));
        assert!(local_factor(LocalFactorKind::T, 1, 9).is_err());
    }

    #[test]
    fn empty_products() {
        assert_eq!(a_t(1, 1).unwrap().value, Real::from_int(2));
        assert_eq!(a_s(2, 1).unwrap().value, Real::from_int(2));
        assert_eq!(
            euler_product(LocalFactorKind::LandauRamanujan, 1, 2).unwrap(),
            Real::one()
        );
        assert!(landau_ramanujan(99).is_err());
    }

    #[test]
    fn factors_are_one_plus_inverse_square() {
        let cases = [
            (LocalFactorKind::T, 1u32),
            (LocalFactorKind::T, 2),
            (LocalFactorKind::S, 1),
            (LocalFactorKind::S, 3),
            (LocalFactorKind::N1mod4, 1),
            (LocalFactorKind::N1mod4, 2),
            (LocalFactorKind::LandauRamanujan, 1),
        ];
        for (kind, k) in cases {
            let primes: Vec<u64> = match kind.residue_class() {
                None => PrimeStream::new(1000, 100_000).step_by(97).collect(),
                Some((m, r)) => PrimeStream::new(1000, 100_000).with_residue(m, r).step_by(97).collect(),
            };
            let scaled: Vec<f64> = primes
                .iter()
                .map(|&p| (local_factor(kind, k, p).unwrap().to_f64() - 1.0).abs() * (p * p) as f64)
                .collect();
            let c = scaled.iter().cloned().fold(0.0, f64::max);
            assert!(c < 1e3, "{kind:?} k={k}: C = {c}");
        }
        // the inert factor is 1 − (2ℓ²−ℓ)/p + O(p^{-2}) instead
        let f = local_factor(LocalFactorKind::N3mod4, 2, 100_003).unwrap().to_f64();
        assert!(((1.0 - f) * 100_003.0 - 6.0).abs() < 1e-3);
    }

    #[test]
    fn tail_bound_decreases() {
        for kind in [LocalFactorKind::T, LocalFactorKind::S, LocalFactorKind::N1mod4] {
            let a = tail_bound(kind, 1, 1000).unwrap();
            let b = tail_bound(kind, 1, 10_000).unwrap();
            assert!(b < a && b > 0.0);
        }
    }

    #[test]
    fn a_s_one_near_closed_form() {
        let r = a_s(1, 100_000).unwrap();
        let diff = (&r.value - &twelve_over_pi_squared()).abs().to_f64();
        assert!(diff <= r.abs_error_bound(), "{diff} vs {}", r.abs_error_bound());
    }

    #[test]
    fn a_n_paths_agree() {
        for l in 1..=2 {
            let folded = a_n(l, 20_000).unwrap().value;
            let unfolded = a_n_unfolded(l, 20_000).unwrap();
            assert!(close(&folded, &unfolded, 1e-40), "l = {l}");
        }
    }

    #[test]
    fn landau_ramanujan_value() {
        let b = landau_ramanujan(100_000).unwrap();
        assert!((b.value.to_f64() - 0.764_223_653_589_220).abs() < 1e-5);
    }

    #[test]
    fn a_n_one_closed_form() {
        // the split series collapses to 1 − 1/p², leaving (3/2)·L(1, χ₋₄)·Π_{p odd}(1 − 1/p²)
        let r = a_n(1, 100_000).unwrap();
        let expected = Real::from_int(3) / Real::pi();
        let diff = (&r.value - &expected).abs().to_f64();
        assert!(diff <= r.abs_error_bound(), "{diff} vs {}", r.abs_error_bound());
    }

    #[test]
    fn refining_cutoff_stays_within_tail() {
        for (name, k) in [('T', 1), ('S', 1), ('N', 1), ('T', 2), ('S', 2)] {
            let coarse = constant_for(name, k, 10_000).unwrap();
            let fine = constant_for(name, k, 100_000).unwrap();
            let shift = (fine.value.ln_f64() - coarse.value.ln_f64()).abs();
            assert!(shift < coarse.tail_bound, "{name}({k}): {shift} vs {}", coarse.tail_bound);
        }
    }
}
