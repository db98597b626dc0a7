//! Diagonal sums over pairs `n, m` with `nm` a square, their asymptotic
//! predictions, and the volume lemmas behind the leading coefficient.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::SpfTable;
use crate::arith::squares::{is_perfect_square, isqrt, local_factor_prod, squarefree_flags};
use crate::arith::DivisorTable;
use crate::error::{Error, Result};
use crate::quad::{neumaier_sum, simplex_integral};
use crate::rmt::{gamma_leading_coefficient, moment_degree};

/// Nonnegative rational endpoint of a scaled interval.
pub type Endpoint = Ratio<u64>;

/// `(A, B)`: pairs with `Ax < n, m <= Bx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub a: Endpoint,
    pub b: Endpoint,
}

impl Interval {
    pub fn new(a: Endpoint, b: Endpoint) -> Result<Self> {
        if *b.denom() == 0 || *a.denom() == 0 || a >= b {
            return Err(Error::Validation(format!("interval needs 0 <= A < B (got {a}, {b})")));
        }
        Ok(Interval { a, b })
    }

    pub fn unit() -> Self {
        Interval {
            a: Ratio::from_integer(0),
            b: Ratio::from_integer(1),
        }
    }

    pub fn from_ints(a: u64, b: u64) -> Result<Self> {
        Interval::new(Ratio::from_integer(a), Ratio::from_integer(b))
    }

    /// Parses `A,B` with each endpoint an integer, `p/q`, or a decimal.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Validation(format!("interval {s:?} is not of the form A,B")))?;
        Interval::new(parse_endpoint(a.trim())?, parse_endpoint(b.trim())?)
    }

    /// `(⌊Ax⌋, ⌊Bx⌋)`.
    pub fn bounds(&self, x: u64) -> (u64, u64) {
        let scale = |r: &Endpoint| (*r.numer() as u128 * x as u128 / *r.denom() as u128) as u64;
        (scale(&self.a), scale(&self.b))
    }
}

fn parse_endpoint(s: &str) -> Result<Endpoint> {
    let bad = || Error::Validation(format!("bad interval endpoint {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10u64.pow(digits);
        let i: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let f: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        return Ok(Ratio::new(i * scale + f, scale));
    }
    Ok(Ratio::from_integer(s.parse().map_err(|_| bad())?))
}

/// Exact diagonal sum.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSumResult {
    pub k: u32,
    pub x: u64,
    pub interval: Interval,
    pub weighted: bool,
    pub value: BigRational,
}

/// Largest `⌊Bx⌋` accepted by [`diagonal_sum`] when unweighted or by
/// [`diagonal_sum_approx`].
pub const MAX_DIAGONAL_BOUND: u64 = 50_000_000;
/// Largest `⌊Bx⌋` for which the weighted sum is assembled as an exact
/// rational; its denominator grows like `e^{Bx}`.
pub const MAX_EXACT_WEIGHTED_BOUND: u64 = 100_000;
/// Largest `⌊Bx⌋` accepted by [`diagonal_sum_bruteforce`].
pub const MAX_BRUTEFORCE_BOUND: u64 = 20_000;

fn validate(k: u32, x: u64, limit: u64, interval: &Interval) -> Result<(u64, u64)> {
    if k == 0 || x == 0 {
        return Err(Error::Validation(format!(
            "diagonal sum needs k >= 1 and x >= 1 (got k={k}, x={x})"
        )));
    }
    let (lo, hi) = interval.bounds(x);
    if hi > limit {
        return Err(Error::Capacity(format!("range bound {hi} exceeds {limit}")));
    }
    Ok((lo, hi))
}

/// Per-radical accumulation `C[r] = Σ d_k(qa²) d_k(qb²)` over
/// `rad(qab) = r`, or the unweighted total.
enum Accumulated {
    Unweighted(u128),
    Weighted(Vec<u64>),
}

fn accumulate(k: u32, lo: u64, hi: u64, weighted: bool) -> Result<Accumulated> {
    if hi <= lo {
        return Ok(if weighted {
            Accumulated::Weighted(vec![0; hi as usize + 1])
        } else {
            Accumulated::Unweighted(0)
        });
    }
    let table = DivisorTable::build(k, hi)?;
    let d = table.values();
    let squarefree = squarefree_flags(1, hi);
    // columns of the kernel parametrisation n = q a², lo < n <= hi
    let column = |q: u64| -> Vec<(u64, u64)> {
        let a_max = isqrt(hi / q);
        let a_min = isqrt(lo / q) + 1;
        (a_min..=a_max)
            .filter(|&a| q * a * a > lo)
            .map(|a| (a, d[(q * a * a) as usize]))
            .collect()
    };
    let qs: Vec<u64> = (1..=hi).filter(|&q| squarefree[(q - 1) as usize]).collect();
    if !weighted {
        let total: u128 = qs
            .par_iter()
            .map(|&q| {
                let s: u128 = column(q).iter().map(|&(_, v)| v as u128).sum();
                s * s
            })
            .sum();
        return Ok(Accumulated::Unweighted(total));
    }
    let mass: u128 = d[(lo + 1) as usize..=hi as usize].iter().map(|&v| v as u128).sum();
    if mass.checked_mul(mass).is_none_or(|m| m > u64::MAX as u128) {
        return Err(Error::Capacity(format!(
            "weighted diagonal counts for k={k} up to {hi} may overflow 64 bits"
        )));
    }
    let rad = SpfTable::new(hi)?.radicals();
    let counts: Vec<AtomicU64> = (0..=hi).map(|_| AtomicU64::new(0)).collect();
    qs.par_iter().for_each(|&q| {
        let col = column(q);
        for (i, &(a, va)) in col.iter().enumerate() {
            let r = rad[(q * a * a) as usize] as usize;
            counts[r].fetch_add(va * va, Ordering::Relaxed);
            for &(b, vb) in &col[i + 1..] {
                let r = rad[(q * a * b) as usize] as usize;
                counts[r].fetch_add(2 * va * vb, Ordering::Relaxed);
            }
        }
    });
    Ok(Accumulated::Weighted(
        counts.into_iter().map(AtomicU64::into_inner).collect(),
    ))
}

/// `ψ(r) = Π_{p | r} (p + 1)` for every `r <= limit`.
fn psi_table(limit: u64) -> Result<Vec<u64>> {
    let spf = SpfTable::new(limit)?;
    let n = limit as usize;
    let mut psi = vec![1u64; n + 1];
    for i in 2..=n {
        let p = spf.smallest_factor(i as u64) as usize;
        let rest = i / p;
        psi[i] = if rest % p == 0 { psi[rest] } else { psi[rest] * (p as u64 + 1) };
    }
    Ok(psi)
}

/// Sum of rationals by balanced splitting.
fn sum_rationals(terms: &[BigRational]) -> BigRational {
    match terms.len() {
        0 => BigRational::zero(),
        1 => terms[0].clone(),
        n => sum_rationals(&terms[..n / 2]) + sum_rationals(&terms[n / 2..]),
    }
}

/// Exact diagonal sum via the kernel parametrisation `n = q a²`, `m = q b²`
/// over squarefree `q`.
pub fn diagonal_sum(k: u32, x: u64, interval: Interval, weighted: bool) -> Result<DiagonalSumResult> {
    let limit = if weighted { MAX_EXACT_WEIGHTED_BOUND } else { MAX_DIAGONAL_BOUND };
    let (lo, hi) = validate(k, x, limit, &interval)?;
    let value = match accumulate(k, lo, hi, weighted)? {
        Accumulated::Unweighted(total) => BigRational::from_integer(BigInt::from(total)),
        Accumulated::Weighted(counts) => {
            // Σ_r C[r] r / ψ(r), grouped by ψ
            let psi = psi_table(hi.max(1))?;
            let mut groups: BTreeMap<u64, BigInt> = BTreeMap::new();
            for (r, &c) in counts.iter().enumerate() {
                if c != 0 {
                    *groups.entry(psi[r]).or_insert_with(BigInt::zero) +=
                        BigInt::from(c) * BigInt::from(r as u64);
                }
            }
            let terms: Vec<BigRational> = groups
                .into_iter()
                .map(|(den, num)| BigRational::new(num, BigInt::from(den)))
                .collect();
            sum_rationals(&terms)
        }
    };
    Ok(DiagonalSumResult { k, x, interval, weighted, value })
}

/// Floating-point diagonal sum for ranges beyond exact assembly; the
/// per-radical counts are exact and the final weighting is a compensated
/// sum in ascending order of the radical.
pub fn diagonal_sum_approx(k: u32, x: u64, interval: Interval, weighted: bool) -> Result<f64> {
    let (lo, hi) = validate(k, x, MAX_DIAGONAL_BOUND, &interval)?;
    Ok(match accumulate(k, lo, hi, weighted)? {
        Accumulated::Unweighted(total) => total as f64,
        Accumulated::Weighted(counts) => {
            let psi = psi_table(hi.max(1))?;
            neumaier_sum(
                counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(r, &c)| c as f64 * (r as f64 / psi[r] as f64)),
            )
        }
    })
}

/// Double loop over all pairs; the oracle for [`diagonal_sum`].
pub fn diagonal_sum_bruteforce(
    k: u32,
    x: u64,
    interval: Interval,
    weighted: bool,
) -> Result<DiagonalSumResult> {
    let (lo, hi) = validate(k, x, MAX_BRUTEFORCE_BOUND, &interval)?;
    let mut value = BigRational::zero();
    if hi > lo {
        let table = DivisorTable::build(k, hi)?;
        let mut count = BigInt::zero();
        for n in lo + 1..=hi {
            for m in lo + 1..=hi {
                if !is_perfect_square(n * m) {
                    continue;
                }
                let dd = BigInt::from(table.get(n)) * table.get(m);
                if weighted {
                    value += local_factor_prod(n * m) * dd;
                } else {
                    count += dd;
                }
            }
        }
        if !weighted {
            value = BigRational::from_integer(count);
        }
    }
    Ok(DiagonalSumResult { k, x, interval, weighted, value })
}

/// `(√B − √A)²`.
pub fn interval_factor(interval: &Interval) -> f64 {
    let sqrt = |r: &Endpoint| (r.to_f64().expect("finite endpoint")).sqrt();
    (sqrt(&interval.b) - sqrt(&interval.a)).powi(2)
}

/// Leading term of the volume of the summation region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolumeAsymptotic {
    pub k: u32,
    #[serde(serialize_with = "crate::serde_rational")]
    pub leading_coefficient: BigRational,
    pub degree: u32,
}

/// `C(k²+k−2, (k²+k)/2−1) / (2^{k²+k−2} (2k²+k−2)!)`, the coefficient of
/// `x (log x)^{2k²+k−2}` in the volume; twice the leading coefficient of `γ`.
pub fn volume_asymptotic(k: u32) -> Result<VolumeAsymptotic> {
    let lead = gamma_leading_coefficient(k)? * BigInt::from(2);
    Ok(VolumeAsymptotic { k, leading_coefficient: lead, degree: moment_degree(k) })
}

/// `a · (√B−√A)² · x · Λ_k · (log x)^{2k²+k−2}` for a given constant `a`.
pub fn predicted_diagonal_with(k: u32, x: f64, constant: f64, interval: &Interval) -> Result<f64> {
    if !(x >= 3.0) {
        return Err(Error::Validation(format!("prediction needs x >= 3 (got {x})")));
    }
    let lead = crate::rational_to_f64(&gamma_leading_coefficient(k)?);
    Ok(constant * interval_factor(interval) * x * lead * x.ln().powi(moment_degree(k) as i32))
}

/// Predicted diagonal sum: `T` for the weighted sum, `S` for the unweighted
/// one, with the constant truncated at `prime_cutoff`.
pub fn predicted_diagonal(
    k: u32,
    x: f64,
    setting: char,
    interval: &Interval,
    prime_cutoff: u64,
) -> Result<f64> {
    let a = match setting {
        'T' | 'S' => crate::euler::constant_for(setting, k, prime_cutoff)?,
        other => return Err(Error::Validation(format!("diagonal setting must be T or S, not {other}"))),
    };
    predicted_diagonal_with(k, x, a.value.to_f64(), interval)
}

fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

/// `∫_{x_i >= 1, Π x_i <= Y} log(Y/Π x_i)^m Π dx_i/x_i = m!/(m+n)! (log Y)^{m+n}`.
pub fn lemma_i(m: u32, n: u32, y: f64) -> Result<f64> {
    if n == 0 || !(y > 1.0) {
        return Err(Error::Validation(format!("lemma I needs n >= 1 and Y > 1 (got n={n}, Y={y})")));
    }
    Ok(factorial(m) / factorial(m + n) * y.ln().powi((m + n) as i32))
}

/// `∫_{x_i >= 1, Π x_i <= Y} Π dx_i = (−1)^n + Y Σ_{j<n} (−1)^{n−1−j} (log Y)^j / j!`.
pub fn lemma_j(n: u32, y: f64) -> Result<f64> {
    if n == 0 || !(y >= 1.0) {
        return Err(Error::Validation(format!("lemma J needs n >= 1 and Y >= 1 (got n={n}, Y={y})")));
    }
    let l = y.ln();
    let sign = |e: u32| if e % 2 == 0 { 1.0 } else { -1.0 };
    let sum: f64 = (0..n).map(|j| sign(n - 1 - j) * l.powi(j as i32) / factorial(j)).sum();
    Ok(sign(n) + y * sum)
}

/// The defining integral of [`lemma_i`] by quadrature in `u_i = log x_i`.
pub fn lemma_i_numeric(m: u32, n: u32, y: f64, nodes: usize) -> f64 {
    let total = y.ln();
    simplex_integral(n as usize, total, nodes, &|u: &[f64]| {
        (total - u.iter().sum::<f64>()).powi(m as i32)
    })
}

/// The defining integral of [`lemma_j`] by quadrature in `u_i = log x_i`.
pub fn lemma_j_numeric(n: u32, y: f64, nodes: usize) -> f64 {
    simplex_integral(n as usize, y.ln(), nodes, &|u: &[f64]| u.iter().sum::<f64>().exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_examples() {
        let unit = Interval::unit();
        assert_eq!(diagonal_sum(1, 1, unit, true).unwrap().value, q(1, 1));
        assert_eq!(diagonal_sum(1, 2, unit, true).unwrap().value, q(5, 3));
        assert_eq!(diagonal_sum(2, 3, unit, true).unwrap().value, q(20, 3));
        assert_eq!(diagonal_sum(1, 4, unit, false).unwrap().value, q(6, 1));
    }

    #[test]
    fn matches_bruteforce_small_grid() {
        let intervals = [Interval::unit(), Interval::from_ints(1, 2).unwrap()];
        for k in 1..=3 {
            for x in [1u64, 2, 3, 7, 30, 64, 150] {
                for iv in intervals {
                    for w in [false, true] {
                        let fast = diagonal_sum(k, x, iv, w).unwrap().value;
                        let slow = diagonal_sum_bruteforce(k, x, iv, w).unwrap().value;
                        assert_eq!(fast, slow, "k={k} x={x} {iv:?} weighted={w}");
                    }
                }
            }
        }
    }

    #[test]
    fn approx_tracks_exact() {
        let iv = Interval::unit();
        let exact = diagonal_sum(2, 3000, iv, true).unwrap().value;
        let approx = diagonal_sum_approx(2, 3000, iv, true).unwrap();
        let e = crate::rational_to_f64(&exact);
        assert!(((approx - e) / e).abs() < 1e-13);
    }

    #[test]
    fn splitting_the_range() {
        // (0,2] = (0,1] ∪ (1,2]; the difference also carries the cross pairs
        let x = 200u64;
        let k = 2;
        let whole = diagonal_sum(k, x, Interval::from_ints(0, 2).unwrap(), false).unwrap().value;
        let low = diagonal_sum(k, x, Interval::unit(), false).unwrap().value;
        let high = diagonal_sum(k, x, Interval::from_ints(1, 2).unwrap(), false).unwrap().value;
        let d = DivisorTable::build(k, 2 * x).unwrap();
        let mut cross = 0u64;
        for n in 1..=x {
            for m in x + 1..=2 * x {
                if is_perfect_square(n * m) {
                    cross += d.get(n) * d.get(m);
                }
            }
        }
        assert!(cross > 0);
        assert_eq!(whole - low, high + q(2 * cross as i64, 1));
    }

    #[test]
    fn interval_parsing_and_bounds() {
        let iv = Interval::parse("1/2, 1.5").unwrap();
        assert_eq!(iv.a, Ratio::new(1, 2));
        assert_eq!(iv.b, Ratio::new(3, 2));
        assert_eq!(iv.bounds(7), (3, 10));
        assert!(Interval::parse("2,1").is_err());
        assert!(Interval::parse("x").is_err());
    }

    #[test]
    fn interval_factors() {
        assert_eq!(interval_factor(&Interval::unit()), 1.0);
        let f = interval_factor(&Interval::from_ints(1, 2).unwrap());
        assert!((f - (2f64.sqrt() - 1.0).powi(2)).abs() < 1e-15);
        let f = interval_factor(&Interval::parse("1/2,3/2").unwrap());
        assert!((f - (3f64.sqrt() - 1.0).powi(2) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn volume_coefficient() {
        for k in 1..=3 {
            let v = volume_asymptotic(k).unwrap();
            assert_eq!(v.leading_coefficient, gamma_leading_coefficient(k).unwrap() * BigInt::from(2));
            assert_eq!(v.degree, 2 * k * k + k - 2);
        }
        assert_eq!(volume_asymptotic(1).unwrap().leading_coefficient, q(1, 1));
    }

    #[test]
    fn prediction_k_one() {
        let a = crate::euler::twelve_over_pi_squared().to_f64();
        let e = std::f64::consts::E;
        let p = predicted_diagonal_with(1, e * e, a, &Interval::unit()).unwrap();
        assert!((p - a * e * e).abs() < 1e-12);
        assert!(predicted_diagonal_with(1, 2.0, a, &Interval::unit()).is_err());
    }

    #[test]
    fn lemma_examples() {
        let e = std::f64::consts::E;
        assert!((lemma_i(0, 1, e).unwrap() - 1.0).abs() < 1e-15);
        assert!((lemma_i(1, 1, e * e).unwrap() - 2.0).abs() < 1e-14);
        assert!((lemma_i(2, 2, e).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((lemma_j(1, 7.5).unwrap() - 6.5).abs() < 1e-14);
        assert!((lemma_j(2, e).unwrap() - 1.0).abs() < 1e-14);
        assert!(lemma_i(1, 0, 3.0).is_err());
        assert!(lemma_j(1, 0.5).is_err());
    }

    #[test]
    fn lemma_quadrature() {
        for n in 1..=3 {
            for y in [1.5, std::f64::consts::E, 10.0, 1000.0] {
                let j = lemma_j(n, y).unwrap();
                assert!(((lemma_j_numeric(n, y, 24) - j) / j).abs() < 1e-8, "J n={n} Y={y}");
                for m in 0..=3 {
                    let i = lemma_i(m, n, y).unwrap();
                    assert!(((lemma_i_numeric(m, n, y, 8) - i) / i).abs() < 1e-10);
                }
            }
        }
    }
}
