//! Brute-force variances of twisted divisor sums over fundamental
//! discriminants (`T`) and primes (`S`), and ratio tables against the
//! conjectured main terms.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::discriminant::enumerate_fundamental_discriminants;
use crate::arith::divisor::DivisorTable;
use crate::arith::kronecker::kronecker;
use crate::arith::primes::{PrimeStream, SpfTable};
use crate::error::{Error, Result};
use crate::gaussian::{variance_diagonal_of, IdealSet};
use crate::quad::neumaier_sum;
use crate::rmt::{gamma_value_f64, moment_degree};

/// Which family of moduli the variance runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Setting {
    /// Fundamental discriminants `r ∈ (y, 2y]`.
    T,
    /// Primes `p ∈ (y, 2y]` with `log p` weights.
    S,
    /// Angular windows of Gaussian ideals.
    N,
}

impl Setting {
    pub fn as_str(self) -> &'static str {
        match self {
            Setting::T => "T",
            Setting::S => "S",
            Setting::N => "N",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T" | "t" => Ok(Setting::T),
            "S" | "s" => Ok(Setting::S),
            "N" | "n" => Ok(Setting::N),
            other => Err(Error::Validation(format!("unknown setting {other:?} (expected T, S or N)"))),
        }
    }
}

/// `Σ_{n<=x, (n,m)=1} d_k(n) χ(n)` for one modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CharacterSumProfile {
    pub x: u64,
    pub k: u32,
    pub modulus: u64,
    pub sum_value: i128,
}

/// Shared state for evaluating many character sums of length `x`.
struct SumKernel {
    x: usize,
    /// `coeffs[n]` for `1 <= n <= x`; index 0 unused.
    coeffs: Vec<u64>,
    spf: SpfTable,
}

impl SumKernel {
    fn new(k: u32, x: u64) -> Result<Self> {
        Self::with_coefficients(DivisorTable::build(k, x)?.values().to_vec())
    }

    fn with_coefficients(coeffs: Vec<u64>) -> Result<Self> {
        let x = coeffs.len().saturating_sub(1);
        Ok(SumKernel { x, spf: SpfTable::new(x as u64)?, coeffs })
    }

    /// Completely multiplicative `χ` given on primes; `buf` holds `χ(n)`.
    fn sum(&self, buf: &mut [i8], chi_prime: impl Fn(u64) -> i32) -> i128 {
        let d = &self.coeffs;
        let mut acc: i128 = if self.x >= 1 { d[1] as i128 } else { 0 };
        if self.x >= 1 {
            buf[1] = 1;
        }
        for n in 2..=self.x {
            let p = self.spf.smallest_factor(n as u64) as usize;
            let c = if p == n { chi_prime(p as u64) as i8 } else { buf[p] * buf[n / p] };
            buf[n] = c;
            acc += c as i128 * d[n] as i128;
        }
        acc
    }
}

fn check_args(k: u32, x: u64, y: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::Validation("k must be positive".into()));
    }
    if x == 0 {
        return Err(Error::Validation("x must be at least 1".into()));
    }
    if y < 2 {
        return Err(Error::Validation(format!("y must be at least 2 (got {y})")));
    }
    Ok(())
}

/// Character sums `Σ_{n<=x} d_k(n) χ_r(n)` for every fundamental
/// discriminant `r ∈ (y, 2y]`, ascending in `r`.
pub fn character_sums_t(k: u32, x: u64, y: u64) -> Result<Vec<CharacterSumProfile>> {
    check_args(k, x, y)?;
    let moduli = enumerate_fundamental_discriminants(y as f64, 2.0 * y as f64)?;
    let kernel = SumKernel::new(k, x)?;
    Ok(moduli
        .par_iter()
        .map_init(
            || vec![0i8; x as usize + 1],
            |buf, r| {
                let r = r.get();
                let s = kernel.sum(buf, |p| kronecker(r as i64, p as i64));
                CharacterSumProfile { x, k, modulus: r, sum_value: s }
            },
        )
        .collect())
}

/// `E*_{y<r<=2y} T(r)²` over fundamental discriminants, without mean
/// subtraction.
pub fn empirical_variance_t(k: u32, x: u64, y: u64) -> Result<f64> {
    let sums = character_sums_t(k, x, y)?;
    if sums.is_empty() {
        return Err(Error::EmptyRange(format!("no fundamental discriminants in ({y}, {}]", 2 * y)));
    }
    let total: u128 = sums.iter().map(|s| s.sum_value.unsigned_abs().pow(2)).sum();
    Ok(total as f64 / sums.len() as f64)
}

/// Character sums `Σ_{n<=x, p∤n} d_k(n) (n/p)` for primes `p ∈ (y, 2y]`.
pub fn character_sums_s(k: u32, x: u64, y: u64) -> Result<Vec<CharacterSumProfile>> {
    check_args(k, x, y)?;
    prime_sums(k, SumKernel::new(k, x)?, y)
}

fn prime_sums(k: u32, kernel: SumKernel, y: u64) -> Result<Vec<CharacterSumProfile>> {
    let x = kernel.x as u64;
    let primes: Vec<u64> = PrimeStream::new(y, 2 * y).collect();
    Ok(primes
        .par_iter()
        .map_init(
            || vec![0i8; x as usize + 1],
            |buf, &p| {
                // the Legendre symbol vanishes on multiples of p
                let s = kernel.sum(buf, |q| kronecker(q as i64, p as i64));
                CharacterSumProfile { x, k, modulus: p, sum_value: s }
            },
        )
        .collect())
}

/// `(1/4y) Σ_{y<p<=2y} log p · S(p)²`.
pub fn empirical_variance_s(k: u32, x: u64, y: u64) -> Result<f64> {
    weighted_prime_variance(&character_sums_s(k, x, y)?, y)
}

/// The `S`-setting variance with `d_k(n)` replaced by `coeffs[n]`
/// (`coeffs[0]` is ignored).
pub fn empirical_variance_s_with_coefficients(coeffs: &[u64], y: u64) -> Result<f64> {
    if coeffs.len() < 2 {
        return Err(Error::Validation("need coefficients for n = 1..x".into()));
    }
    check_args(1, (coeffs.len() - 1) as u64, y)?;
    weighted_prime_variance(&prime_sums(0, SumKernel::with_coefficients(coeffs.to_vec())?, y)?, y)
}

fn weighted_prime_variance(sums: &[CharacterSumProfile], y: u64) -> Result<f64> {
    if sums.is_empty() {
        return Err(Error::EmptyRange(format!("no primes in ({y}, {}]", 2 * y)));
    }
    let terms = sums.iter().map(|s| (s.modulus as f64).ln() * (s.sum_value as f64).powi(2));
    Ok(neumaier_sum(terms) / (4.0 * y as f64))
}

/// `(1/y) Σ_{y<p<=2y} log p`, the normalisation that turns the unweighted
/// diagonal sum into the `S`-setting diagonal (`≈ 1`).
pub fn prime_log_density(y: u64) -> f64 {
    neumaier_sum(PrimeStream::new(y, 2 * y).map(|p| (p as f64).ln())) / y as f64
}

/// One row of a ratio table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceReport {
    pub setting: Setting,
    pub k: u32,
    pub x: u64,
    pub y_or_k: f64,
    pub empirical: f64,
    pub predicted: f64,
    pub ratio: f64,
}

impl VarianceReport {
    pub const CSV_HEADER: &'static str = "setting,k,x,y_or_K,empirical,predicted,ratio";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.setting, self.k, self.x, self.y_or_k, self.empirical, self.predicted, self.ratio
        )
    }
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 0.5) {
        return Err(Error::Validation(format!("c must lie in (0, 1/2] (got {c})")));
    }
    Ok(())
}

/// Conjectured main term for the `T` setting: `a x γ(c) (log y)^D`.
pub fn predicted_variance_t(k: u32, x: f64, y: f64, constant: f64) -> Result<f64> {
    let c = x.ln() / y.ln();
    check_c(c)?;
    Ok(constant * x * gamma_value_f64(k, c)? * y.ln().powi(moment_degree(k) as i32))
}

/// Conjectured main term for the `S` setting: `a (x/4) γ(c) (log y)^D`.
pub fn predicted_variance_s(k: u32, x: f64, y: f64, constant: f64) -> Result<f64> {
    Ok(predicted_variance_t(k, x, y, constant)? / 4.0)
}

/// `y = ⌊x^{1/c}⌋`.
pub fn y_for(x: u64, c: f64) -> u64 {
    (x as f64).powf(1.0 / c).floor() as u64
}

/// `K` with `c = log x / (2 log K)`.
pub fn k_window_for(x: u64, c: f64) -> f64 {
    (x as f64).powf(1.0 / (2.0 * c))
}

/// Empirical against conjectured variance for each `x`. `T` and `S` use
/// `y = x^{1/c}`; `N` uses `K = x^{1/(2c)}` and the diagonal (rational
/// quotient) form of the window variance. Constants are truncated at
/// `prime_cutoff`.
pub fn ratio_report(
    setting: Setting,
    k: u32,
    c: f64,
    x_list: &[u64],
    prime_cutoff: u64,
) -> Result<Vec<VarianceReport>> {
    check_c(c)?;
    if x_list.iter().any(|&x| x < 3) {
        return Err(Error::Validation("every x must be at least 3".into()));
    }
    let constant = match setting {
        Setting::T => crate::euler::a_t(k, prime_cutoff)?,
        Setting::S => crate::euler::a_s(k, prime_cutoff)?,
        Setting::N => crate::euler::a_n(k, prime_cutoff)?,
    }
    .value
    .to_f64();
    let mut out = Vec::with_capacity(x_list.len());
    for &x in x_list {
        let (y_or_k, empirical, predicted) = match setting {
            Setting::T => {
                let y = y_for(x, c);
                (y as f64, empirical_variance_t(k, x, y)?, predicted_variance_t(k, x as f64, y as f64, constant)?)
            }
            Setting::S => {
                let y = y_for(x, c);
                (y as f64, empirical_variance_s(k, x, y)?, predicted_variance_s(k, x as f64, y as f64, constant)?)
            }
            Setting::N => {
                let kw = k_window_for(x, c);
                let set = IdealSet::new(x, k)?;
                let emp = variance_diagonal_of(&set, kw)?;
                (kw, emp, crate::gaussian::predicted_variance_n_with(k, kw, x as f64, constant)?)
            }
        };
        let ratio = if predicted != 0.0 { empirical / predicted } else { f64::NAN };
        out.push(VarianceReport { setting, k, x, y_or_k, empirical, predicted, ratio });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_examples() {
        assert_eq!(empirical_variance_t(1, 4, 4).unwrap(), 0.0);
        assert_eq!(empirical_variance_t(1, 1, 4).unwrap(), 1.0);
        let sums = character_sums_t(1, 4, 4).unwrap();
        assert_eq!(sums.iter().map(|s| s.modulus).collect::<Vec<_>>(), vec![5, 8]);
    }

    #[test]
    fn s_examples() {
        let v = empirical_variance_s(1, 4, 4).unwrap();
        assert!((v - 7f64.ln() / 4.0).abs() < 1e-15);
        let v = empirical_variance_s(1, 1, 4).unwrap();
        assert!((v - (5f64.ln() + 7f64.ln()) / 16.0).abs() < 1e-15);
    }

    #[test]
    fn sums_match_direct_evaluation() {
        let d = DivisorTable::build(2, 300).unwrap();
        for s in character_sums_t(2, 300, 500).unwrap().iter().take(40) {
            let direct: i128 = (1..=300u64)
                .map(|n| kronecker(s.modulus as i64, n as i64) as i128 * d.get(n) as i128)
                .sum();
            assert_eq!(s.sum_value, direct);
            let bound: u64 = (1..=300).map(|n| d.get(n)).sum();
            assert!(s.sum_value.unsigned_abs() <= bound as u128);
        }
        // y < x: the condition p ∤ n is enforced by the symbol itself
        for s in character_sums_s(2, 300, 40).unwrap() {
            let direct: i128 = (1..=300u64)
                .filter(|n| n % s.modulus != 0)
                .map(|n| kronecker(n as i64, s.modulus as i64) as i128 * d.get(n) as i128)
                .sum();
            assert_eq!(s.sum_value, direct);
        }
    }

    #[test]
    fn empty_ranges_and_validation() {
        assert!(matches!(empirical_variance_t(1, 10, 1), Err(Error::Validation(_))));
        assert!(matches!(empirical_variance_t(0, 10, 10), Err(Error::Validation(_))));
        assert!(ratio_report(Setting::T, 1, 0.7, &[100], 1000).is_err());
    }

    #[test]
    fn ratio_smoke() {
        let rows = ratio_report(Setting::T, 1, 0.5, &[100, 1000], 10_000).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!(r.predicted > 0.0 && r.ratio.is_finite());
            assert_eq!(r.y_or_k, (r.x * r.x) as f64);
        }
        let rows = ratio_report(Setting::N, 1, 0.4, &[1000], 10_000).unwrap();
        assert!(rows[0].predicted > 0.0 && rows[0].ratio.is_finite());
        let rows = ratio_report(Setting::S, 1, 0.5, &[30], 10_000).unwrap();
        assert!(rows[0].predicted > 0.0);
    }

    #[test]
    fn setting_parse() {
        assert_eq!("S".parse::<Setting>().unwrap(), Setting::S);
        assert!("Q".parse::<Setting>().is_err());
        assert_eq!(VarianceReport::CSV_HEADER.split(',').count(), 7);
    }
}
