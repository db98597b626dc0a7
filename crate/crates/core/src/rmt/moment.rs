//! Exact symplectic moments and the leading coefficient of their growth.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Degree `2k² + k − 2` of the moment as a quasi-polynomial in `n`.
pub fn moment_degree(k: u32) -> u32 {
    2 * k * k + k - 2
}

/// Largest `n` accepted by [`symplectic_moment`] for half-dimension `big_n`:
/// `⌊(2N + k − 1)/2⌋`, i.e. the strict interior `n <= N + (1+k)/2 − 1`.
pub fn max_valid_n(k: u32, big_n: u64) -> u64 {
    (2 * big_n + k as u64 - 1) / 2
}

/// The double-binomial sum, without checking the range where it equals the
/// matrix integral.
pub fn moment_formula_unchecked(k: u32, n: u64) -> BigUint {
    assert!(k >= 1, "fold count must be positive");
    let tri = (k as u64) * (k as u64 + 1) / 2;
    let k2 = (k as u64) * (k as u64);
    let mut total = BigUint::zero();
    let mut ell = n % 2;
    while ell <= n {
        let a = binomial(BigUint::from((n - ell) / 2 + tri - 1), BigUint::from(tri - 1));
        let b = binomial(BigUint::from(ell + k2 - 1), BigUint::from(k2 - 1));
        total += &a * &a * b;
        ell += 2;
    }
    total
}

/// `∫_{Sp(2N)} |Σ_{j_1+…+j_k=n} Sc_{j_1}(U)⋯Sc_{j_k}(U)|² dU` for `n` in the
/// strict interior of the range where the closed form holds.
pub fn symplectic_moment(k: u32, n: u64, big_n: u64) -> Result<BigUint> {
    if k == 0 || big_n == 0 {
        return Err(Error::Validation(format!(
            "moment needs k >= 1 and N >= 1 (got k={k}, N={big_n})"
        )));
    }
    let bound = max_valid_n(k, big_n);
    if n > bound {
        return Err(Error::Range(format!(
            "n = {n} exceeds {bound}, the largest n with 2n <= 2N + k - 1 for k={k}, N={big_n}"
        )));
    }
    Ok(moment_formula_unchecked(k, n))
}

/// `C(k²+k−2, (k²+k)/2 − 1) / (2^{k²+k−1} (2k²+k−2)!)`.
pub fn gamma_leading_coefficient(k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::Validation("fold count must be positive".into()));
    }
    let k = k as u64;
    let num = binomial(BigUint::from(k * k + k - 2), BigUint::from((k * k + k) / 2 - 1));
    let mut fact = BigUint::one();
    for i in 2..=(2 * k * k + k - 2) {
        fact *= i;
    }
    let den = (BigUint::one() << (k * k + k - 1)) * fact;
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// `γ(c) = Λ_k · c^{2k²+k−2}` for `0 <= c <= 1/2`, exactly.
pub fn gamma_value(k: u32, c: &BigRational) -> Result<BigRational> {
    let half = BigRational::new(1.into(), 2.into());
    if *c < BigRational::zero() || *c > half {
        return Err(Error::Range(format!("c = {c} outside [0, 1/2]")));
    }
    let lead = gamma_leading_coefficient(k)?;
    Ok(lead * num_traits::pow(c.clone(), moment_degree(k) as usize))
}

/// Floating-point [`gamma_value`].
pub fn gamma_value_f64(k: u32, c: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&c) {
        return Err(Error::Range(format!("c = {c} outside [0, 1/2]")));
    }
    let lead = crate::rational_to_f64(&gamma_leading_coefficient(k)?);
    Ok(lead * c.powi(moment_degree(k) as i32))
}
