//! Period-2 quasi-polynomial fit of the symplectic moment.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rmt::moment::{max_valid_n, moment_degree, symplectic_moment};

/// One polynomial in `n` per parity class of `n`; coefficients indexed by
/// power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiPolynomial {
    pub degree: u32,
    #[serde(serialize_with = "crate::serde_rationals")]
    pub even_coeffs: Vec<BigRational>,
    #[serde(serialize_with = "crate::serde_rationals")]
    pub odd_coeffs: Vec<BigRational>,
}

impl QuasiPolynomial {
    pub fn coeffs_for(&self, n: u64) -> &[BigRational] {
        if n % 2 == 0 {
            &self.even_coeffs
        } else {
            &self.odd_coeffs
        }
    }

    pub fn eval(&self, n: u64) -> BigRational {
        let x = BigRational::from_integer(BigInt::from(n));
        self.coeffs_for(n)
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &x + c)
    }

    /// Coefficient of `n^degree` in the given parity class.
    pub fn top(&self, parity: u64) -> &BigRational {
        self.coeffs_for(parity).last().expect("nonempty coefficient list")
    }
}

/// Monomial coefficients of the interpolating polynomial through `(xs, ys)`.
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Vec<BigRational> {
    assert_eq!(xs.len(), ys.len());
    let m = xs.len();
    // Newton divided differences
    let mut dd: Vec<BigRational> = ys.to_vec();
    for level in 1..m {
        for i in (level..m).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Horner expansion of the Newton form
    let mut coeffs = vec![BigRational::zero(); m];
    for i in (0..m).rev() {
        // coeffs <- coeffs·(x − xs[i]) + dd[i]
        let mut next = vec![BigRational::zero(); m];
        for j in 0..m {
            if coeffs[j].is_zero() {
                continue;
            }
            if j + 1 < m {
                next[j + 1] += &coeffs[j];
            }
            next[j] -= &coeffs[j] * &xs[i];
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    coeffs
}

/// Fits the moment for fold count `k` through every valid `n` for
/// half-dimension `big_n`, separately per parity.
pub fn quasipoly_fit(k: u32, big_n: u64) -> Result<QuasiPolynomial> {
    if k == 0 || big_n == 0 {
        return Err(Error::Validation("fit needs k >= 1 and N >= 1".into()));
    }
    let degree = moment_degree(k);
    let n_max = max_valid_n(k, big_n);
    let needed = 2 * (degree as u64 + 1);
    if n_max + 1 < needed {
        return Err(Error::Range(format!(
            "N = {big_n} gives {} sample points for k = {k}; at least {needed} are needed",
            n_max + 1
        )));
    }
    let values: Vec<BigRational> = (0..=n_max)
        .map(|n| symplectic_moment(k, n, big_n).map(|v| BigRational::from_integer(v.into())))
        .collect::<Result<_>>()?;
    let fit_parity = |parity: u64| {
        let ns: Vec<u64> = (0..=n_max)
            .filter(|n| n % 2 == parity)
            .take(degree as usize + 1)
            .collect();
        let xs: Vec<BigRational> = ns
            .iter()
            .map(|&n| BigRational::from_integer(n.into()))
            .collect();
        let ys: Vec<BigRational> = ns.iter().map(|&n| values[n as usize].clone()).collect();
        interpolate(&xs, &ys)
    };
    let fit = QuasiPolynomial {
        degree,
        even_coeffs: fit_parity(0),
        odd_coeffs: fit_parity(1),
    };
    for n in 0..=n_max {
        if fit.eval(n) != values[n as usize] {
            return Err(Error::Accuracy(format!(
                "quasi-polynomial fit misses the moment at n = {n}"
            )));
        }
    }
    Ok(fit)
}
