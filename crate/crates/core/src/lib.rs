//! Exact and numerical evaluation of the symplectic variance predictions for
//! divisor-function sums: matrix-integral moments, Euler-product constants,
//! diagonal sums, Gaussian-ideal variances and brute-force empirics.

pub mod arith;
pub mod cli;
pub mod diagonal;
pub mod empirics;
pub mod error;
pub mod real;
pub mod euler;
pub mod gaussian;
pub mod quad;
pub mod rmt;

pub use error::{Error, ErrorCategory, Result};
pub use real::Real;

use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Nearest `f64` to an exact rational (infinite on overflow).
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn serde_rationals<S: serde::Serializer>(
    v: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for q in v {
        seq.serialize_element(&q.to_string())?;
    }
    seq.end()
}

pub(crate) fn serde_rational<S: serde::Serializer>(
    q: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}
