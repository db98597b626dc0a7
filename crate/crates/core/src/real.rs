//! Binary fixed-point reals with `FRAC_BITS` fractional bits (about 96 decimal
//! digits).
//!
//! Every quantity this crate evaluates in high precision is of moderate size
//! (Euler factors near 1, constants of order 1), so a fixed scale is enough
//! and keeps every operation exactly reproducible: rounding is
//! round-half-up on the binary scale, independent of evaluation order within a
//! single operation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const FRAC_BITS: u64 = 320;
const GUARD_BITS: u64 = 32;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Real {
    raw: BigInt,
}

fn shift_round(x: BigInt, bits: u64) -> BigInt {
    if bits == 0 {
        return x;
    }
    (x + (BigInt::one() << (bits - 1))) >> bits
}

fn div_round(num: BigInt, den: BigInt) -> BigInt {
    let (num, den) = if den.is_negative() {
        (-num, -den)
    } else {
        (num, den)
    };
    (num * 2u32 + &den).div_floor(&(den * 2u32))
}

impl Real {
    pub fn zero() -> Self {
        Real { raw: BigInt::zero() }
    }

    pub fn one() -> Self {
        Real::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Real {
            raw: BigInt::from(v) << FRAC_BITS,
        }
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Real {
            raw: v.clone() << FRAC_BITS,
        }
    }

    /// Nearest fixed-point value to `num / den`.
    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Real {
            raw: div_round(num.into() << FRAC_BITS, den),
        }
    }

    pub fn from_f64(v: f64) -> Self {
        let (mantissa, exponent, sign) = num_traits::float::FloatCore::integer_decode(v);
        let mut raw = BigInt::from(mantissa);
        let shift = exponent as i64 + FRAC_BITS as i64;
        raw = if shift >= 0 {
            raw << shift as u64
        } else {
            shift_round(raw, (-shift) as u64)
        };
        if sign < 0 {
            raw = -raw;
        }
        Real { raw }
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.raw.is_positive()
    }

    pub fn abs(&self) -> Real {
        Real {
            raw: self.raw.abs(),
        }
    }

    pub fn recip(&self) -> Real {
        Real::one() / self
    }

    pub fn powi(&self, exp: i64) -> Real {
        let mut base = if exp < 0 { self.recip() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Real::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Square root, rounded down on the fixed-point grid.
    pub fn sqrt(&self) -> Real {
        assert!(!self.raw.is_negative(), "sqrt of a negative value");
        let scaled: BigUint = (self.raw.magnitude().clone()) << FRAC_BITS;
        Real {
            raw: BigInt::from_biguint(Sign::Plus, scaled.sqrt()),
        }
    }

    /// π by Machin's formula, evaluated with guard bits.
    pub fn pi() -> Real {
        let bits = FRAC_BITS + GUARD_BITS;
        let pi = atan_inv(5, bits) * 16u32 - atan_inv(239, bits) * 4u32;
        Real {
            raw: shift_round(pi, GUARD_BITS),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let top = self.raw.bits();
        if top <= 1000 {
            self.raw.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(FRAC_BITS as i32))
        } else {
            let drop = top - 1000;
            (&self.raw >> drop).to_f64().unwrap_or(f64::NAN)
                * 2f64.powi(drop as i32 - FRAC_BITS as i32)
        }
    }

    /// Natural logarithm as an `f64`; accurate in relative terms near 1.
    pub fn ln_f64(&self) -> f64 {
        assert!(self.is_positive(), "log of a nonpositive value");
        let v = self.to_f64();
        if (0.5..2.0).contains(&v) {
            (self - &Real::one()).to_f64().ln_1p()
        } else {
            v.ln()
        }
    }

    /// Decimal expansion with `digits` digits after the point, rounded to
    /// nearest.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10u32), digits);
        let scaled = shift_round(&self.raw * scale, FRAC_BITS);
        let negative = scaled.is_negative();
        let s = scaled.magnitude().to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (int_part, frac_part) = s.split_at(s.len() - digits);
        let sign = if negative { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

/// atan(1/n) scaled by 2^bits.
fn atan_inv(n: u32, bits: u64) -> BigInt {
    let n2 = BigInt::from(n) * n;
    let mut power = (BigInt::one() << bits) / n;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        self.raw.cmp(&other.raw)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_decimal_string(30))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(50);
        f.write_str(&self.to_decimal_string(digits))
    }
}

impl Add<&Real> for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        Real {
            raw: &self.raw + &rhs.raw,
        }
    }
}

impl Sub<&Real> for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        Real {
            raw: &self.raw - &rhs.raw,
        }
    }
}

impl Mul<&Real> for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        Real {
            raw: shift_round(&self.raw * &rhs.raw, FRAC_BITS),
        }
    }
}

impl Div<&Real> for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        assert!(!rhs.is_zero(), "division by zero");
        Real {
            raw: div_round(&self.raw << FRAC_BITS, rhs.raw.clone()),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            raw: -&self.raw,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real { (&self).$m(&rhs) }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real { (&self).$m(rhs) }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl Mul<i64> for &Real {
    type Output = Real;
    fn mul(self, rhs: i64) -> Real {
        Real {
            raw: &self.raw * rhs,
        }
    }
}
