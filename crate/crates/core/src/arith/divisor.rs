//! Sieved k-fold divisor function.

use crate::error::{Error, Result};

/// Largest accepted table bound.
pub const MAX_TABLE_BOUND: u64 = 100_000_000;
/// Largest accepted fold count.
pub const MAX_FOLD: u32 = 64;

/// `values[n] = d_k(n)` for `1 <= n <= x_max`; `values[0]` is unused and 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTable {
    k: u32,
    x_max: u64,
    values: Vec<u64>,
}

impl DivisorTable {
    /// Builds the table by `k − 1` Dirichlet convolutions of the constant
    /// function 1 with itself.
    pub fn build(k: u32, x_max: u64) -> Result<Self> {
        if k == 0 || x_max == 0 {
            return Err(Error::Validation(format!(
                "divisor table needs k >= 1 and x_max >= 1 (got k={k}, x_max={x_max})"
            )));
        }
        if k > MAX_FOLD {
            return Err(Error::Capacity(format!("fold count {k} exceeds {MAX_FOLD}")));
        }
        if x_max > MAX_TABLE_BOUND {
            return Err(Error::Capacity(format!(
                "table bound {x_max} exceeds {MAX_TABLE_BOUND}"
            )));
        }
        let n = x_max as usize;
        let mut values = vec![1u64; n + 1];
        values[0] = 0;
        for _ in 1..k {
            let mut next = vec![0u64; n + 1];
            for d in 1..=n {
                let v = values[d];
                let mut m = d;
                while m <= n {
                    next[m] = next[m].checked_add(v).ok_or_else(|| {
                        Error::Capacity(format!("d_{k}({m}) overflows 64 bits"))
                    })?;
                    m += d;
                }
            }
            values = next;
        }
        Ok(DivisorTable { k, x_max, values })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn x_max(&self) -> u64 {
        self.x_max
    }

    #[inline]
    pub fn get(&self, n: u64) -> u64 {
        self.values[n as usize]
    }

    /// The full table including the unused slot 0.
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// `C(n, r)` in `u64`, panicking on overflow. Intended for small arguments.
pub fn binomial_u64(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}
