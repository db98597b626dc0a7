//! Independent quadrature oracle for moments over `Sp(2N)`.
//!
//! Integrates over the eigenangles `θ_1..θ_N ∈ [0, π]` against the Weyl
//! density
//!
//! ```text
//! 2^{N²} / (π^N N!) · Π_{j<l} (cos θ_j − cos θ_l)² · Π_j sin² θ_j
//! ```
//!
//! The integrand is the square of the `x^n` coefficient of
//! `Π_j (1 + 2 cos θ_j x + x²)^k`. Both are even trigonometric polynomials in
//! every angle, so the equispaced rule on the periodic extension is exact
//! once the grid outruns the degree; the grid is doubled until two successive
//! values agree.

use crate::error::{Error, Result};

/// Largest half-dimension supported by the oracle.
pub const MAX_ORACLE_N: u32 = 4;

fn log_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

struct Grid {
    cos: Vec<f64>,
    sin2: Vec<f64>,
}

impl Grid {
    fn new(m: usize) -> Self {
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let cos = (0..m).map(|i| (step * i as f64).cos()).collect();
        let sin2 = (0..m).map(|i| (step * i as f64).sin().powi(2)).collect();
        Grid { cos, sin2 }
    }
}

/// Sums `density · f` over the full grid, returning `(∫ density, ∫ density·f)`.
fn integrate(big_n: usize, m: usize, k: u32, n: usize) -> (f64, f64) {
    let grid = Grid::new(m);
    let norm = (big_n * big_n) as f64 * 2f64.ln()
        - big_n as f64 * std::f64::consts::PI.ln()
        - log_factorial(big_n as u32);
    // trapezoid weight on [0, 2π) per angle is 2π/m; half of it covers [0, π]
    let weight = (norm + big_n as f64 * (std::f64::consts::PI / m as f64).ln()).exp();
    let total = m.pow(big_n as u32);
    let mut idx = vec![0usize; big_n];
    let mut mass = 0.0;
    let mut acc = 0.0;
    let deg = 2 * big_n * k as usize;
    let mut poly = vec![0.0f64; deg + 1];
    for _ in 0..total {
        let mut dens = 1.0;
        for j in 0..big_n {
            dens *= grid.sin2[idx[j]];
            for l in (j + 1)..big_n {
                let d = grid.cos[idx[j]] - grid.cos[idx[l]];
                dens *= d * d;
            }
        }
        if dens != 0.0 {
            // Π_j (1 + 2cos θ_j x + x²)^k, truncated at degree n
            poly.iter_mut().for_each(|c| *c = 0.0);
            poly[0] = 1.0;
            let mut len = 1usize;
            for j in 0..big_n {
                let b = 2.0 * grid.cos[idx[j]];
                for _ in 0..k {
                    len = (len + 2).min(n + 1);
                    for i in (0..len).rev() {
                        let mut v = poly[i];
                        if i >= 1 {
                            v += b * poly[i - 1];
                        }
                        if i >= 2 {
                            v += poly[i - 2];
                        }
                        poly[i] = v;
                    }
                }
            }
            let coeff = poly[n];
            mass += dens;
            acc += dens * coeff * coeff;
        }
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    (mass * weight, acc * weight)
}

/// Numerical value of the `Sp(2N)` moment, accurate to about `1e-10`.
pub fn sp_weyl_oracle(k: u32, n: u64, big_n: u32) -> Result<f64> {
    if k == 0 || big_n == 0 || big_n > MAX_ORACLE_N {
        return Err(Error::Validation(format!(
            "oracle needs k >= 1 and 1 <= N <= {MAX_ORACLE_N} (got k={k}, N={big_n})"
        )));
    }
    if n > 2 * k as u64 * big_n as u64 {
        return Err(Error::Range(format!("n = {n} exceeds 2kN = {}", 2 * k * big_n)));
    }
    let big = big_n as usize;
    // trig degree per angle is at most 2N + 2k; start just below, double
    let mut m = 8usize;
    let mut previous: Option<f64> = None;
    while m.pow(big_n) <= 1 << 26 {
        let (mass, value) = integrate(big, m, k, n as usize);
        if (mass - 1.0).abs() > 1e-10 && m > 2 * (big + k as usize) + 2 {
            return Err(Error::Accuracy(format!(
                "Weyl density integrates to {mass} on a {m}-point grid"
            )));
        }
        if let Some(prev) = previous {
            if (value - prev).abs() <= 1e-10 * value.abs().max(1.0)
                && (mass - 1.0).abs() <= 1e-10
            {
                return Ok(value);
            }
        }
        previous = Some(value);
        m *= 2;
    }
    Err(Error::Accuracy(format!(
        "quadrature did not converge for k={k}, n={n}, N={big_n}"
    )))
}
