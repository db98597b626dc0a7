//! Ideals of `Z[i]` by norm and angle, the ideal divisor function, and the
//! angular-window variance together with its diagonal part.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_integer::{binomial, Integer};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::{pow_mod, SpfTable};
use crate::arith::squares::isqrt;
use crate::error::{Error, Result};
use crate::quad::neumaier_sum;
use crate::rmt::{gamma_value_f64, moment_degree};

/// Largest norm bound accepted by [`enumerate_ideals`].
pub const MAX_IDEAL_NORM: u64 = 50_000_000;

/// A nonzero ideal with its canonical generator `a + bi`, `a > 0`, `b >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianIdeal {
    pub gen_a: u64,
    pub gen_b: u64,
    pub norm: u64,
    /// `atan2(b, a)` in `[0, π/2)`.
    pub theta: f64,
}

impl GaussianIdeal {
    /// The ideal generated by `a + bi` (any associate, not both zero).
    pub fn from_generator(a: i64, b: i64) -> Self {
        assert!(a != 0 || b != 0, "zero generator");
        // rotate by powers of i until a > 0, b >= 0
        let (mut a, mut b) = (a, b);
        while !(a > 0 && b >= 0) {
            (a, b) = (-b, a);
        }
        let (a, b) = (a as u64, b as u64);
        GaussianIdeal {
            gen_a: a,
            gen_b: b,
            norm: a * a + b * b,
            theta: (b as f64).atan2(a as f64),
        }
    }

    /// Generator divided by the gcd of its components; equal for two ideals
    /// exactly when their quotient is rational.
    pub fn primitive_direction(&self) -> (u64, u64) {
        let g = self.gen_a.gcd(&self.gen_b);
        (self.gen_a / g, self.gen_b / g)
    }
}

/// Exact angular order: by slope `b/a`, then by norm.
fn angle_cmp(x: &GaussianIdeal, y: &GaussianIdeal) -> Ordering {
    let lhs = x.gen_b as u128 * y.gen_a as u128;
    let rhs = y.gen_b as u128 * x.gen_a as u128;
    lhs.cmp(&rhs).then(x.norm.cmp(&y.norm))
}

/// Every nonzero ideal of norm `<= x`, sorted by angle.
pub fn enumerate_ideals(x: u64) -> Result<Vec<GaussianIdeal>> {
    if x == 0 {
        return Err(Error::Validation("norm bound must be positive".into()));
    }
    if x > MAX_IDEAL_NORM {
        return Err(Error::Capacity(format!("norm bound {x} exceeds {MAX_IDEAL_NORM}")));
    }
    let mut out = Vec::new();
    for a in 1..=isqrt(x) {
        let b_max = isqrt(x - a * a);
        for b in 0..=b_max {
            out.push(GaussianIdeal::from_generator(a as i64, b as i64));
        }
    }
    out.par_sort_unstable_by(angle_cmp);
    Ok(out)
}

/// `u + vi` with `u² + v² = p` for a prime `p ≡ 1 (mod 4)`.
pub fn gaussian_prime_above(p: u64) -> (i64, i64) {
    assert!(p % 4 == 1, "{p} does not split");
    // t² ≡ −1 from any quadratic non-residue
    let t = (2..p)
        .map(|c| pow_mod(c, (p - 1) / 4, p))
        .find(|&t| (t as u128 * t as u128 % p as u128) as u64 == p - 1)
        .expect("non-residue exists");
    let (mut r0, mut r1) = (p, t);
    let bound = isqrt(p);
    while r1 > bound {
        (r0, r1) = (r1, r0 % r1);
    }
    let _ = r0;
    let u = r1;
    let v = isqrt(p - u * u);
    debug_assert_eq!(u * u + v * v, p);
    (u as i64, v as i64)
}

/// Exponents of `(π)` and `(π̄)` in `(a + bi)`, given the exponent `e` of
/// `p` in the norm.
fn split_exponents(mut a: i128, mut b: i128, pi: (i64, i64), p: u64, e: u32) -> (u32, u32) {
    let (u, v) = (pi.0 as i128, pi.1 as i128);
    let p = p as i128;
    let mut e1 = 0;
    while e1 < e {
        // (a + bi)(u − vi) = (au + bv) + (bu − av)i
        let re = a * u + b * v;
        let im = b * u - a * v;
        if re % p != 0 || im % p != 0 {
            break;
        }
        a = re / p;
        b = im / p;
        e1 += 1;
    }
    (e1, e - e1)
}

fn stars_and_bars(e: u32, l: u32) -> u64 {
    binomial(e as u64 + l as u64 - 1, l as u64 - 1)
}

/// Divisor-function evaluator with cached Gaussian primes.
#[derive(Debug, Default)]
pub struct IdealDivisor {
    primes_above: HashMap<u64, (i64, i64)>,
}

impl IdealDivisor {
    pub fn new() -> Self {
        Self::default()
    }

    /// `d_ℓ((a + bi))` given the factorization of the norm.
    pub fn eval_factored(&mut self, a: i64, b: i64, l: u32, norm_factors: &[(u64, u32)]) -> u64 {
        let mut out = 1u64;
        for &(p, e) in norm_factors {
            out *= match p % 4 {
                2 => stars_and_bars(e, l),
                3 => stars_and_bars(e / 2, l),
                _ => {
                    let pi = *self.primes_above.entry(p).or_insert_with(|| gaussian_prime_above(p));
                    let (e1, e2) = split_exponents(a as i128, b as i128, pi, p, e);
                    stars_and_bars(e1, l) * stars_and_bars(e2, l)
                }
            };
        }
        out
    }

    /// `d_ℓ((a + bi))`, factoring the norm by trial division.
    pub fn eval(&mut self, a: i64, b: i64, l: u32) -> u64 {
        let norm = (a * a + b * b) as u64;
        let factors = trial_factor(norm);
        self.eval_factored(a, b, l, &factors)
    }
}

fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Number of ordered `ℓ`-tuples of ideals with product `ideal`.
pub fn ideal_divisor(ideal: &GaussianIdeal, l: u32) -> Result<u64> {
    if l == 0 {
        return Err(Error::Validation("fold count must be positive".into()));
    }
    Ok(IdealDivisor::new().eval(ideal.gen_a as i64, ideal.gen_b as i64, l))
}

/// Ideals sharing one primitive direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionGroup {
    pub direction: (u64, u64),
    pub theta: f64,
    /// `Σ d_ℓ` over the group.
    pub weight: u64,
}

/// All ideals of norm `<= x` with their `d_ℓ` values and direction groups.
#[derive(Debug, Clone)]
pub struct IdealSet {
    pub x: u64,
    pub l: u32,
    pub ideals: Vec<GaussianIdeal>,
    pub divisors: Vec<u64>,
    /// Sorted by angle.
    pub groups: Vec<DirectionGroup>,
}

impl IdealSet {
    pub fn new(x: u64, l: u32) -> Result<Self> {
        if l == 0 {
            return Err(Error::Validation("fold count must be positive".into()));
        }
        let ideals = enumerate_ideals(x)?;
        let spf = SpfTable::new(x)?;
        let divisors: Vec<u64> = ideals
            .par_chunks(4096)
            .flat_map_iter(|chunk| {
                let mut eval = IdealDivisor::new();
                chunk
                    .iter()
                    .map(|g| {
                        let f = spf.factorize(g.norm);
                        eval.eval_factored(g.gen_a as i64, g.gen_b as i64, l, &f)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut groups: Vec<DirectionGroup> = Vec::new();
        for (ideal, &d) in ideals.iter().zip(&divisors) {
            let dir = ideal.primitive_direction();
            match groups.last_mut() {
                Some(g) if g.direction == dir => g.weight += d,
                _ => groups.push(DirectionGroup {
                    direction: dir,
                    theta: (dir.1 as f64).atan2(dir.0 as f64),
                    weight: d,
                }),
            }
        }
        Ok(IdealSet { x, l, ideals, divisors, groups })
    }

    pub fn total_weight(&self) -> u64 {
        self.divisors.iter().sum()
    }

    /// Smallest positive circular distance between distinct directions
    /// (`π/2` when there is only one).
    pub fn min_angle_gap(&self) -> f64 {
        let n = self.groups.len();
        if n < 2 {
            return FRAC_PI_2;
        }
        let mut gap = FRAC_PI_2 - (self.groups[n - 1].theta - self.groups[0].theta);
        for w in self.groups.windows(2) {
            gap = gap.min(w[1].theta - w[0].theta);
        }
        gap
    }

    /// `Σ d_ℓ(𝔞)` over ideals within `π/(4K)` of `theta` on `R/(π/2)`.
    pub fn nsum(&self, theta: f64, k_window: f64) -> u64 {
        let half = PI / (4.0 * k_window);
        if 2.0 * half >= FRAC_PI_2 {
            return self.total_weight();
        }
        self.groups
            .iter()
            .filter(|g| circular_distance(g.theta, theta) <= half)
            .map(|g| g.weight)
            .sum()
    }
}

/// Distance on the circle `R/(π/2)`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(FRAC_PI_2);
    d.min(FRAC_PI_2 - d)
}

fn check_window(k_window: f64) -> Result<()> {
    if !(k_window > 0.0 && k_window.is_finite()) {
        return Err(Error::Validation(format!("K must be positive (got {k_window})")));
    }
    Ok(())
}

/// `(2/π) ∫_0^{π/2} (N(θ) − ⟨N⟩)² dθ` in closed form from pairwise arc
/// overlaps.
pub fn variance_exact_of(set: &IdealSet, k_window: f64) -> Result<f64> {
    check_window(k_window)?;
    let width = PI / (2.0 * k_window);
    if width >= FRAC_PI_2 {
        // every window is the whole circle, so N is constant
        return Ok(0.0);
    }
    let groups = &set.groups;
    let n = groups.len();
    // ordered pairs (g, h ≠ g) with forward distance below the window width
    let cross: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Vec::new();
            for step in 1..n {
                let j = (i + step) % n;
                let mut fwd = groups[j].theta - groups[i].theta;
                if j <= i {
                    fwd += FRAC_PI_2;
                }
                if fwd >= width {
                    break;
                }
                acc.push(groups[i].weight as f64 * groups[j].weight as f64 * (width - fwd));
            }
            neumaier_sum(acc)
        })
        .collect();
    let diag = neumaier_sum(groups.iter().map(|g| (g.weight as f64).powi(2) * width));
    let second = (2.0 / PI) * (diag + 2.0 * neumaier_sum(cross));
    let mean = set.total_weight() as f64 / k_window;
    Ok(second - mean * mean)
}

/// `(1/K) Σ_{𝔞/𝔟 ∈ Q} d_ℓ(𝔞)d_ℓ(𝔟) − (1/K²)(Σ d_ℓ(𝔞))²`.
pub fn variance_diagonal_of(set: &IdealSet, k_window: f64) -> Result<f64> {
    check_window(k_window)?;
    let diag = neumaier_sum(set.groups.iter().map(|g| (g.weight as f64).powi(2)));
    let total = set.total_weight() as f64;
    Ok(diag / k_window - total * total / (k_window * k_window))
}

pub fn variance_exact(l: u32, k_window: f64, x: u64) -> Result<f64> {
    variance_exact_of(&IdealSet::new(x, l)?, k_window)
}

pub fn variance_diagonal(l: u32, k_window: f64, x: u64) -> Result<f64> {
    variance_diagonal_of(&IdealSet::new(x, l)?, k_window)
}

/// Riemann sum of `(2/π) ∫ N(θ)² dθ − ⟨N⟩²` on a partition of `[0, π/2)`
/// into `nodes` cells, tagged at midpoints. With `align` the partition
/// contains every window edge, so the step function `N` is constant on each
/// cell; otherwise the cells are uniform. Returns the value and a bound on
/// the quadrature error of the uniform rule.
pub fn variance_riemann(set: &IdealSet, k_window: f64, nodes: usize, align: bool) -> Result<(f64, f64)> {
    check_window(k_window)?;
    let half = PI / (4.0 * k_window);
    if 2.0 * half >= FRAC_PI_2 {
        return Ok((0.0, 0.0));
    }
    let mut cuts: Vec<f64> = Vec::new();
    if align {
        for g in &set.groups {
            cuts.push((g.theta - half).rem_euclid(FRAC_PI_2));
            cuts.push((g.theta + half).rem_euclid(FRAC_PI_2));
        }
    }
    let uniform = nodes.saturating_sub(cuts.len()).max(1);
    cuts.extend((0..uniform).map(|i| FRAC_PI_2 * i as f64 / uniform as f64));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(FRAC_PI_2);
    let mut second = Vec::with_capacity(cuts.len());
    let mut first = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let v = set.nsum(0.5 * (w[0] + w[1]), k_window) as f64;
        second.push(v * v * len);
        first.push(v * len);
    }
    let scale = 2.0 / PI;
    let mean = scale * neumaier_sum(first);
    let value = scale * neumaier_sum(second) - mean * mean;
    // uniform rule: each of the 2G edges spoils one cell of width h by at
    // most the largest jump of N², and perturbs the mean likewise
    let w = set.total_weight() as f64;
    let h = FRAC_PI_2 / uniform as f64;
    let edges = 2.0 * set.groups.len() as f64;
    let bound = scale * edges * h * w * w + 2.0 * w * scale * edges * h * w;
    Ok((value, if align { 0.0 } else { bound }))
}

/// `c = log x / (2 log K)`.
pub fn c_parameter(x: f64, k_window: f64) -> f64 {
    x.ln() / (2.0 * k_window.ln())
}

/// `a · (x/K) · γ_ℓ(c) · (2 log K)^{2ℓ²+ℓ−2}` for a given constant `a`.
pub fn predicted_variance_n_with(l: u32, k_window: f64, x: f64, constant: f64) -> Result<f64> {
    if !(k_window > 1.0) || !(x > 1.0) {
        return Err(Error::Validation(format!("prediction needs K > 1 and x > 1 (got K={k_window}, x={x})")));
    }
    let c = c_parameter(x, k_window);
    if c > 0.5 {
        return Err(Error::Range(format!("c = {c} exceeds 1/2")));
    }
    let gamma = gamma_value_f64(l, c)?;
    Ok(constant * (x / k_window) * gamma * (2.0 * k_window.ln()).powi(moment_degree(l) as i32))
}

/// Predicted variance with `a_N(ℓ)` truncated at `prime_cutoff`.
pub fn predicted_variance_n(l: u32, k_window: f64, x: f64, prime_cutoff: u64) -> Result<f64> {
    let a = crate::euler::a_n(l, prime_cutoff)?;
    predicted_variance_n_with(l, k_window, x, a.value.to_f64())
}
