//! Leading coefficient of the `k = 1` diagonal count over `F_q[t]`.

/// `⌈N/2⌉`, the coefficient of `q^N` claimed for the diagonal box at degree
/// `N`; to be compared with the continuous-volume coefficient `N`.
pub fn ff_box_count(n: u64) -> u64 {
    n.div_ceil(2)
}

/// Coefficient of `q^N` in the exact count of pairs of monic `f, g` of degree
/// `N` with `fg` a square.
///
/// Writing `f = s a²`, `g = s b²` with `s` squarefree of degree `d`, the count
/// is `Σ_d sf(d) q^{N−d}` where `sf(0) = 1`, `sf(1) = q`, `sf(d) = q^d − q^{d−1}`
/// for `d >= 2`. Every admissible `d` contributes exactly one to the top
/// coefficient.
pub fn ff_box_count_enumerated(n: u64) -> u64 {
    (0..=n).filter(|d| (n - d) % 2 == 0).count() as u64
}
