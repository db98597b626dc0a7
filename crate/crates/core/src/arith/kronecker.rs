//! Kronecker symbol on machine integers.

/// Kronecker symbol `(a|n)`.
///
/// Fully multiplicative in `n`; zero exactly when `gcd(a, n) > 1`.
/// Panics if `a = n = 0`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    assert!(a != 0 || n != 0, "kronecker(0, 0) is undefined");
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    // sign of n
    let mut m = n.unsigned_abs();
    if n < 0 && a < 0 {
        result = -result;
    }
    // two-part of n
    let tz = m.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        m >>= tz;
        // (a|2) = (2|a) for odd a: -1 iff a ≡ ±3 (mod 8)
        let r8 = a.rem_euclid(8);
        if tz % 2 == 1 && (r8 == 3 || r8 == 5) {
            result = -result;
        }
    }
    if m == 1 {
        return result;
    }
    // now m odd > 1: Jacobi symbol (a mod m | m)
    let mut x = a.rem_euclid(m as i64) as u64;
    while x != 0 {
        let t = x.trailing_zeros();
        x >>= t;
        let m8 = m % 8;
        if t % 2 == 1 && (m8 == 3 || m8 == 5) {
            result = -result;
        }
        if x % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut x, &mut m);
        x %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}
