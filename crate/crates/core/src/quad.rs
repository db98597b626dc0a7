//! Small numerical helpers: Gauss–Legendre rules and compensated summation.

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Neumaier-compensated sum, evaluated in iteration order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `∫ f(u) du` over the simplex `{u_i >= 0, u_1 + … + u_n <= total}` by
/// nested Gauss–Legendre rules with `nodes` points per coordinate.
pub fn simplex_integral<F: Fn(&[f64]) -> f64>(n: usize, total: f64, nodes: usize, f: &F) -> f64 {
    let (xs, ws) = gauss_legendre(nodes);
    let mut point = vec![0.0; n];
    fn rec<F: Fn(&[f64]) -> f64>(
        depth: usize,
        remaining: f64,
        point: &mut Vec<f64>,
        xs: &[f64],
        ws: &[f64],
        f: &F,
    ) -> f64 {
        if depth == point.len() {
            return f(point);
        }
        let half = remaining / 2.0;
        let mut acc = 0.0;
        for (x, w) in xs.iter().zip(ws) {
            let u = half * (x + 1.0);
            point[depth] = u;
            acc += w * half * rec(depth + 1, remaining - u, point, xs, ws, f);
        }
        acc
    }
    rec(0, total, &mut point, &xs, &ws, f)
}
