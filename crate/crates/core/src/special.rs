//! Special functions and small fitting helpers.

/// Modified Bessel function `K_nu(x)` for `x > 0`, by the trapezoid rule on
/// `int_0^inf exp(-x cosh t) cosh(nu t) dt`.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k needs x > 0");
    let nu = nu.abs();
    let expo = |t: f64| -x * t.cosh() + nu * t;
    let peak = expo((nu / x).asinh());
    // integrand is below e^{-60} of its peak past t_max
    let mut t_max: f64 = (nu / x).asinh() + 1.0;
    while expo(t_max) > peak - 60.0 {
        t_max += 0.25;
    }
    let h = (t_max / 4000.0).min(0.01);
    let steps = (t_max / h).ceil() as usize;
    let h = t_max / steps as f64;
    let f = |t: f64| expo(t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
    let mut s = 0.5 * f(0.0);
    for i in 1..steps {
        s += f(i as f64 * h);
    }
    s * h
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need two points to fit a line");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly).0
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on `P_m`).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..(m + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..m {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = m as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite 8-point Gauss-Legendre on `[a, b]` with `panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (x, w) = gauss_legendre(8);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
    }
    0.5 * h * s
}

/// Like [`integrate`], with panels graded geometrically toward `a` where the
/// integrand may be singular.
pub fn integrate_graded<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let len = b - a;
    let mut s = integrate(&f, a + 0.5 * len, b, 4);
    let mut hi = a + 0.5 * len;
    for _ in 0..100 {
        let lo = a + 0.5 * (hi - a);
        s += integrate(&f, lo, hi, 1);
        hi = lo;
    }
    s
}
