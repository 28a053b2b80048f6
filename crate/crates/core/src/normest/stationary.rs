use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cutoff::dot;
use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::special::fit_line;
use crate::symbol::{OrderParams, SymbolSpec};

/// `e^{-|xi|^2 / 2}`, x-independent.
pub fn gaussian_amplitude() -> SymbolSpec {
    SymbolSpec::custom(OrderParams::classical(0.0), false, true, "gaussian", |_, xi| {
        Complex64::new((-0.5 * dot(xi, xi)).exp(), 0.0)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryReport {
    pub lambdas: Vec<f64>,
    /// `max_x |I(lambda, x)|` for each lambda.
    pub maxima: Vec<f64>,
    pub slope: f64,
    /// `n mu - n/2`.
    pub expected: f64,
    pub support_growth: f64,
}

/// Decay of `I(lambda, x) = int e^{i lambda phi(x, xi)} a(x, xi / lambda^mu) dxi`.
///
/// The amplitude is taken to vanish outside `|xi_i| <= support * lambda^mu`.
/// The trapezoid step on each axis keeps `lambda |d phi / d xi_i|` below the
/// rule's Nyquist frequency on the whole box, so only truncation at the box
/// edge contributes error.
pub fn stationary_decay(
    phi: &PhaseSpec,
    a: &SymbolSpec,
    lambdas: &[f64],
    x_samples: &[Vec<f64>],
    support: f64,
    support_growth: f64,
) -> Result<StationaryReport> {
    if lambdas.len() < 5 {
        return Err(Error::Config(format!("stationary_decay needs at least 5 lambdas, got {}", lambdas.len())));
    }
    let q = lambdas[1] / lambdas[0];
    if !(q > 1.0) || lambdas.windows(2).any(|w| ((w[1] / w[0]) / q - 1.0).abs() > 1e-9) {
        return Err(Error::Config("lambdas must form an increasing geometric sequence".into()));
    }
    if x_samples.is_empty() {
        return Err(Error::Config("stationary_decay needs at least one x sample".into()));
    }
    let n = x_samples[0].len();
    check_hessian(phi, x_samples, support * lambdas[0].powf(support_growth))?;
    let maxima: Vec<f64> = lambdas
        .iter()
        .map(|&lambda| {
            x_samples
                .iter()
                .map(|x| oscillatory_integral(phi, a, lambda, x, support, support_growth).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let logl: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let logi: Vec<f64> = maxima.iter().map(|v| v.ln()).collect();
    let nf = n as f64;
    Ok(StationaryReport {
        lambdas: lambdas.to_vec(),
        maxima,
        slope: fit_line(&logl, &logi).0,
        expected: nf * support_growth - nf / 2.0,
        support_growth,
    })
}

fn check_hessian(phi: &PhaseSpec, x_samples: &[Vec<f64>], radius: f64) -> Result<()> {
    let n = x_samples[0].len();
    let per = 5usize;
    for x in x_samples {
        for t in 0..per.pow(n as u32) {
            let mut rem = t;
            let xi: Vec<f64> = (0..n)
                .map(|_| {
                    let k = rem % per;
                    rem /= per;
                    -radius + 2.0 * radius * (k as f64 + 0.5) / per as f64
                })
                .collect();
            let det = phi.hess_xixi(x, &xi).determinant();
            if det.abs() < 1e-8 {
                return Err(Error::Precondition(format!(
                    "degenerate Hessian: det d2phi/dxi2 = {det:e} at x = {x:?}, xi = {xi:?}"
                )));
            }
        }
    }
    Ok(())
}

/// Trapezoid rule for one `(lambda, x)`.
pub fn oscillatory_integral(
    phi: &PhaseSpec,
    a: &SymbolSpec,
    lambda: f64,
    x: &[f64],
    support: f64,
    support_growth: f64,
) -> Complex64 {
    let n = x.len();
    let dil = lambda.powf(support_growth);
    let radius = support * dil;
    // largest |d phi / d xi_i| on a coarse lattice of the box
    let per = 33usize;
    let mut g = vec![0.0f64; n];
    for t in 0..per.pow(n as u32) {
        let mut rem = t;
        let xi: Vec<f64> = (0..n)
            .map(|_| {
                let k = rem % per;
                rem /= per;
                -radius + 2.0 * radius * k as f64 / (per - 1) as f64
            })
            .collect();
        for (gi, d) in g.iter_mut().zip(phi.grad_xi(x, &xi)) {
            *gi = gi.max(d.abs());
        }
    }
    let counts: Vec<usize> = g
        .iter()
        .map(|&gi| {
            let h = (2.0 * PI / (1.25 * lambda * gi.max(1e-300))).min(support / 64.0 * dil);
            (2.0 * radius / h).ceil() as usize
        })
        .collect();
    let steps: Vec<f64> = counts.iter().map(|&k| 2.0 * radius / k as f64).collect();
    let cell: f64 = steps.iter().product();
    let outer = counts[n - 1] + 1;
    let total: Complex64 = (0..outer)
        .into_par_iter()
        .map(|last| {
            let mut xi = vec![0.0; n];
            xi[n - 1] = -radius + last as f64 * steps[n - 1];
            let w_last = if last == 0 || last == counts[n - 1] { 0.5 } else { 1.0 };
            let inner: usize = counts[..n - 1].iter().map(|k| k + 1).product();
            let mut eta = vec![0.0; n];
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..inner {
                let mut rem = t;
                let mut w = w_last;
                for d in 0..n - 1 {
                    let k = rem % (counts[d] + 1);
                    rem /= counts[d] + 1;
                    xi[d] = -radius + k as f64 * steps[d];
                    if k == 0 || k == counts[d] {
                        w *= 0.5;
                    }
                }
                for d in 0..n {
                    eta[d] = xi[d] / dil;
                }
                acc += Complex64::from_polar(w, lambda * phi.eval(x, &xi)) * a.eval(x, &eta);
            }
            acc
        })
        .sum();
    total * cell
}
