use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::special::{bessel_k, fit_line, gamma};

/// `G(r) = int_{R^n} e^{i<x, xi>} <xi>^s dxi` at `|x| = r > 0`, for `s < 0`:
/// `(2 pi)^{n/2} 2^{1-a} / Gamma(a) r^{a - n/2} K_{n/2 - a}(r)` with `a = -s/2`.
pub fn bessel_potential(s: f64, n: usize, r: f64) -> f64 {
    let (c, nu) = potential_constants(s, n);
    c * r.powf(-nu) * bessel_k(nu, r)
}

/// `r G'(r) = -C r^{1 - nu} K_{nu + 1}(r)`; the smooth part of `G` drops out
/// of the derivative, so its log-slope near 0 is the singular exponent.
pub fn bessel_potential_log_derivative(s: f64, n: usize, r: f64) -> f64 {
    let (c, nu) = potential_constants(s, n);
    -c * r.powf(1.0 - nu) * bessel_k(nu + 1.0, r)
}

fn potential_constants(s: f64, n: usize) -> (f64, f64) {
    assert!(s < 0.0, "bessel_potential needs s < 0");
    let a = -s / 2.0;
    let nf = n as f64;
    ((2.0 * PI).powf(nf / 2.0) * 2f64.powf(1.0 - a) / gamma(a), nf / 2.0 - a)
}

#[derive(Debug, Clone, Serialize)]
pub struct Ce2Report {
    pub m: f64,
    pub mu: f64,
    pub n: usize,
    pub b: f64,
    pub p: f64,
    /// `mu - m - n`.
    pub claim_slope: f64,
    /// Fitted slope of `log |x d/dx T_m f_mu|` against `log |x|`.
    pub slope: f64,
    /// Fitted slope of `log |T_m f_mu|` itself, biased by the smooth part.
    pub raw_slope: f64,
    pub window: (f64, f64),
    /// `(|x|, T_m f_mu(x))` at the grid points used in the fit.
    pub samples: Vec<(f64, f64)>,
    /// `||f_mu||_{L^p_w} < inf` for `w = |x|^{-b} 1_{|x| < 2}`.
    pub f_mu_finite: bool,
    pub tf_finite: bool,
}

/// Singularity profile of `T_m f_mu`, whose transform is `(2 pi)^n <xi>^{m - mu}`,
/// so that `T_m f_mu(x) = bessel_potential(m - mu, n, |x|)`.
pub fn ce2_profile(m: f64, mu: f64, b: f64, p: f64, grid: &Grid) -> Result<Ce2Report> {
    let n = grid.dim();
    let nf = n as f64;
    if mu >= m + nf {
        return Err(Error::Precondition(format!("mu = {mu} >= m + n = {}: the singularity claim needs mu < m + n", m + nf)));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Config(format!("ce2 exponent p = {p} must lie in (1, inf)")));
    }
    let s = m - mu;
    let window = (2f64.powi(-6), 2f64.powi(-2));
    let radii: Vec<f64> = (0..grid.points_per_axis())
        .map(|k| grid.axis_coord(k))
        .filter(|&x| x >= window.0 && x <= window.1)
        .collect();
    if radii.len() < 3 {
        return Err(Error::Precondition(format!(
            "only {} grid points fall in the fit window [{}, {}]",
            radii.len(),
            window.0,
            window.1
        )));
    }
    let logr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let values: Vec<f64> = radii.iter().map(|&r| bessel_potential(s, n, r)).collect();
    let raw: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let sing: Vec<f64> = radii.iter().map(|&r| bessel_potential_log_derivative(s, n, r).abs().ln()).collect();
    let integrable_weight = b < nf;
    Ok(Ce2Report {
        m,
        mu,
        n,
        b,
        p,
        claim_slope: mu - m - nf,
        slope: fit_line(&logr, &sing).0,
        raw_slope: fit_line(&logr, &raw).0,
        window,
        samples: radii.into_iter().zip(values).collect(),
        f_mu_finite: integrable_weight && mu > (nf + 1.0) / 2.0 - 1.0 / p,
        tf_finite: integrable_weight && (mu - m - nf >= 0.0 || (mu - m - nf) * p - b > -nf),
    })
}
