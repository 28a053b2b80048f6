//! Constant-coefficient wave equation `u_tt = Delta u` through its
//! half-wave representation, with Sobolev-loss and weighted estimates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::applicator::{apply_multiplier, FioOperator, LinearOperator};
use crate::cutoff::{japanese, norm};
use crate::error::{Error, Result};
use crate::field::{transform, Direction, SampledField, Side};
use crate::grid::Grid;
use crate::normest::{TestFamily, Verdict};
use crate::phase::PhaseSpec;
use crate::symbol::SymbolSpec;
use crate::weights::{weighted_norm, Weight};

/// Default bound on `|t|`; with `L >= 16` the wrapped-around mass stays small.
pub const T_MAX_DEFAULT: f64 = 4.0;

/// Initial value `f0`, initial velocity `f1`, and time `t`.
#[derive(Debug, Clone)]
pub struct CauchyData {
    pub f0: SampledField,
    pub f1: SampledField,
    pub t: f64,
}

impl CauchyData {
    pub fn new(f0: SampledField, f1: SampledField, t: f64, t_max: f64) -> Result<Self> {
        f0.check_compatible(&f1)?;
        if f0.side() != Side::Physical {
            return Err(Error::Usage("Cauchy data must be physical-side fields".into()));
        }
        if !(t.abs() <= t_max) {
            return Err(Error::Config(format!("|t| = {} exceeds t_max = {t_max}", t.abs())));
        }
        Ok(Self { f0, f1, t })
    }

    pub fn grid(&self) -> &Grid {
        self.f0.grid()
    }
}

/// `e^{i t |D|} u0`.
pub fn half_wave(u0: &SampledField, t: f64) -> Result<SampledField> {
    FioOperator::new(SymbolSpec::one(), PhaseSpec::wave(t), *u0.grid()).apply(u0)
}

/// `sin(t r) / r`, equal to `t` at `r = 0`.
fn sinc_t(t: f64, r: f64) -> f64 {
    if r == 0.0 {
        t
    } else {
        (t * r).sin() / r
    }
}

/// `u(t) = cos(t|D|) f0 + sin(t|D|)/|D| f1`, the first term as the mean of the
/// half-wave propagators for `+t` and `-t`.
pub fn cauchy_second_order(data: &CauchyData) -> Result<SampledField> {
    let n = data.grid().dim();
    if !(1..=2).contains(&n) {
        return Err(Error::Config(format!("cauchy_second_order supports n = 1, 2, got {n}")));
    }
    let t = data.t;
    let plus = half_wave(&data.f0, t)?;
    let minus = half_wave(&data.f0, -t)?;
    let cos_part = plus.add(&minus)?.scale(Complex64::new(0.5, 0.0));
    let sin_part = apply_multiplier(|xi| Complex64::new(sinc_t(t, norm(xi)), 0.0), &data.f1)?;
    cos_part.add(&sin_part)
}

/// `||u_t(t)||^2 + ||grad u(t)||^2`, evaluated on the frequency side.
pub fn energy(data: &CauchyData) -> Result<f64> {
    let g = *data.grid();
    let h0 = transform(&data.f0, Direction::Forward)?;
    let h1 = transform(&data.f1, Direction::Forward)?;
    let t = data.t;
    let mut sum = 0.0;
    for k in 0..g.len() {
        let r = norm(&g.freq(k));
        let (c, s) = ((t * r).cos(), (t * r).sin());
        let u = h0.values()[k] * c + h1.values()[k] * sinc_t(t, r);
        let ut = -h0.values()[k] * (r * s) + h1.values()[k] * c;
        sum += ut.norm_sqr() + r * r * u.norm_sqr();
    }
    Ok(sum * (g.dual_spacing() / (2.0 * PI)).powi(g.dim() as i32))
}

/// `|| <D>^sigma u ||_{L^p_w}`.
pub fn sobolev_norm(u: &SampledField, sigma: f64, p: f64, w: &Weight) -> Result<f64> {
    let filtered = apply_multiplier(|xi| Complex64::new(japanese(xi).powf(sigma), 0.0), u)?;
    weighted_norm(&filtered, p, w)
}

/// `(n - 1) |1/p - 1/2|`.
pub fn sobolev_loss(n: usize, p: f64) -> f64 {
    (n as f64 - 1.0) * (1.0 / p - 0.5).abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct SobolevRow {
    pub points_per_axis: usize,
    /// Sup of `||u(t)||_{H^{s - eps, p}} / sum_j ||f_j||_{H^{s + m_p - j, p}}`.
    pub shifted: f64,
    /// The same with `m_p` replaced by 0.
    pub unshifted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SobolevSweepReport {
    pub p: f64,
    pub s: f64,
    pub t: f64,
    pub m_p: f64,
    pub eps: f64,
    pub rows: Vec<SobolevRow>,
    pub shifted_verdict: Verdict,
    pub unshifted_verdict: Verdict,
}

/// Loss-of-derivatives ratios over the family, each member used once as `f0`
/// and once as `f1`, on each of `grids` in turn.
pub fn sobolev_loss_sweep(p: f64, s: f64, t: f64, fam: &TestFamily, grids: &[Grid]) -> Result<SobolevSweepReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Config(format!("sobolev_loss_sweep needs 1 < p < inf, got {p}")));
    }
    let Some(first) = grids.first() else {
        return Err(Error::Config("sobolev_loss_sweep needs at least one grid".into()));
    };
    let eps = 0.1;
    let m_p = sobolev_loss(first.dim(), p);
    let unit = Weight::unit();
    let mut rows = Vec::new();
    for grid in grids {
        let probes = fam.members(grid)?;
        let zero = SampledField::zeros(*grid, Side::Physical);
        let pairs: Vec<(f64, f64)> = probes
            .par_iter()
            .flat_map(|pr| [(pr.field.clone(), zero.clone()), (zero.clone(), pr.field.clone())])
            .map(|(f0, f1)| {
                let data = CauchyData::new(f0, f1, t, f64::INFINITY)?;
                let num = sobolev_norm(&cauchy_second_order(&data)?, s - eps, p, &unit)?;
                let den = |shift: f64| -> Result<f64> {
                    Ok(sobolev_norm(&data.f0, s + shift, p, &unit)? + sobolev_norm(&data.f1, s + shift - 1.0, p, &unit)?)
                };
                Ok((num / den(m_p)?, num / den(0.0)?))
            })
            .collect::<Result<_>>()?;
        let shifted = pairs.iter().map(|x| x.0).fold(0.0, f64::max);
        let unshifted = pairs.iter().map(|x| x.1).fold(0.0, f64::max);
        rows.push(SobolevRow { points_per_axis: grid.points_per_axis(), shifted, unshifted });
    }
    let shifted_verdict = Verdict::from_values(&rows.iter().map(|r| r.shifted).collect::<Vec<_>>());
    let unshifted_verdict = Verdict::from_values(&rows.iter().map(|r| r.unshifted).collect::<Vec<_>>());
    Ok(SobolevSweepReport { p, s, t, m_p, eps, rows, shifted_verdict, unshifted_verdict })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalEstimateReport {
    /// `||chi u(t)||_{H^{s,p}_w} / sum_j ||f_j||_{H^{s + (n+1)/2 - j, p}_w}`.
    pub ratio: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub loss: f64,
}

/// Weighted local estimate with loss `(n + 1)/2`; needs `t != 0`.
pub fn weighted_local_estimate<F>(data: &CauchyData, w: &Weight, p: f64, s: f64, chi: F) -> Result<LocalEstimateReport>
where
    F: Fn(&[f64]) -> f64,
{
    if data.t == 0.0 {
        return Err(Error::Precondition("t = 0: the rank n - 1 condition on the phase Hessian fails".into()));
    }
    let g = *data.grid();
    let loss = (g.dim() as f64 + 1.0) / 2.0;
    let u = cauchy_second_order(data)?;
    let cut: Vec<f64> = (0..g.len()).map(|k| chi(&g.point(k))).collect();
    let numerator = sobolev_norm(&u.multiply_by(&cut)?, s, p, w)?;
    let denominator = sobolev_norm(&data.f0, s + loss, p, w)? + sobolev_norm(&data.f1, s + loss - 1.0, p, w)?;
    if denominator == 0.0 {
        return Err(Error::Domain("Cauchy data have zero norm".into()));
    }
    Ok(LocalEstimateReport { ratio: numerator / denominator, numerator, denominator, loss })
}
