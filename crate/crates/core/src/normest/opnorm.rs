use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::family::TestFamily;
use crate::applicator::{FioOperator, LinearOperator};
use crate::error::{Error, Result};
use crate::field::{SampledField, Side};
use crate::grid::Grid;
use crate::phase::PhaseSpec;
use crate::special::fit_line;
use crate::symbol::SymbolSpec;
use crate::weights::{weighted_norm, Weight};

/// Relative change of the eigenvalue estimate that ends power iteration; the
/// geometric tail `change * r / (1 - r)` predicted from the ratio `r` of
/// successive changes must also fall below it.
pub const POWER_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct PowerReport {
    /// `sqrt` of the dominant eigenvalue of `T*T`.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
}

/// Power iteration on `T*T` from a seeded start: real and imaginary parts
/// uniform on `[-1, 1)`, drawn in grid order from `ChaCha8Rng::seed_from_u64(seed)`.
/// A run that exhausts `iters` is flagged and returns its last iterate.
pub fn opnorm_l2<T: LinearOperator + ?Sized>(op: &T, iters: usize, seed: u64) -> Result<PowerReport> {
    let grid = *op.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<Complex64> =
        (0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let mut v = SampledField::new(grid, start, Side::Physical)?;
    v = v.scale(Complex64::new(1.0 / v.norm_l2(), 0.0));
    let mut lambda = 0.0f64;
    let mut prev_change = f64::INFINITY;
    for it in 1..=iters.max(1) {
        let tv = op.apply(&v)?;
        let next = op.adjoint(&tv)?;
        // Rayleigh quotient <T*T v, v> = ||T v||^2 for unit v
        let est = tv.norm_l2().powi(2);
        let nrm = next.norm_l2();
        if nrm == 0.0 {
            return Ok(PowerReport { value: 0.0, iterations: it, converged: true, seed });
        }
        let change = (est - lambda).abs() / est.max(f64::MIN_POSITIVE);
        let r = change / prev_change;
        let tail = if r < 1.0 { change * r / (1.0 - r) } else { f64::INFINITY };
        lambda = est;
        prev_change = change;
        v = next.scale(Complex64::new(1.0 / nrm, 0.0));
        if it > 2 && change < POWER_TOLERANCE && (tail < 0.1 * POWER_TOLERANCE || change == 0.0) {
            return Ok(PowerReport { value: lambda.sqrt(), iterations: it, converged: true, seed });
        }
    }
    Ok(PowerReport { value: lambda.sqrt(), iterations: iters, converged: false, seed })
}

#[derive(Debug, Clone, Serialize)]
pub struct LpwReport {
    /// `max ||T u||_{L^p_w} / ||u||_{L^p_w}` over the family.
    pub value: f64,
    pub maximizer: String,
    pub ratios: Vec<(String, f64)>,
}

/// Family lower bound for the `L^p_w` operator norm.
pub fn opnorm_lpw<T: LinearOperator + ?Sized>(op: &T, p: f64, w: &Weight, fam: &TestFamily) -> Result<LpwReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Config(format!("opnorm_lpw needs 1 < p < inf, got {p}")));
    }
    let probes = fam.normalized(op.grid(), p, w)?;
    if probes.is_empty() {
        return Err(Error::Config("opnorm_lpw needs a nonempty test family".into()));
    }
    let ratios: Vec<(String, f64)> = probes
        .par_iter()
        .map(|pr| Ok((pr.label.clone(), weighted_norm(&op.apply(&pr.field)?, p, w)?)))
        .collect::<Result<_>>()?;
    let (maximizer, value) = ratios
        .iter()
        .fold((String::new(), f64::NEG_INFINITY), |acc, (l, v)| if *v > acc.1 { (l.clone(), *v) } else { acc });
    Ok(LpwReport { value, maximizer, ratios })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Every successive ratio at most 1.5.
    Stable,
    /// Every successive ratio at least 2.0.
    Growing,
    Inconclusive,
}

impl Verdict {
    pub fn from_values(values: &[f64]) -> Verdict {
        let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
        if ratios.is_empty() {
            Verdict::Inconclusive
        } else if ratios.iter().all(|r| *r <= 1.5) {
            Verdict::Stable
        } else if ratios.iter().all(|r| *r >= 2.0) {
            Verdict::Growing
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Growing => "growing",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub m: f64,
    pub points_per_axis: usize,
    pub norm: f64,
    pub maximizer: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthSummary {
    pub m: f64,
    /// Slope of `log norm` against `log N`.
    pub exponent: f64,
    /// Successive ratios of the norm as `N` increases.
    pub ratios: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    pub summaries: Vec<GrowthSummary>,
}

impl GrowthTable {
    pub fn summary(&self, m: f64) -> Option<&GrowthSummary> {
        self.summaries.iter().find(|s| s.m == m)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,N,norm,maximizer,exponent,verdict\n");
        for r in &self.rows {
            let s = self.summary(r.m).expect("every row has a summary");
            out.push_str(&format!(
                "{},{},{:.12e},{},{:.6},{}\n",
                r.m,
                r.points_per_axis,
                r.norm,
                r.maximizer,
                s.exponent,
                s.verdict.as_str()
            ));
        }
        out
    }
}

/// `opnorm_lpw` of `e^{i phi} <D>^m` (unweighted) for each `m` on grids of
/// `N` points per axis sharing `base`'s half-width.
pub fn threshold_sweep(
    phase: &PhaseSpec,
    p: f64,
    m_list: &[f64],
    n_list: &[usize],
    base: &Grid,
    fam: &TestFamily,
) -> Result<GrowthTable> {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &m in m_list {
        let mut norms = Vec::new();
        for &big_n in n_list {
            let grid = Grid::new(base.dim(), big_n, base.half_width())?;
            let op = FioOperator::new(SymbolSpec::bessel_power(m), phase.clone(), grid);
            let rep = opnorm_lpw(&op, p, &Weight::unit(), fam)?;
            norms.push(rep.value);
            rows.push(GrowthRow { m, points_per_axis: big_n, norm: rep.value, maximizer: rep.maximizer });
        }
        let logn: Vec<f64> = n_list.iter().map(|&v| (v as f64).ln()).collect();
        let lognorm: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
        let exponent = if n_list.len() >= 2 { fit_line(&logn, &lognorm).0 } else { 0.0 };
        let ratios = norms.windows(2).map(|w| w[1] / w[0]).collect();
        summaries.push(GrowthSummary { m, exponent, ratios, verdict: Verdict::from_values(&norms) });
    }
    Ok(GrowthTable { rows, summaries })
}
