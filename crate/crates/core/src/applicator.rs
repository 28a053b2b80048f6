//! Application of Fourier integral operators to sampled fields.
//!
//! The direct path evaluates
//! `v(x) = (2 pi)^{-n} sum_xi e^{i phi(x, xi)} a(x, xi) u^(xi) dxi^n`
//! on every grid point, at cost `O(N^{2n})`; it is the reference every other
//! path is checked against.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cutoff::dot;
use crate::decompose::{ConeFrame, DyadicPartition};
use crate::error::{Error, Result};
use crate::field::{multiply_in_frequency, transform, Direction, SampledField, Side};
use crate::grid::Grid;
use crate::phase::PhaseSpec;
use crate::special::fit_line;
use crate::symbol::SymbolSpec;

/// A bounded linear map on fields of one grid, with its adjoint.
pub trait LinearOperator: Sync {
    fn grid(&self) -> &Grid;
    fn apply(&self, u: &SampledField) -> Result<SampledField>;
    fn adjoint(&self, v: &SampledField) -> Result<SampledField>;
}

/// `T_{a, phi}` on a grid.
#[derive(Debug, Clone)]
pub struct FioOperator {
    pub amplitude: SymbolSpec,
    pub phase: PhaseSpec,
    pub grid: Grid,
    /// Radius of the low-frequency piece `chi_0` in decomposed application.
    pub low_cut: f64,
    /// Drop frequency bins that a stretching diffeomorphism maps past Nyquist.
    pub anti_alias: bool,
}

impl FioOperator {
    pub fn new(amplitude: SymbolSpec, phase: PhaseSpec, grid: Grid) -> Self {
        Self { amplitude, phase, grid, low_cut: 2.0, anti_alias: true }
    }

    pub fn with_low_cut(mut self, low_cut: f64) -> Result<Self> {
        if !(low_cut > 0.0) {
            return Err(Error::Config(format!("low_cut = {low_cut} must be positive")));
        }
        self.low_cut = low_cut;
        Ok(self)
    }

    /// Equal trapezoid weight of each frequency bin, `dxi^n`.
    pub fn quadrature_weight(&self) -> f64 {
        self.grid.dual_cell_volume()
    }

    /// Sum of all quadrature weights: the volume of the frequency box.
    pub fn quadrature_volume(&self) -> f64 {
        self.quadrature_weight() * self.grid.len() as f64
    }

    /// True when the operator is the multiplier `e^{i psi(D)} a(D)`.
    pub fn is_multiplier(&self) -> bool {
        self.amplitude.is_x_independent() && self.phase.is_multiplier_form()
    }

    /// `e^{i psi(xi)} a(xi)` on the frequency grid, for multiplier operators.
    pub fn multiplier_symbol(&self) -> Option<Vec<Complex64>> {
        if !self.is_multiplier() {
            return None;
        }
        let zero = vec![0.0; self.grid.dim()];
        Some(
            (0..self.grid.len())
                .map(|k| {
                    let xi = self.grid.freq(k);
                    let psi = self.phase.xi_only_part(&xi).unwrap_or(0.0);
                    Complex64::from_polar(1.0, psi) * self.amplitude.eval(&zero, &xi)
                })
                .collect(),
        )
    }

    /// Whether frequency bin `xi` takes part in the quadrature.
    pub fn bin_active(&self, xi: &[f64]) -> bool {
        match self.phase.frequency_stretch() {
            Some(s) if self.anti_alias && s > 1.0 => {
                let m = xi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                s * m < self.grid.nyquist()
            }
            _ => true,
        }
    }

    /// Whether output point `x` is kept: diffeomorphism phases zero the points
    /// whose image leaves the box instead of wrapping around.
    pub fn output_active(&self, x: &[f64]) -> bool {
        match self.phase.spatial_image(x) {
            Some(y) => self.grid.contains(&y),
            None => true,
        }
    }

    fn check_input(&self, u: &SampledField) -> Result<()> {
        if *u.grid() != self.grid {
            return Err(Error::Usage("field grid differs from the operator grid".into()));
        }
        if u.side() != Side::Physical {
            return Err(Error::Usage("operators act on physical-side fields".into()));
        }
        Ok(())
    }

    fn amplitude_table(&self) -> Option<Vec<Complex64>> {
        if !self.amplitude.is_x_independent() {
            return None;
        }
        let zero = vec![0.0; self.grid.dim()];
        Some((0..self.grid.len()).map(|k| self.amplitude.eval(&zero, &self.grid.freq(k))).collect())
    }
}

impl LinearOperator for FioOperator {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Multiplier fast path when available, direct quadrature otherwise.
    fn apply(&self, u: &SampledField) -> Result<SampledField> {
        match self.multiplier_symbol() {
            Some(sigma) => {
                self.check_input(u)?;
                multiply_in_frequency(u, &sigma)
            }
            None => apply_fio(self, u),
        }
    }

    fn adjoint(&self, v: &SampledField) -> Result<SampledField> {
        match self.multiplier_symbol() {
            Some(sigma) => {
                self.check_input(v)?;
                let conj: Vec<Complex64> = sigma.iter().map(|s| s.conj()).collect();
                multiply_in_frequency(v, &conj)
            }
            None => apply_fio_adjoint(self, v),
        }
    }
}

/// A frequency multiplier tabulated on a grid.
#[derive(Debug, Clone)]
pub struct Multiplier {
    pub grid: Grid,
    pub symbol: Vec<Complex64>,
}

impl Multiplier {
    pub fn from_rule<F: Fn(&[f64]) -> Complex64>(grid: Grid, sigma: F) -> Result<Self> {
        let symbol: Vec<Complex64> = (0..grid.len()).map(|k| sigma(&grid.freq(k))).collect();
        if let Some(k) = symbol.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::Domain(format!("multiplier is not finite at xi = {:?}", grid.freq(k))));
        }
        Ok(Self { grid, symbol })
    }

    pub fn sup_abs(&self) -> f64 {
        self.symbol.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }
}

impl LinearOperator for Multiplier {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn apply(&self, u: &SampledField) -> Result<SampledField> {
        if *u.grid() != self.grid {
            return Err(Error::Usage("field grid differs from the multiplier grid".into()));
        }
        multiply_in_frequency(u, &self.symbol)
    }

    fn adjoint(&self, v: &SampledField) -> Result<SampledField> {
        if *v.grid() != self.grid {
            return Err(Error::Usage("field grid differs from the multiplier grid".into()));
        }
        let conj: Vec<Complex64> = self.symbol.iter().map(|s| s.conj()).collect();
        multiply_in_frequency(v, &conj)
    }
}

/// `F^{-1}[sigma(xi) u^(xi)]`.
pub fn apply_multiplier<F: Fn(&[f64]) -> Complex64>(sigma: F, u: &SampledField) -> Result<SampledField> {
    Multiplier::from_rule(*u.grid(), sigma)?.apply(u)
}

/// Direct oscillatory quadrature of `T u`.
pub fn apply_fio(op: &FioOperator, u: &SampledField) -> Result<SampledField> {
    op.check_input(u)?;
    let grid = op.grid;
    let n = grid.dim();
    let uhat = transform(u, Direction::Forward)?;
    let amp = op.amplitude_table();
    let freqs: Vec<Vec<f64>> = (0..grid.len()).map(|k| grid.freq(k)).collect();
    let bins: Vec<usize> = (0..grid.len())
        .filter(|&k| uhat.values()[k] != Complex64::new(0.0, 0.0) && op.bin_active(&freqs[k]))
        .collect();
    let c = op.quadrature_weight() / (2.0 * PI).powi(n as i32);
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            if !op.output_active(&x) {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &k in &bins {
                let xi = &freqs[k];
                let a = match &amp {
                    Some(t) => t[k],
                    None => op.amplitude.eval(&x, xi),
                };
                acc += Complex64::from_polar(1.0, op.phase.eval(&x, xi)) * a * uhat.values()[k];
            }
            acc * c
        })
        .collect();
    SampledField::new(grid, values, Side::Physical)
}

/// Conjugate quadrature: `(T* v)^(xi) = sum_x e^{-i phi(x, xi)} conj(a(x, xi)) v(x) dx^n`.
pub fn apply_fio_adjoint(op: &FioOperator, v: &SampledField) -> Result<SampledField> {
    op.check_input(v)?;
    let grid = op.grid;
    let amp = op.amplitude_table();
    let points: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let rows: Vec<usize> = (0..grid.len())
        .filter(|&i| v.values()[i] != Complex64::new(0.0, 0.0) && op.output_active(&points[i]))
        .collect();
    let dx = grid.cell_volume();
    let ghat: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let xi = grid.freq(k);
            if !op.bin_active(&xi) {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &i in &rows {
                let x = &points[i];
                let a = match &amp {
                    Some(t) => t[k],
                    None => op.amplitude.eval(x, &xi),
                };
                acc += Complex64::from_polar(1.0, -op.phase.eval(x, &xi)) * a.conj() * v.values()[i];
            }
            acc * dx
        })
        .collect();
    transform(&SampledField::new(grid, ghat, Side::Frequency)?, Direction::Inverse)
}

/// `K(x, y) = (2 pi)^{-n} sum_xi e^{i(phi(x, xi) - <y, xi>)} a(x, xi) dxi^n` for each `y`.
pub fn kernel_row(op: &FioOperator, x: &[f64], ys: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let grid = op.grid;
    let n = grid.dim();
    if x.len() != n || ys.iter().any(|y| y.len() != n) {
        return Err(Error::Usage(format!("kernel points must have dimension {n}")));
    }
    let c = op.quadrature_weight() / (2.0 * PI).powi(n as i32);
    let terms: Vec<(Vec<f64>, Complex64)> = (0..grid.len())
        .filter_map(|k| {
            let xi = grid.freq(k);
            if !op.bin_active(&xi) {
                return None;
            }
            let a = op.amplitude.eval(x, &xi);
            if a == Complex64::new(0.0, 0.0) {
                return None;
            }
            let t = Complex64::from_polar(1.0, op.phase.eval(x, &xi)) * a;
            Some((xi, t))
        })
        .collect();
    Ok(ys
        .par_iter()
        .map(|y| {
            let s: Complex64 = terms.iter().map(|(xi, t)| t * Complex64::from_polar(1.0, -dot(y, xi))).sum();
            s * c
        })
        .collect())
}

/// One piece of a decomposed application.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceRecord {
    /// Dyadic index; `None` for the tail above `J_max`.
    pub j: Option<usize>,
    /// Cone index within the scale-`2^{-j}` frame; `None` for `j = 0` and the tail.
    pub nu: Option<usize>,
    pub norm: f64,
    pub wall_time_s: f64,
}

/// Aggregate of the pieces at one dyadic scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleRecord {
    pub j: usize,
    /// `||T chi_j(D) u||`.
    pub output_norm: f64,
    /// `||chi_j(D) u||`.
    pub input_norm: f64,
    /// `s` with `output_norm / input_norm = h^{-s}`, `h = 2^{-j}` (`j >= 1`).
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceDiagnostics {
    pub pieces: Vec<PieceRecord>,
    pub scales: Vec<ScaleRecord>,
    /// Least-squares slope of `log2 output_norm` against `j` over `j >= 1`.
    pub decay_slope: Option<f64>,
    /// The piece outputs, in the order of `pieces`; they sum to the result.
    #[serde(skip)]
    pub fields: Vec<SampledField>,
}

struct PieceSpec {
    j: Option<usize>,
    nu: Option<usize>,
    /// `(bin, weight)` on the support.
    bins: Vec<(usize, f64)>,
    /// Cone center used to linearise the phase, for conic pieces of
    /// homogeneous phases.
    center: Option<Vec<f64>>,
}

/// `T = T chi_0(D) + sum_{j, nu} T chi_j(D) psi^nu_j(D) (+ tail)`, each conic
/// piece evaluated in its linearised form
/// `e^{i <grad phi(x, xi^nu), xi>} b^nu(x, 2^{-j} xi, 2^{-j})`.
pub fn apply_decomposed(
    op: &FioOperator,
    u: &SampledField,
    dp: &DyadicPartition,
    frames: &[ConeFrame],
) -> Result<(SampledField, PieceDiagnostics)> {
    op.check_input(u)?;
    let grid = op.grid;
    let n = grid.dim();
    if dp.grid != grid {
        return Err(Error::Usage("partition grid differs from the operator grid".into()));
    }
    if (dp.low_radius - op.low_cut).abs() > 1e-12 * op.low_cut {
        return Err(Error::Config(format!(
            "partition low-frequency radius {} differs from operator low_cut {}",
            dp.low_radius, op.low_cut
        )));
    }
    if frames.len() != dp.j_max {
        return Err(Error::Config(format!("{} cone frames given for J_max = {}", frames.len(), dp.j_max)));
    }
    for (i, f) in frames.iter().enumerate() {
        let h = 2f64.powi(-(i as i32 + 1));
        if (f.h - h).abs() > 1e-12 * h || f.dim != n {
            return Err(Error::Config(format!(
                "frame scale mismatch at j = {}: expected h = {h} in dimension {n}, got h = {} in dimension {}",
                i + 1,
                f.h,
                f.dim
            )));
        }
    }

    let uhat = transform(u, Direction::Forward)?;
    let freqs: Vec<Vec<f64>> = (0..grid.len()).map(|k| grid.freq(k)).collect();
    let live: Vec<usize> = (0..grid.len())
        .filter(|&k| uhat.values()[k] != Complex64::new(0.0, 0.0) && op.bin_active(&freqs[k]))
        .collect();

    let mut specs: Vec<PieceSpec> = Vec::new();
    let radial = |j: usize| -> Vec<(usize, f64)> {
        live.iter().filter_map(|&k| {
            let w = dp.eval(j, &freqs[k]);
            (w != 0.0).then_some((k, w))
        }).collect()
    };
    specs.push(PieceSpec { j: Some(0), nu: None, bins: radial(0), center: None });
    for j in 1..=dp.j_max {
        let frame = &frames[j - 1];
        let mut per_nu: Vec<Vec<(usize, f64)>> = vec![Vec::new(); frame.len()];
        for (k, w) in radial(j) {
            for (nu, p) in frame.psi_all(&freqs[k]).into_iter().enumerate() {
                if p != 0.0 {
                    per_nu[nu].push((k, w * p));
                }
            }
        }
        for (nu, bins) in per_nu.into_iter().enumerate() {
            let center = op.phase.homogeneous.then(|| frame.centers[nu].clone());
            specs.push(PieceSpec { j: Some(j), nu: Some(nu), bins, center });
        }
    }
    if dp.include_tail {
        let bins = live.iter().filter_map(|&k| {
            let w = dp.tail_eval(&freqs[k]);
            (w != 0.0).then_some((k, w))
        }).collect();
        specs.push(PieceSpec { j: None, nu: None, bins, center: None });
    }

    let c = op.quadrature_weight() / (2.0 * PI).powi(n as i32);
    let amp = op.amplitude_table();
    let points: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let results: Vec<(Vec<Complex64>, f64)> = specs
        .par_iter()
        .map(|spec| {
            let start = Instant::now();
            let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
            if !spec.bins.is_empty() {
                for (i, x) in points.iter().enumerate() {
                    if !op.output_active(x) {
                        continue;
                    }
                    let pivot = spec.center.as_ref().map(|cv| op.phase.grad_xi(x, cv));
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(k, w) in &spec.bins {
                        let xi = &freqs[k];
                        let a = match &amp {
                            Some(t) => t[k],
                            None => op.amplitude.eval(x, xi),
                        };
                        let arg = match &pivot {
                            Some(p) => {
                                let g = op.phase.grad_xi(x, xi);
                                let residual: f64 = g.iter().zip(p).zip(xi).map(|((gi, pi), c)| (gi - pi) * c).sum();
                                dot(p, xi) + residual
                            }
                            None => op.phase.eval(x, xi),
                        };
                        acc += Complex64::from_polar(w, arg) * a * uhat.values()[k];
                    }
                    out[i] = acc * c;
                }
            }
            (out, start.elapsed().as_secs_f64())
        })
        .collect();

    let mut total = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut pieces = Vec::with_capacity(specs.len());
    let mut fields = Vec::with_capacity(specs.len());
    for (spec, (vals, time)) in specs.iter().zip(results) {
        for (t, v) in total.iter_mut().zip(&vals) {
            *t += v;
        }
        let f = SampledField::new(grid, vals, Side::Physical)?;
        pieces.push(PieceRecord { j: spec.j, nu: spec.nu, norm: f.norm_l2(), wall_time_s: time });
        fields.push(f);
    }

    let mut scales = Vec::new();
    for j in 0..=dp.j_max {
        let mut sum = SampledField::zeros(grid, Side::Physical);
        for (rec, f) in pieces.iter().zip(&fields) {
            if rec.j == Some(j) {
                sum = sum.add(f)?;
            }
        }
        let output_norm = sum.norm_l2();
        let input_norm = dp.project(u, j)?.norm_l2();
        let exponent = (j >= 1 && input_norm > 0.0 && output_norm > 0.0)
            .then(|| (output_norm / input_norm).log2() / j as f64);
        scales.push(ScaleRecord { j, output_norm, input_norm, exponent });
    }
    let fit: Vec<(f64, f64)> = scales
        .iter()
        .filter(|s| s.j >= 1 && s.output_norm > 0.0)
        .map(|s| (s.j as f64, s.output_norm.log2()))
        .collect();
    let decay_slope = (fit.len() >= 2).then(|| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = fit.into_iter().unzip();
        fit_line(&xs, &ys).0
    });

    let result = SampledField::new(grid, total, Side::Physical)?;
    Ok((result, PieceDiagnostics { pieces, scales, decay_slope, fields }))
}
