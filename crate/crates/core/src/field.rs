//! Sampled complex fields and the grid Fourier transform.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Physical,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Physical to frequency side.
    Forward,
    /// Frequency to physical side.
    Inverse,
}

/// Complex samples on a grid, either at the physical points or at the
/// frequency bins (DFT ordering).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
    side: Side,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<Complex64>, side: Side) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "field has {} values but grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, side })
    }

    pub fn zeros(grid: Grid, side: Side) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()], side }
    }

    /// Samples `f` at every physical grid point.
    pub fn from_physical<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid, values, side: Side::Physical }
    }

    pub fn from_physical_real<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64,
    {
        Self::from_physical(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Samples `f` at every frequency bin.
    pub fn from_frequency<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let values = (0..grid.len()).map(|i| f(&grid.freq(i))).collect();
        Self { grid, values, side: Side::Frequency }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// L2 norm with the side's natural measure: `dx^n` on the physical side,
    /// `(dxi / 2pi)^n` on the frequency side, so the transform is an isometry.
    pub fn norm_l2(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.measure()).sqrt()
    }

    fn measure(&self) -> f64 {
        match self.side {
            Side::Physical => self.grid.cell_volume(),
            Side::Frequency => {
                (self.grid.dual_spacing() / (2.0 * std::f64::consts::PI)).powi(self.grid.dim() as i32)
            }
        }
    }

    /// `<self, other>` with the side's measure, conjugate-linear in `other`.
    pub fn inner(&self, other: &SampledField) -> Result<Complex64> {
        self.check_compatible(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.measure())
    }

    pub fn check_compatible(&self, other: &SampledField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Usage("fields live on different grids".into()));
        }
        if self.side != other.side {
            return Err(Error::Usage("fields live on different sides".into()));
        }
        Ok(())
    }

    pub fn scale(&self, c: Complex64) -> SampledField {
        self.map(|v| v * c)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> SampledField {
        SampledField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), side: self.side }
    }

    pub fn zip_with<F>(&self, other: &SampledField, f: F) -> Result<SampledField>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(SampledField { grid: self.grid, values, side: self.side })
    }

    pub fn add(&self, other: &SampledField) -> Result<SampledField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledField) -> Result<SampledField> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product with a real function sampled on the same side.
    pub fn multiply_by(&self, factor: &[f64]) -> Result<SampledField> {
        if factor.len() != self.values.len() {
            return Err(Error::Usage("factor length does not match field".into()));
        }
        let values = self.values.iter().zip(factor).map(|(v, &f)| v * f).collect();
        Ok(SampledField { grid: self.grid, values, side: self.side })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `||self - other||_2 / ||other||_2`.
    pub fn relative_l2_error(&self, reference: &SampledField) -> Result<f64> {
        let diff = self.sub(reference)?;
        Ok(diff.norm_l2() / reference.norm_l2())
    }
}

/// Continuous-normalised grid Fourier transform.
///
/// Forward: `u_hat(xi) = sum_x u(x) e^{-i x.xi} dx^n`.
/// Inverse: `u(x) = (2pi)^{-n} sum_xi u_hat(xi) e^{i x.xi} dxi^n`.
/// The two are exact inverses on the grid.
pub fn transform(u: &SampledField, direction: Direction) -> Result<SampledField> {
    let (expected, target) = match direction {
        Direction::Forward => (Side::Physical, Side::Frequency),
        Direction::Inverse => (Side::Frequency, Side::Physical),
    };
    if u.side != expected {
        return Err(Error::Usage(format!(
            "{direction:?} transform expects a {expected:?} field, got {:?}",
            u.side
        )));
    }
    let grid = u.grid;
    let n = grid.points_per_axis();
    let x0 = grid.axis_coord(0);
    // e^{-i x0 xi_k} per axis bin
    let shift: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, -x0 * grid.axis_freq(k))).collect();
    let mut values = u.values.clone();
    match direction {
        Direction::Forward => {
            fft_nd(&mut values, &grid, false);
            apply_axis_factors(&mut values, &grid, &shift);
            let s = grid.cell_volume();
            values.iter_mut().for_each(|v| *v *= s);
        }
        Direction::Inverse => {
            let conj: Vec<Complex64> = shift.iter().map(|c| c.conj()).collect();
            apply_axis_factors(&mut values, &grid, &conj);
            fft_nd(&mut values, &grid, true);
            let s = (grid.dual_spacing() / (2.0 * std::f64::consts::PI)).powi(grid.dim() as i32);
            values.iter_mut().for_each(|v| *v *= s);
        }
    }
    SampledField::new(grid, values, target)
}

/// Applies `u -> F^{-1}[ sigma(xi) F[u] ]`.
pub fn multiply_in_frequency(u: &SampledField, sigma: &[Complex64]) -> Result<SampledField> {
    let mut hat = transform(u, Direction::Forward)?;
    hat.values.iter_mut().zip(sigma).for_each(|(v, s)| *v *= s);
    transform(&hat, Direction::Inverse)
}

fn apply_axis_factors(values: &mut [Complex64], grid: &Grid, factor: &[Complex64]) {
    let mut m = vec![0; grid.dim()];
    for (i, v) in values.iter_mut().enumerate() {
        grid.unravel(i, &mut m);
        let f: Complex64 = m.iter().map(|&k| factor[k]).product();
        *v *= f;
    }
}

/// Unnormalised n-dimensional DFT by axis passes.
fn fft_nd(values: &mut [Complex64], grid: &Grid, inverse: bool) {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let total = values.len();
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = values[start + k * stride];
                }
                fft.process(&mut line);
                for (k, slot) in line.iter().enumerate() {
                    values[start + k * stride] = *slot;
                }
            }
        }
    }
}
