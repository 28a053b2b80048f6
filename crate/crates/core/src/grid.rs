//! Uniform periodic grids and their discrete Fourier duals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform grid on `[-L, L)^n` with `N` points per axis.
///
/// Points sit at cell centres `x_k = -L + (k + 1/2) dx`, `dx = 2L/N`, so the
/// origin is a cell corner. The frequency side uses the standard DFT
/// ordering: bin `k` carries `xi = k * dxi` for `k < N/2` and `(k - N) * dxi`
/// otherwise, with `dxi = pi / L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points_per_axis: usize,
    half_width: f64,
}

/// `N` must be a power of two, or three times a power of two, and at least 8.
pub fn is_supported_size(n: usize) -> bool {
    if n < 8 {
        return false;
    }
    let m = if n % 3 == 0 { n / 3 } else { n };
    m.is_power_of_two()
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize, half_width: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("grid dimension must be at least 1".into()));
        }
        if !is_supported_size(points_per_axis) {
            return Err(Error::Config(format!(
                "points_per_axis = {points_per_axis} must be a power of two (or 3 times one) and >= 8"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Config(format!("half_width = {half_width} must be positive")));
        }
        Ok(Self { dim, points_per_axis, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Total number of samples, `N^n`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    pub fn dual_spacing(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Largest representable frequency magnitude per axis, `pi N / (2L)`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.points_per_axis as f64 / (2.0 * self.half_width)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn dual_cell_volume(&self) -> f64 {
        self.dual_spacing().powi(self.dim as i32)
    }

    pub fn axis_coord(&self, k: usize) -> f64 {
        -self.half_width + (k as f64 + 0.5) * self.spacing()
    }

    /// Signed DFT index of bin `k`.
    pub fn signed_index(&self, k: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    pub fn axis_freq(&self, k: usize) -> f64 {
        self.signed_index(k) as f64 * self.dual_spacing()
    }

    /// Multi-index of a flat (row-major, last axis fastest) index.
    pub fn unravel(&self, mut idx: usize, out: &mut [usize]) {
        let n = self.points_per_axis;
        for d in (0..self.dim).rev() {
            out[d] = idx % n;
            idx /= n;
        }
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &k| acc * self.points_per_axis + k)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut m = vec![0; self.dim];
        self.unravel(idx, &mut m);
        m.iter().map(|&k| self.axis_coord(k)).collect()
    }

    pub fn freq(&self, idx: usize) -> Vec<f64> {
        let mut m = vec![0; self.dim];
        self.unravel(idx, &mut m);
        m.iter().map(|&k| self.axis_freq(k)).collect()
    }

    /// All physical points, flattened `len * dim`.
    pub fn point_table(&self) -> Vec<f64> {
        (0..self.len()).flat_map(|i| self.point(i)).collect()
    }

    /// All frequency points, flattened `len * dim`.
    pub fn freq_table(&self) -> Vec<f64> {
        (0..self.len()).flat_map(|i| self.freq(i)).collect()
    }

    /// Index of the cell containing `x` along one axis, clamped to the box.
    pub fn axis_cell_of(&self, x: f64) -> usize {
        let k = ((x + self.half_width) / self.spacing()).floor();
        k.clamp(0.0, (self.points_per_axis - 1) as f64) as usize
    }

    /// Nearest frequency bin to `xi` along one axis (wrapping).
    pub fn axis_bin_of(&self, xi: f64) -> usize {
        let n = self.points_per_axis as i64;
        let k = (xi / self.dual_spacing()).round() as i64;
        k.rem_euclid(n) as usize
    }

    /// Same grid with a different number of points per axis.
    pub fn with_points(&self, points_per_axis: usize) -> Result<Self> {
        Self::new(self.dim, points_per_axis, self.half_width)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().all(|&c| c >= -self.half_width && c < self.half_width)
    }
}

/// Builds a grid; see [`Grid::new`].
pub fn make_grid(n: usize, points_per_axis: usize, half_width: f64) -> Result<Grid> {
    Grid::new(n, points_per_axis, half_width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_dimensional_metadata() {
        let g = make_grid(1, 256, 16.0).unwrap();
        assert_eq!(g.len(), 256);
        assert!((g.dual_spacing() - PI / 16.0).abs() < 1e-15);
        assert_eq!(g.spacing() * 256.0, 32.0);
    }

    #[test]
    fn two_dimensional_nyquist() {
        let g = make_grid(2, 64, 8.0).unwrap();
        assert_eq!(g.len(), 64 * 64);
        assert!((g.nyquist() - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(make_grid(1, 100, 8.0), Err(Error::Config(_))));
        assert!(make_grid(1, 4, 8.0).is_err());
        assert!(make_grid(0, 64, 8.0).is_err());
        assert!(make_grid(1, 64, 0.0).is_err());
        assert!(make_grid(1, 48, 8.0).is_ok());
    }

    #[test]
    fn ravel_roundtrip() {
        let g = make_grid(3, 8, 1.0).unwrap();
        let mut m = [0; 3];
        for i in 0..g.len() {
            g.unravel(i, &mut m);
            assert_eq!(g.ravel(&m), i);
        }
    }

    #[test]
    fn origin_is_a_cell_edge() {
        let g = make_grid(1, 64, 4.0).unwrap();
        assert!((g.axis_coord(32) - g.spacing() / 2.0).abs() < 1e-15);
        assert_eq!(g.axis_freq(32), -g.nyquist());
    }
}
