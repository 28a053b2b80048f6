use num_complex::Complex64;
use serde::Serialize;

use crate::cutoff::{low_cut, norm};
use crate::error::{Error, Result};
use crate::field::{multiply_in_frequency, SampledField, Side};
use crate::grid::Grid;

/// Telescoping Littlewood-Paley partition on a grid.
///
/// With `r0` the low-frequency radius (default 2) and `l(r) = low_cut(2r/r0)`,
/// `chi_0 = l(r)` and `chi_j = l(2^{-j} r) - l(2^{1-j} r)` for `1 <= j <= J`;
/// the tail `1 - l(2^{-J} r)` carries everything above `2^J r0 / 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicPartition {
    pub grid: Grid,
    pub j_max: usize,
    pub low_radius: f64,
    /// Whether [`DyadicPartition::reconstruct_table`] includes the tail.
    pub include_tail: bool,
}

pub fn littlewood_paley(grid: &Grid, j_max: usize) -> Result<DyadicPartition> {
    littlewood_paley_with_radius(grid, j_max, 2.0)
}

pub fn littlewood_paley_with_radius(grid: &Grid, j_max: usize, low_radius: f64) -> Result<DyadicPartition> {
    if !(low_radius > 0.0) {
        return Err(Error::Config(format!("low-frequency radius {low_radius} must be positive")));
    }
    let lowest_top = 2f64.powi(j_max as i32 - 1) * low_radius / 2.0;
    if j_max > 0 && lowest_top >= grid.nyquist() {
        return Err(Error::Config(format!(
            "J_max = {j_max} too large: piece {j_max} starts at |xi| = {lowest_top}, beyond the Nyquist frequency {}",
            grid.nyquist()
        )));
    }
    Ok(DyadicPartition { grid: *grid, j_max, low_radius, include_tail: true })
}

impl DyadicPartition {
    fn l(&self, r: f64) -> f64 {
        low_cut(2.0 * r / self.low_radius)
    }

    /// Number of pieces `chi_0 .. chi_J`, tail excluded.
    pub fn len(&self) -> usize {
        self.j_max + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `chi_j(xi)`.
    pub fn eval(&self, j: usize, xi: &[f64]) -> f64 {
        let r = norm(xi);
        self.eval_radial(j, r)
    }

    pub fn eval_radial(&self, j: usize, r: f64) -> f64 {
        if j == 0 {
            self.l(r)
        } else {
            let s = 2f64.powi(-(j as i32));
            self.l(s * r) - self.l(2.0 * s * r)
        }
    }

    /// `1 - sum_{j <= J} chi_j`.
    pub fn tail_eval(&self, xi: &[f64]) -> f64 {
        1.0 - self.l(2f64.powi(-(self.j_max as i32)) * norm(xi))
    }

    /// `chi_j` on every frequency bin, in DFT order.
    pub fn table(&self, j: usize) -> Vec<f64> {
        (0..self.grid.len()).map(|k| self.eval(j, &self.grid.freq(k))).collect()
    }

    pub fn tail_table(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|k| self.tail_eval(&self.grid.freq(k))).collect()
    }

    /// Pointwise sum of all pieces (and the tail when included).
    pub fn reconstruct_table(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.grid.len()];
        for j in 0..=self.j_max {
            for (acc, v) in s.iter_mut().zip(self.table(j)) {
                *acc += v;
            }
        }
        if self.include_tail {
            for (acc, v) in s.iter_mut().zip(self.tail_table()) {
                *acc += v;
            }
        }
        s
    }

    /// Support annulus of `chi_j` as `(inner, outer)` radii.
    pub fn support(&self, j: usize) -> (f64, f64) {
        let r = self.low_radius / 2.0;
        if j == 0 {
            (0.0, 2.0 * r)
        } else {
            (2f64.powi(j as i32 - 1) * r, 2f64.powi(j as i32 + 1) * r)
        }
    }

    /// `chi_j(D) u`.
    pub fn project(&self, u: &SampledField, j: usize) -> Result<SampledField> {
        self.check(u)?;
        let sigma: Vec<Complex64> = self.table(j).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        multiply_in_frequency(u, &sigma)
    }

    pub fn project_tail(&self, u: &SampledField) -> Result<SampledField> {
        self.check(u)?;
        let sigma: Vec<Complex64> = self.tail_table().into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        multiply_in_frequency(u, &sigma)
    }

    fn check(&self, u: &SampledField) -> Result<()> {
        if *u.grid() != self.grid {
            return Err(Error::Usage("field grid differs from the partition grid".into()));
        }
        if u.side() != Side::Physical {
            return Err(Error::Usage("projection expects a physical-side field".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_pieces_sum_to_one() {
        let g = Grid::new(1, 256, 16.0).unwrap();
        let dp = littlewood_paley(&g, 5).unwrap();
        assert_eq!(dp.len(), 6);
        let mut sum = vec![0.0; g.len()];
        for j in 0..=5 {
            for (s, v) in sum.iter_mut().zip(dp.table(j)) {
                *s += v;
            }
        }
        for (k, s) in sum.iter().enumerate() {
            if g.freq(k)[0].abs() <= 32.0 {
                assert!((s - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn supports_and_origin() {
        let g = Grid::new(1, 256, 16.0).unwrap();
        let dp = littlewood_paley(&g, 5).unwrap();
        assert_eq!(dp.eval(3, &[3.0]), 0.0);
        assert_eq!(dp.eval(0, &[0.0]), 1.0);
        for j in 1..=5 {
            let (lo, hi) = dp.support(j);
            assert_eq!((lo, hi), (2f64.powi(j as i32 - 1), 2f64.powi(j as i32 + 1)));
            assert_eq!(dp.eval(j, &[lo * 0.999]), 0.0);
            assert_eq!(dp.eval(j, &[hi * 1.001]), 0.0);
        }
    }

    #[test]
    fn too_deep_is_rejected() {
        let g = Grid::new(1, 64, 16.0).unwrap();
        assert!(matches!(littlewood_paley(&g, 5), Err(Error::Config(_))));
    }
}
