use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::cutoff::{japanese, norm};
use crate::error::{Error, Result};
use crate::field::{transform, Direction, SampledField, Side};
use crate::grid::Grid;
use crate::symbol::SymbolSpec;

#[derive(Debug, Clone, Serialize)]
pub struct KernelDecayReport {
    /// `max_{|y| <= y_max} <y>^{n + mu} |B(x, y)|` over grid points `y`.
    pub weighted_sup: f64,
    pub at_y: Vec<f64>,
    pub mu: f64,
    pub points_per_axis: usize,
    pub half_width: f64,
}

/// `B(x, y) = int e^{-i<y, xi>} b(x, xi) dxi` by the trapezoid rule on the
/// frequency grid, at every grid point `y`.
pub fn low_frequency_kernel(b: &SymbolSpec, x: &[f64], grid: &Grid) -> Result<Vec<Complex64>> {
    if x.len() != grid.dim() {
        return Err(Error::Usage(format!("x has dimension {}, grid has {}", x.len(), grid.dim())));
    }
    let hat = SampledField::new(*grid, (0..grid.len()).map(|k| b.eval(x, &grid.freq(k))).collect(), Side::Frequency)?;
    // the inverse transform gives (2 pi)^{-n} int e^{+i<y, xi>} b at y; the grid
    // is symmetric, so B(y) is read at the mirrored index
    let inv = transform(&hat, Direction::Inverse)?;
    let big = grid.points_per_axis();
    let scale = (2.0 * PI).powi(grid.dim() as i32);
    let mut m = vec![0usize; grid.dim()];
    Ok((0..grid.len())
        .map(|k| {
            grid.unravel(k, &mut m);
            m.iter_mut().for_each(|v| *v = big - 1 - *v);
            inv.values()[grid.ravel(&m)] * scale
        })
        .collect())
}

/// Weighted decay of the low-frequency kernel; `mu` in `[0, 1)`.
pub fn kernel_decay_profile(b: &SymbolSpec, x: &[f64], mu: f64, grid: &Grid, y_max: f64) -> Result<KernelDecayReport> {
    if !(0.0..1.0).contains(&mu) {
        return Err(Error::Config(format!("kernel decay exponent mu = {mu} must lie in [0, 1)")));
    }
    let kernel = low_frequency_kernel(b, x, grid)?;
    let n = grid.dim() as f64;
    let mut best = (0.0f64, vec![0.0; grid.dim()]);
    for (k, v) in kernel.iter().enumerate() {
        let y = grid.point(k);
        if norm(&y) > y_max {
            continue;
        }
        let val = japanese(&y).powf(n + mu) * v.norm();
        if val > best.0 {
            best = (val, y);
        }
    }
    Ok(KernelDecayReport {
        weighted_sup: best.0,
        at_y: best.1,
        mu,
        points_per_axis: grid.points_per_axis(),
        half_width: grid.half_width(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_cutoff_kernel_decays_fast() {
        let b = SymbolSpec::cutoff_times_power(0.0).unwrap();
        let g = Grid::new(1, 1024, 128.0).unwrap();
        let k = low_frequency_kernel(&b, &[0.0], &g).unwrap();
        let tail = |lo: f64| (0..g.len()).filter(|&i| g.point(i)[0].abs() > lo).map(|i| k[i].norm()).fold(0.0, f64::max);
        // faster than |y|^{-4} and the rate keeps improving
        let (t20, t40, t80) = (tail(20.0), tail(40.0), tail(80.0));
        assert!(t40 / t20 < 1.0 / 16.0 && t80 / t40 < t40 / t20, "{t20:e} {t40:e} {t80:e}");
        let a = kernel_decay_profile(&b, &[0.0], 0.9, &g, 100.0).unwrap();
        let c = kernel_decay_profile(&b, &[0.0], 0.9, &Grid::new(1, 2048, 256.0).unwrap(), 100.0).unwrap();
        assert!((a.weighted_sup / c.weighted_sup - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kernel_matches_direct_sum() {
        let b = SymbolSpec::cutoff_times_power(1.0).unwrap();
        let g = Grid::new(1, 64, 16.0).unwrap();
        let k = low_frequency_kernel(&b, &[0.0], &g).unwrap();
        for i in [0usize, 17, 40] {
            let y = g.point(i)[0];
            let direct: Complex64 = (0..g.len())
                .map(|j| {
                    let xi = g.freq(j);
                    Complex64::from_polar(1.0, -y * xi[0]) * b.eval(&[0.0], &xi) * g.dual_spacing()
                })
                .sum();
            assert!((k[i] - direct).norm() < 1e-12, "{i}");
        }
    }
}
