use std::collections::BTreeMap;

use serde::Serialize;
use statrs::function::erf::erf;

use crate::cutoff::norm;
use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Serialize)]
pub struct SubstitutionReport {
    /// Largest histogram density of the pushforward of Lebesgue measure.
    pub max_density: f64,
    /// `2 sqrt(n) / c`.
    pub bound: f64,
    pub c: f64,
    pub bin_width: f64,
    pub pairs_checked: usize,
    /// Relative errors of `int u o t = int u J_t` for the three test Gaussians.
    pub formula_errors: Vec<f64>,
}

/// Test Gaussians `(centre, width)`.
const TEST_GAUSSIANS: [(f64, f64); 3] = [(0.0, 2.0), (1.0, 1.5), (-2.0, 2.5)];

/// Empirical Jacobian `J_t` of a map with `|t(x) - t(y)| >= c |x - y|`.
///
/// The lower bound is spot-checked on all pairs of a subsample of at most 64
/// grid points per axis-cube; `J_t` is the histogram of `t` over the grid in
/// bins of width `4 dx`, counted with the cell volume and divided by the bin
/// volume; the right side of the formula integrates each test Gaussian
/// exactly against this piecewise-constant density.
pub fn substitution_check<F>(t: &F, c: f64, grid: &Grid) -> Result<SubstitutionReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if !(c > 0.0) {
        return Err(Error::Config(format!("lower Lipschitz constant c = {c} must be positive")));
    }
    let n = grid.dim();
    let images: Vec<Vec<f64>> = (0..grid.len()).map(|k| t(&grid.point(k))).collect();
    if images.iter().any(|y| y.len() != n) {
        return Err(Error::Usage(format!("map must send R^{n} to R^{n}")));
    }
    let stride = (grid.len() / 64).max(1);
    let sample: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    let mut pairs = 0;
    for (i, &a) in sample.iter().enumerate() {
        for &b in &sample[i + 1..] {
            let (xa, xb) = (grid.point(a), grid.point(b));
            let dx: Vec<f64> = xa.iter().zip(&xb).map(|(p, q)| p - q).collect();
            let dy: Vec<f64> = images[a].iter().zip(&images[b]).map(|(p, q)| p - q).collect();
            let (d, e) = (norm(&dx), norm(&dy));
            pairs += 1;
            if e < c * d * (1.0 - 1e-12) {
                return Err(Error::Precondition(format!(
                    "|t(x) - t(y)| = {e} < c |x - y| = {} at x = {xa:?}, y = {xb:?}",
                    c * d
                )));
            }
        }
    }
    let width = 4.0 * grid.spacing();
    let mut bins: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for y in &images {
        *bins.entry(y.iter().map(|v| (v / width).floor() as i64).collect()).or_insert(0) += 1;
    }
    let to_density = grid.cell_volume() / width.powi(n as i32);
    let max_density = bins.values().map(|&c| c as f64 * to_density).fold(0.0, f64::max);
    let formula_errors = TEST_GAUSSIANS
        .iter()
        .map(|&(centre, s)| {
            let u = |y: &[f64]| (-y.iter().map(|v| (v - centre) * (v - centre)).sum::<f64>() / (2.0 * s * s)).exp();
            let lhs: f64 = images.iter().map(|y| u(y)).sum::<f64>() * grid.cell_volume();
            let rhs: f64 = bins
                .iter()
                .map(|(idx, &count)| {
                    // exact integral of the Gaussian over the bin
                    let mass: f64 = idx
                        .iter()
                        .map(|&i| {
                            let (a, b) = (i as f64 * width - centre, (i + 1) as f64 * width - centre);
                            let k = s * std::f64::consts::SQRT_2;
                            0.5 * s * (2.0 * std::f64::consts::PI).sqrt() * (erf(b / k) - erf(a / k))
                        })
                        .product();
                    mass * count as f64 * to_density
                })
                .sum::<f64>();
            (lhs - rhs).abs() / lhs.abs()
        })
        .collect();
    Ok(SubstitutionReport {
        max_density,
        bound: 2.0 * (n as f64).sqrt() / c,
        c,
        bin_width: width,
        pairs_checked: pairs,
        formula_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_maps() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let r = substitution_check(&|x: &[f64]| vec![2.0 * x[0]], 2.0, &g).unwrap();
        assert!((r.max_density - 0.5).abs() < 1e-12);
        assert!(r.formula_errors.iter().all(|e| *e < 0.01));
        let r = substitution_check(&|x: &[f64]| x.to_vec(), 1.0, &g).unwrap();
        assert!((r.max_density - 1.0).abs() < 1e-12 && r.bound == 2.0);
    }

    #[test]
    fn wrong_constant_names_the_pair() {
        let g = Grid::new(1, 64, 4.0).unwrap();
        match substitution_check(&|x: &[f64]| vec![x[0] + 0.25 * x[0].sin()], 0.9, &g) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("x = [")),
            other => panic!("{other:?}"),
        }
    }
}
