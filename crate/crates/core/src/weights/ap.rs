use rayon::prelude::*;
use serde::Serialize;

use super::balls::{candidate_cells, grid_volume, overlap_fraction, overlap_sum};
use super::{Ball, BallFamily, Weight, WeightFamily};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Behaviour of the origin-centred constants as the radius grows past `dx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    /// At least three consecutive dyadic ratios of 1.05 or more.
    Diverging,
    /// Largest over smallest value at most 1.5.
    Stable,
    Inconclusive,
}

impl Trend {
    pub fn classify(values: &[f64]) -> Trend {
        if values.iter().any(|v| v.is_infinite()) {
            return Trend::Diverging;
        }
        let mut run = 0;
        for w in values.windows(2) {
            if w[1] >= 1.05 * w[0] {
                run += 1;
                if run >= 3 {
                    return Trend::Diverging;
                }
            } else {
                run = 0;
            }
        }
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        if !values.is_empty() && max <= 1.5 * min {
            Trend::Stable
        } else {
            Trend::Inconclusive
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApReport {
    /// Maximum over the family; a lower bound for the true constant.
    pub value: f64,
    /// `(radius, max over balls of that radius)`, radius increasing.
    pub by_radius: Vec<(f64, f64)>,
    /// `(radius, value)` for origin-centred balls with radius at least `dx`.
    pub origin: Vec<(f64, f64)>,
    pub trend: Trend,
}

/// Analytic membership of `|x|^alpha` in `A_p(R^n)`.
pub fn power_weight_class(alpha: f64, p: f64, n: usize) -> bool {
    let n = n as f64;
    if p == 1.0 {
        -n < alpha && alpha <= 0.0
    } else if p > 1.0 {
        -n < alpha && alpha < n * (p - 1.0)
    } else {
        false
    }
}

struct BallAverages<'a> {
    w: &'a Weight,
    grid: &'a Grid,
    exact_1d: bool,
}

impl BallAverages<'_> {
    fn new<'a>(w: &'a Weight, grid: &'a Grid) -> BallAverages<'a> {
        let exact_1d = grid.dim() == 1 && !matches!(w.family, WeightFamily::Tabulated { .. });
        BallAverages { w, grid, exact_1d }
    }

    fn tables(&self, powers: &[f64]) -> Vec<Vec<f64>> {
        if self.exact_1d {
            Vec::new()
        } else {
            powers.iter().map(|&s| self.w.cell_integrals(self.grid, s)).collect()
        }
    }

    /// `(|B|, int_B w^s for each s)`.
    fn integrals(&self, ball: &Ball, powers: &[f64], tables: &[Vec<f64>]) -> (f64, Vec<f64>) {
        if self.exact_1d {
            let c = ball.center[0];
            let eps = self.grid.spacing() / 16.0;
            let ints = powers.iter().map(|&s| self.w.integral_1d(s, c - ball.radius, c + ball.radius, eps)).collect();
            (2.0 * ball.radius, ints)
        } else {
            let ints = tables.iter().map(|t| overlap_sum(self.grid, ball, |k| t[k])).collect();
            (grid_volume(self.grid, ball), ints)
        }
    }
}

fn summarize(balls: &BallFamily, values: &[f64], grid: &Grid) -> ApReport {
    let value = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut by_radius: Vec<(f64, f64)> = Vec::new();
    for r in balls.radii() {
        let v = balls
            .balls
            .iter()
            .zip(values)
            .filter(|(b, _)| b.radius == r)
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        by_radius.push((r, v));
    }
    let mut origin: Vec<(f64, f64)> = balls
        .balls
        .iter()
        .zip(values)
        .filter(|(b, _)| b.center.iter().all(|&c| c == 0.0) && b.radius >= grid.spacing() * (1.0 - 1e-12))
        .map(|(b, v)| (b.radius, *v))
        .collect();
    origin.sort_by(|a, b| a.0.total_cmp(&b.0));
    origin.dedup_by(|a, b| a.0 == b.0);
    let trend = Trend::classify(&origin.iter().map(|o| o.1).collect::<Vec<_>>());
    ApReport { value, by_radius, origin, trend }
}

/// `max_B w_B (w^{-1/(p-1)})_B^{p-1}` over the family.
pub fn ap_constant(w: &Weight, p: f64, balls: &BallFamily, grid: &Grid) -> Result<ApReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Usage(format!("ap_constant needs 1 < p < inf, got {p}; use ap_constant_a1 for p = 1")));
    }
    if balls.is_empty() {
        return Err(Error::Config("empty ball family".into()));
    }
    let powers = [1.0, -1.0 / (p - 1.0)];
    let avg = BallAverages::new(w, grid);
    let tables = avg.tables(&powers);
    let values: Vec<f64> = balls
        .balls
        .par_iter()
        .map(|b| {
            let (vol, ints) = avg.integrals(b, &powers, &tables);
            if vol <= 0.0 {
                return f64::NEG_INFINITY;
            }
            (ints[0] / vol) * (ints[1] / vol).powf(p - 1.0)
        })
        .collect();
    Ok(summarize(balls, &values, grid))
}

/// `max_B w_B / ess inf_B w`, the infimum taken over cell averages.
pub fn ap_constant_a1(w: &Weight, balls: &BallFamily, grid: &Grid) -> Result<ApReport> {
    if balls.is_empty() {
        return Err(Error::Config("empty ball family".into()));
    }
    let avg = BallAverages::new(w, grid);
    let tables = avg.tables(&[1.0]);
    let cells = w.cell_integrals(grid, 1.0);
    let vol = grid.cell_volume();
    let values: Vec<f64> = balls
        .balls
        .par_iter()
        .map(|b| {
            let (bv, ints) = avg.integrals(b, &[1.0], &tables);
            let mut m = vec![0usize; grid.dim()];
            let inf = candidate_cells(grid, b)
                .into_iter()
                .filter(|&k| {
                    grid.unravel(k, &mut m);
                    overlap_fraction(grid, &m, b) > 0.0
                })
                .map(|k| cells[k] / vol)
                .fold(f64::INFINITY, f64::min);
            if bv <= 0.0 || !inf.is_finite() {
                return f64::NEG_INFINITY;
            }
            if inf == 0.0 {
                return f64::INFINITY;
            }
            (ints[0] / bv) / inf
        })
        .collect();
    Ok(summarize(balls, &values, grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_examples() {
        assert!(power_weight_class(-0.5, 2.0, 1));
        assert!(!power_weight_class(1.5, 2.0, 1));
        assert!(power_weight_class(0.0, 7.0, 3));
        assert!(power_weight_class(0.0, 1.0, 1));
        assert!(!power_weight_class(0.5, 1.0, 1));
    }

    #[test]
    fn constant_weight_is_one() {
        let g = Grid::new(1, 256, 16.0).unwrap();
        let fam = BallFamily::default_for(&g).unwrap();
        let r = ap_constant(&Weight::unit(), 2.0, &fam, &g).unwrap();
        assert_eq!(r.value, 1.0);
        let g2 = Grid::new(2, 32, 4.0).unwrap();
        let fam2 = BallFamily::dyadic(&g2, 2.0, 4, 1.0).unwrap();
        let r2 = ap_constant(&Weight::unit(), 2.0, &fam2, &g2).unwrap();
        assert!((r2.value - 1.0).abs() < 1e-12);
        assert!(ap_constant(&Weight::unit(), 1.0, &fam, &g).is_err());
    }

    #[test]
    fn inverse_square_root_weight_is_stable() {
        // origin balls: 2 r^{-1/2} * r^{1/2} / (3/2) = 4/3 at every radius
        let g = Grid::new(1, 1024, 16.0).unwrap();
        let fam = BallFamily::default_for(&g).unwrap();
        let r = ap_constant(&Weight::power(-0.5), 2.0, &fam, &g).unwrap();
        assert_eq!(r.trend, Trend::Stable);
        for (_, v) in &r.origin {
            assert!((v - 4.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_class_weight_diverges() {
        let g = Grid::new(1, 1024, 16.0).unwrap();
        let fam = BallFamily::default_for(&g).unwrap();
        let r = ap_constant(&Weight::power(1.5), 2.0, &fam, &g).unwrap();
        assert_eq!(r.trend, Trend::Diverging);
    }

    #[test]
    fn a1_of_log_weight_is_bounded() {
        let g = Grid::new(1, 1024, 16.0).unwrap();
        let fam = BallFamily::default_for(&g).unwrap();
        let r = ap_constant_a1(&Weight::log(), &fam, &g).unwrap();
        assert!(r.value.is_finite() && r.value >= 1.0);
        let r = ap_constant_a1(&Weight::power(0.5), &fam, &g).unwrap();
        assert_ne!(r.trend, Trend::Stable);
    }
}
