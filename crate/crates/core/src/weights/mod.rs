//! Weights, Muckenhoupt constants, maximal functions, BMO and weighted norms.
//!
//! Every supremum over balls is a maximum over a finite [`BallFamily`] and so
//! a lower bound of the quantity it approximates.

mod ap;
mod balls;
mod maximal;
mod norms;

pub use ap::{ap_constant, ap_constant_a1, power_weight_class, ApReport, Trend};
pub use balls::{Ball, BallFamily};
pub use maximal::{maximal, maximal_at};
pub use norms::{bmo_norm, triebel_lizorkin_norm, truncated_log, weighted_norm, BmoReport};

use serde::Serialize;

use crate::cutoff::norm;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::special::{gauss_legendre, integrate};

const INV_E: f64 = 0.36787944117144233;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum WeightFamily {
    /// `|x|^alpha`.
    Power { alpha: f64 },
    /// `|x|^{-b}` on `|x| < 2`, zero outside.
    TruncatedPower { b: f64 },
    /// `log(1/|x|)` on `|x| < 1/e`, 1 outside.
    Log,
    /// One nonnegative value per cell of `grid`.
    Tabulated { grid: Grid, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weight {
    pub family: WeightFamily,
}

impl Weight {
    pub fn power(alpha: f64) -> Self {
        Self { family: WeightFamily::Power { alpha } }
    }

    pub fn unit() -> Self {
        Self::power(0.0)
    }

    pub fn truncated_power(b: f64) -> Self {
        Self { family: WeightFamily::TruncatedPower { b } }
    }

    pub fn log() -> Self {
        Self { family: WeightFamily::Log }
    }

    pub fn tabulated(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!("tabulated weight has {} values for {} cells", values.len(), grid.len())));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("tabulated weight value {v} is not a finite nonnegative number")));
        }
        Ok(Self { family: WeightFamily::Tabulated { grid, values } })
    }

    pub fn name(&self) -> String {
        match &self.family {
            WeightFamily::Power { alpha } => format!("power({alpha})"),
            WeightFamily::TruncatedPower { b } => format!("truncated_power({b})"),
            WeightFamily::Log => "log".into(),
            WeightFamily::Tabulated { .. } => "tabulated".into(),
        }
    }

    /// Radial profile `w(r)` for the radial families.
    fn radial(&self, r: f64) -> Option<f64> {
        match &self.family {
            WeightFamily::Power { alpha } => Some(if *alpha == 0.0 { 1.0 } else { r.powf(*alpha) }),
            WeightFamily::TruncatedPower { b } => Some(if r < 2.0 { r.powf(-*b) } else { 0.0 }),
            WeightFamily::Log => Some(if r < INV_E { -r.ln() } else { 1.0 }),
            WeightFamily::Tabulated { .. } => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.family {
            WeightFamily::Tabulated { grid, values } => {
                let m: Vec<usize> = x.iter().map(|&c| grid.axis_cell_of(c)).collect();
                values[grid.ravel(&m)]
            }
            _ => self.radial(norm(x)).unwrap_or(0.0),
        }
    }

    /// `w^s` with the conventions `0^s = inf` for `s < 0` and `w^0 = 1`.
    fn pow(v: f64, s: f64) -> f64 {
        if s == 0.0 {
            1.0
        } else if v == 0.0 {
            if s < 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            v.powf(s)
        }
    }

    /// `int_a^b w(x)^s dx` in one dimension. Integrals that diverge at the
    /// origin are taken over `|x| >= excision`.
    pub fn integral_1d(&self, s: f64, a: f64, b: f64, excision: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        if let WeightFamily::Tabulated { grid, values } = &self.family {
            let dx = grid.spacing();
            let mut total = 0.0;
            for (k, v) in values.iter().enumerate() {
                let lo = grid.axis_coord(k) - 0.5 * dx;
                let overlap = (b.min(lo + dx) - a.max(lo)).max(0.0);
                if overlap > 0.0 {
                    total += overlap * Self::pow(*v, s);
                }
            }
            return total;
        }
        let mut total = 0.0;
        if a < 0.0 {
            total += self.half_line(s, (-b).max(0.0), -a, excision);
        }
        if b > 0.0 {
            total += self.half_line(s, a.max(0.0), b, excision);
        }
        total
    }

    /// `int_lo^hi w(r)^s dr` for `0 <= lo < hi`.
    fn half_line(&self, s: f64, lo: f64, hi: f64, excision: f64) -> f64 {
        match &self.family {
            WeightFamily::Power { alpha } => power_integral(alpha * s, lo, hi, excision),
            WeightFamily::TruncatedPower { b } => {
                let inside = power_integral(-b * s, lo.min(2.0), hi.min(2.0), excision);
                if hi > 2.0 {
                    if s < 0.0 {
                        return f64::INFINITY;
                    }
                    if s == 0.0 {
                        return inside + hi - lo.max(2.0);
                    }
                }
                inside
            }
            WeightFamily::Log => {
                let outer = (hi - lo.max(INV_E)).max(0.0);
                let (a, b) = (lo.min(INV_E), hi.min(INV_E));
                if b <= a {
                    return outer;
                }
                // x = e^{-y}: int (-ln x)^s dx = int y^s e^{-y} dy
                let y_lo = -b.ln();
                let y_hi = if a == 0.0 { y_lo + 80.0 } else { -a.ln() };
                let panels = ((y_hi - y_lo) * 2.0).ceil().max(4.0) as usize;
                outer + integrate(|y| y.powf(s) * (-y).exp(), y_lo, y_hi, panels)
            }
            WeightFamily::Tabulated { .. } => unreachable!("tabulated weights integrate cellwise"),
        }
    }

    /// `int_cell w^s` for every cell of `grid`.
    pub fn cell_integrals(&self, grid: &Grid, s: f64) -> Vec<f64> {
        let n = grid.dim();
        let dx = grid.spacing();
        let excision = dx / 16.0;
        if let WeightFamily::Tabulated { grid: g, values } = &self.family {
            if g == grid {
                return values.iter().map(|v| Self::pow(*v, s) * grid.cell_volume()).collect();
            }
        }
        if n == 1 {
            return (0..grid.len())
                .map(|k| {
                    let c = grid.axis_coord(k);
                    self.integral_1d(s, c - 0.5 * dx, c + 0.5 * dx, excision)
                })
                .collect();
        }
        let (gx, gw) = gauss_legendre(4);
        let mut m = vec![0usize; n];
        (0..grid.len())
            .map(|idx| {
                grid.unravel(idx, &mut m);
                let lo: Vec<f64> = m.iter().map(|&k| grid.axis_coord(k) - 0.5 * dx).collect();
                let touches_origin = lo.iter().all(|&l| l == 0.0 || (l + dx).abs() < 1e-12 * dx);
                if touches_origin && n == 2 && self.radial(1.0).is_some() {
                    return self.origin_square(s, dx, excision);
                }
                // tensor Gauss-Legendre on the cell
                let mut total = 0.0;
                let mut q = vec![0usize; n];
                let count = gx.len().pow(n as u32);
                let mut x = vec![0.0; n];
                for t in 0..count {
                    let mut r = t;
                    let mut wprod = 1.0;
                    for d in 0..n {
                        q[d] = r % gx.len();
                        r /= gx.len();
                        x[d] = lo[d] + 0.5 * dx * (1.0 + gx[q[d]]);
                        wprod *= 0.5 * gw[q[d]];
                    }
                    total += wprod * Self::pow(self.eval(&x), s);
                }
                total * grid.cell_volume()
            })
            .collect()
    }

    /// `int w^s` over the square `[0, d]^2`, in polar coordinates about its
    /// corner at the origin.
    fn origin_square(&self, s: f64, d: f64, excision: f64) -> f64 {
        let (tx, tw) = gauss_legendre(16);
        let mut total = 0.0;
        // symmetric about the diagonal: twice the integral over theta in [0, pi/4]
        for (t, w) in tx.iter().zip(&tw) {
            let theta = std::f64::consts::FRAC_PI_8 * (1.0 + t);
            let rmax = d / theta.cos();
            let radial = match &self.family {
                WeightFamily::Power { alpha } => radial_moment(alpha * s, rmax, excision),
                WeightFamily::TruncatedPower { b } => radial_moment(-b * s, rmax.min(2.0), excision),
                _ => crate::special::integrate_graded(|r| r * Self::pow(self.radial(r).unwrap_or(0.0), s), 0.0, rmax),
            };
            total += w * std::f64::consts::FRAC_PI_8 * radial;
        }
        2.0 * total
    }

    /// `int_B w^s` over a ball; 1D radial weights integrate exactly, other
    /// cases sum cell integrals weighted by the cell's overlap fraction.
    pub fn ball_integral(&self, grid: &Grid, s: f64, ball: &Ball) -> f64 {
        if grid.dim() == 1 && !matches!(self.family, WeightFamily::Tabulated { .. }) {
            let c = ball.center[0];
            return self.integral_1d(s, c - ball.radius, c + ball.radius, grid.spacing() / 16.0);
        }
        let table = self.cell_integrals(grid, s);
        balls::overlap_sum(grid, ball, |k| table[k])
    }
}

/// `int_lo^hi r^beta dr`, excising `[0, excision)` when divergent at 0.
fn power_integral(beta: f64, lo: f64, hi: f64, excision: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let lo = if lo == 0.0 && beta <= -1.0 { excision.min(hi) } else { lo };
    if (beta + 1.0).abs() < 1e-14 {
        (hi / lo).ln()
    } else {
        (hi.powf(beta + 1.0) - lo.powf(beta + 1.0)) / (beta + 1.0)
    }
}

/// `int_0^R r^{beta + 1} dr`, excising `[0, excision)` when divergent at 0.
fn radial_moment(beta: f64, rmax: f64, excision: f64) -> f64 {
    power_integral(beta + 1.0, 0.0, rmax, excision)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_integrals_are_exact() {
        let w = Weight::power(-0.5);
        assert!((w.integral_1d(1.0, 0.0, 1.0, 0.0) - 2.0).abs() < 1e-15);
        assert!((w.integral_1d(1.0, -1.0, 1.0, 0.0) - 4.0).abs() < 1e-15);
        let w = Weight::power(-1.0);
        assert!((w.integral_1d(1.0, 0.0, 1.0, 1e-3) - 1e3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_weight_integral() {
        // int_0^{1/e} ln(1/x) dx = 2/e
        let w = Weight::log();
        assert!((w.integral_1d(1.0, 0.0, INV_E, 0.0) - 2.0 * INV_E).abs() < 1e-12);
        assert!((w.integral_1d(1.0, -1.0, 1.0, 0.0) - (4.0 * INV_E + 2.0 * (1.0 - INV_E))).abs() < 1e-12);
    }

    #[test]
    fn origin_square_matches_closed_form() {
        // int_{[0,1]^2} |x|^{-1} = 2 asinh(1)
        let w = Weight::power(-1.0);
        assert!((w.origin_square(1.0, 1.0, 0.0) - 2.0 * 1f64.asinh()).abs() < 1e-12);
    }

    #[test]
    fn cell_integrals_sum_to_box_integral() {
        let g = Grid::new(2, 32, 2.0).unwrap();
        let total: f64 = Weight::unit().cell_integrals(&g, 1.0).iter().sum();
        assert!((total - 16.0).abs() < 1e-12);
        let total: f64 = Weight::power(1.0).cell_integrals(&g, 2.0).iter().sum();
        // int over [-2,2]^2 of x^2 + y^2
        assert!((total - 2.0 * 16.0 * 4.0 / 3.0).abs() < 1e-10);
    }
}
