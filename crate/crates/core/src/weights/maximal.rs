use num_complex::Complex64;
use rayon::prelude::*;

use super::balls::{grid_volume, overlap_sum};
use super::{Ball, BallFamily};
use crate::error::{Error, Result};
use crate::field::{SampledField, Side};

/// Centred `L^p` maximal function over the radii of `balls`. Balls are
/// restricted to the grid box, so constants are fixed points.
pub fn maximal(u: &SampledField, balls: &BallFamily, p_exp: f64) -> Result<SampledField> {
    let ctx = Context::new(u, balls, p_exp)?;
    let grid = u.grid();
    let values: Vec<Complex64> =
        (0..grid.len()).into_par_iter().map(|k| Complex64::new(ctx.at(&grid.point(k)), 0.0)).collect();
    SampledField::new(grid.clone(), values, Side::Physical)
}

/// The same supremum evaluated at an arbitrary point `x`.
pub fn maximal_at(u: &SampledField, balls: &BallFamily, x: &[f64], p_exp: f64) -> Result<f64> {
    if x.len() != u.grid().dim() {
        return Err(Error::Config(format!("point of dimension {} on a {}-dimensional grid", x.len(), u.grid().dim())));
    }
    Ok(Context::new(u, balls, p_exp)?.at(x))
}

struct Context<'a> {
    u: &'a SampledField,
    radii: Vec<f64>,
    p: f64,
    powered: Vec<f64>,
    /// Running integral of `|u|^p` at the left edge of each cell (1D only).
    cumulative: Vec<f64>,
}

impl<'a> Context<'a> {
    fn new(u: &'a SampledField, balls: &BallFamily, p: f64) -> Result<Self> {
        if u.side() != Side::Physical {
            return Err(Error::Usage("maximal needs a physical-side field".into()));
        }
        if balls.is_empty() {
            return Err(Error::Config("maximal needs a nonempty ball family".into()));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Config(format!("maximal exponent {p} must be a finite number >= 1")));
        }
        let powered: Vec<f64> = u.values().iter().map(|v| v.norm().powf(p)).collect();
        let mut cumulative = Vec::new();
        if u.grid().dim() == 1 {
            let dx = u.grid().spacing();
            cumulative.push(0.0);
            for v in &powered {
                cumulative.push(cumulative.last().unwrap() + v * dx);
            }
        }
        Ok(Self { u, radii: balls.radii(), p, powered, cumulative })
    }

    /// `int_{-L}^{t} |u|^p` for the piecewise-constant field.
    fn primitive(&self, t: f64) -> f64 {
        let g = self.u.grid();
        let dx = g.spacing();
        let s = ((t + g.half_width()) / dx).clamp(0.0, g.points_per_axis() as f64);
        let k = (s.floor() as usize).min(g.points_per_axis() - 1);
        self.cumulative[k] + (s - k as f64) * self.powered[k] * dx
    }

    fn at(&self, x: &[f64]) -> f64 {
        let g = self.u.grid();
        let half = g.half_width();
        let mut best = 0.0f64;
        for &r in &self.radii {
            let avg = if g.dim() == 1 {
                let (a, b) = ((x[0] - r).max(-half), (x[0] + r).min(half));
                if b <= a {
                    continue;
                }
                (self.primitive(b) - self.primitive(a)) / (b - a)
            } else {
                let ball = Ball::new(x.to_vec(), r);
                let vol = grid_volume(g, &ball);
                if vol <= 0.0 {
                    continue;
                }
                overlap_sum(g, &ball, |k| self.powered[k] * g.cell_volume()) / vol
            };
            best = best.max(avg);
        }
        best.powf(1.0 / self.p)
    }
}
