use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Euclidean volume of the ball.
    pub fn volume(&self) -> f64 {
        let n = self.center.len() as f64;
        std::f64::consts::PI.powf(n / 2.0) / crate::special::gamma(n / 2.0 + 1.0) * self.radius.powf(n)
    }
}

/// A finite set of balls together with the rule that generated it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
    pub rule: String,
}

impl BallFamily {
    pub fn new(balls: Vec<Ball>, rule: impl Into<String>) -> Result<Self> {
        if let Some(b) = balls.iter().find(|b| !(b.radius > 0.0 && b.radius.is_finite())) {
            return Err(Error::Config(format!("ball radius {} is not positive", b.radius)));
        }
        if let Some(b) = balls.windows(2).find(|w| w[0].center.len() != w[1].center.len()) {
            return Err(Error::Config(format!("ball centres of mixed dimension {}", b[1].center.len())));
        }
        Ok(Self { balls, rule: rule.into() })
    }

    /// Dyadic radii `2^{-k} r_max`, `k = 0..levels`, all centred at the origin.
    pub fn dyadic_at_origin(n: usize, r_max: f64, levels: usize) -> Result<Self> {
        let balls = (0..levels).map(|k| Ball::new(vec![0.0; n], r_max * 0.5f64.powi(k as i32))).collect();
        Self::new(balls, format!("origin, radii {r_max}*2^-k for k < {levels}"))
    }

    /// Dyadic radii `2^{-k} r_max`, `k = 0..levels`, centred on the lattice
    /// `spacing * Z^n` inside the grid box and at the origin.
    pub fn dyadic(grid: &Grid, r_max: f64, levels: usize, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::Config(format!("centre spacing {spacing} is not positive")));
        }
        let n = grid.dim();
        let half = grid.half_width();
        let per_axis = (half / spacing).floor() as i64;
        let axis: Vec<f64> = (-per_axis..=per_axis).map(|k| k as f64 * spacing).filter(|c| c.abs() < half).collect();
        let mut centers: Vec<Vec<f64>> = vec![vec![]];
        for _ in 0..n {
            centers = centers
                .into_iter()
                .flat_map(|c| {
                    axis.iter().map(move |&a| {
                        let mut c = c.clone();
                        c.push(a);
                        c
                    })
                })
                .collect();
        }
        if !centers.iter().any(|c| c.iter().all(|&v| v == 0.0)) {
            centers.push(vec![0.0; n]);
        }
        let mut balls = Vec::with_capacity(centers.len() * levels);
        for c in &centers {
            for k in 0..levels {
                balls.push(Ball::new(c.clone(), r_max * 0.5f64.powi(k as i32)));
            }
        }
        Self::new(balls, format!("lattice {spacing}Z^{n} plus origin, radii {r_max}*2^-k for k < {levels}"))
    }

    /// Radii `2^{-8}..2^3` on the unit lattice plus the origin.
    pub fn default_for(grid: &Grid) -> Result<Self> {
        Self::dyadic(grid, 8.0, 12, 1.0)
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Distinct radii in increasing order.
    pub fn radii(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.balls.iter().map(|b| b.radius).collect();
        r.sort_by(|a, b| a.total_cmp(b));
        r.dedup();
        r
    }

    pub fn union(&self, other: &BallFamily) -> BallFamily {
        let mut balls = self.balls.clone();
        balls.extend(other.balls.iter().cloned());
        BallFamily { balls, rule: format!("{} + {}", self.rule, other.rule) }
    }
}

/// Fraction of the cell at multi-index `m` covered by `ball`.
pub(crate) fn overlap_fraction(grid: &Grid, m: &[usize], ball: &Ball) -> f64 {
    let dx = grid.spacing();
    let n = grid.dim();
    let r = ball.radius;
    if n == 1 {
        let lo = grid.axis_coord(m[0]) - 0.5 * dx;
        let c = ball.center[0];
        return ((c + r).min(lo + dx) - (c - r).max(lo)).max(0.0) / dx;
    }
    let mut near = 0.0;
    let mut far = 0.0;
    for d in 0..n {
        let lo = grid.axis_coord(m[d]) - 0.5 * dx - ball.center[d];
        let hi = lo + dx;
        let nd = if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            -hi
        } else {
            0.0
        };
        near += nd * nd;
        let fd = lo.abs().max(hi.abs());
        far += fd * fd;
    }
    if near >= r * r {
        return 0.0;
    }
    if far <= r * r {
        return 1.0;
    }
    const SUB: usize = 8;
    let count = SUB.pow(n as u32);
    let mut inside = 0usize;
    for t in 0..count {
        let mut rem = t;
        let mut d2 = 0.0;
        for d in 0..n {
            let q = rem % SUB;
            rem /= SUB;
            let x = grid.axis_coord(m[d]) - 0.5 * dx + (q as f64 + 0.5) * dx / SUB as f64 - ball.center[d];
            d2 += x * x;
        }
        if d2 <= r * r {
            inside += 1;
        }
    }
    inside as f64 / count as f64
}

/// Cell indices whose cells may meet `ball`.
pub(crate) fn candidate_cells(grid: &Grid, ball: &Ball) -> Vec<usize> {
    let n = grid.dim();
    let big = grid.points_per_axis();
    let dx = grid.spacing();
    let ranges: Vec<(usize, usize)> = (0..n)
        .map(|d| {
            let lo = ((ball.center[d] - ball.radius + grid.half_width()) / dx).floor().max(0.0) as usize;
            let hi = (((ball.center[d] + ball.radius + grid.half_width()) / dx).ceil().max(0.0) as usize).min(big);
            (lo.min(big), hi)
        })
        .collect();
    if ranges.iter().any(|(lo, hi)| lo >= hi) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut m: Vec<usize> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(grid.ravel(&m));
        let mut d = 0;
        loop {
            if d == n {
                return out;
            }
            m[d] += 1;
            if m[d] < ranges[d].1 {
                break;
            }
            m[d] = ranges[d].0;
            d += 1;
        }
    }
}

/// `sum_k frac_k * value(k)` over cells meeting `ball`.
pub(crate) fn overlap_sum<F: Fn(usize) -> f64>(grid: &Grid, ball: &Ball, value: F) -> f64 {
    let mut m = vec![0usize; grid.dim()];
    let mut total = 0.0;
    for k in candidate_cells(grid, ball) {
        grid.unravel(k, &mut m);
        let f = overlap_fraction(grid, &m, ball);
        if f > 0.0 {
            total += f * value(k);
        }
    }
    total
}

/// Grid measure of `ball`: the overlap-weighted cell volume, clipped to the box.
pub(crate) fn grid_volume(grid: &Grid, ball: &Ball) -> f64 {
    overlap_sum(grid, ball, |_| grid.cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_measures_approximate_ball_volume() {
        let g = Grid::new(2, 64, 4.0).unwrap();
        let b = Ball::new(vec![0.3, -0.2], 1.7);
        let v = grid_volume(&g, &b);
        assert!((v / b.volume() - 1.0).abs() < 2e-3, "{v}");
        let g1 = Grid::new(1, 64, 4.0).unwrap();
        let b1 = Ball::new(vec![0.37], 1.1);
        assert!((grid_volume(&g1, &b1) - 2.2).abs() < 1e-12);
    }

    #[test]
    fn family_generation_is_deterministic() {
        let g = Grid::new(1, 64, 4.0).unwrap();
        let a = BallFamily::default_for(&g).unwrap();
        let b = BallFamily::default_for(&g).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.radii().len(), 12);
        assert!(a.balls.iter().any(|b| b.center == vec![0.0] && b.radius == 0.5f64.powi(8)));
        assert!(BallFamily::new(vec![Ball::new(vec![0.0], 0.0)], "bad").is_err());
    }
}
