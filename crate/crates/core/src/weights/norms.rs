use rayon::prelude::*;
use serde::Serialize;

use super::{BallFamily, Trend, Weight};
use crate::decompose::DyadicPartition;
use crate::error::{Error, Result};
use crate::field::{SampledField, Side};
use crate::special::{integrate, integrate_graded};

/// `(sum_k |u_k|^p int_{cell k} w)^{1/p}`; `p = inf` gives `max |u|`.
pub fn weighted_norm(u: &SampledField, p: f64, w: &Weight) -> Result<f64> {
    if u.side() != Side::Physical {
        return Err(Error::Usage("weighted_norm needs a physical-side field".into()));
    }
    if p == f64::INFINITY {
        return Ok(u.max_abs());
    }
    if !(p >= 1.0) {
        return Err(Error::Config(format!("weighted_norm exponent {p} must be >= 1")));
    }
    let cells = w.cell_integrals(u.grid(), 1.0);
    let sum: f64 = u.values().iter().zip(&cells).map(|(v, c)| if *c == 0.0 { 0.0 } else { v.norm().powf(p) * c }).sum();
    Ok(sum.powf(1.0 / p))
}

/// `log(1/|x|)` on `|x| < 1/e`, 1 elsewhere.
pub fn truncated_log(x: &[f64]) -> f64 {
    let r = crate::cutoff::norm(x);
    if r < super::INV_E {
        -r.ln()
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BmoReport {
    /// Largest mean oscillation over the family; a lower bound for the norm.
    pub value: f64,
    /// `(radius, max mean oscillation over balls of that radius)`, radius increasing.
    pub by_radius: Vec<(f64, f64)>,
    pub trend: Trend,
}

/// `max_B (1/|B|) int_B |b - b_B|` over the family.
pub fn bmo_norm<F>(b: F, balls: &BallFamily) -> Result<BmoReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if balls.is_empty() {
        return Err(Error::Config("bmo_norm needs a nonempty ball family".into()));
    }
    let values: Vec<f64> = balls
        .balls
        .par_iter()
        .map(|ball| {
            if ball.center.len() == 1 {
                oscillation_1d(&b, ball.center[0], ball.radius)
            } else {
                oscillation_nd(&b, &ball.center, ball.radius)
            }
        })
        .collect();
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("mean oscillation {v} is not finite")));
    }
    let by_radius: Vec<(f64, f64)> = balls
        .radii()
        .into_iter()
        .map(|r| {
            let v = balls.balls.iter().zip(&values).filter(|(b, _)| b.radius == r).map(|(_, v)| *v).fold(0.0, f64::max);
            (r, v)
        })
        .collect();
    let value = values.iter().cloned().fold(0.0, f64::max);
    let trend = Trend::classify(&by_radius.iter().map(|x| x.1).collect::<Vec<_>>());
    Ok(BmoReport { value, by_radius, trend })
}

/// Integral over `[c - r, c + r]`, split at the origin and the centre, graded
/// toward the origin.
fn split_integral<G: Fn(f64) -> f64>(g: &G, c: f64, r: f64, extra: &[f64]) -> f64 {
    let mut cuts = vec![c - r, c, c + r];
    cuts.extend(extra.iter().filter(|t| (c - r..c + r).contains(*t)));
    if (c - r..c + r).contains(&0.0) && c != 0.0 {
        cuts.push(0.0);
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if a == 0.0 {
                integrate_graded(g, a, b)
            } else if b == 0.0 {
                integrate_graded(|t| g(-t), 0.0, -a)
            } else {
                integrate(g, a, b, 64)
            }
        })
        .sum()
}

fn oscillation_1d<F: Fn(&[f64]) -> f64>(b: &F, c: f64, r: f64) -> f64 {
    let f = |x: f64| b(&[x]);
    let mean = split_integral(&f, c, r, &[]) / (2.0 * r);
    let kinks = crossings(|x| f(x) - mean, c - r, c + r);
    let osc = |x: f64| (f(x) - mean).abs();
    split_integral(&osc, c, r, &kinks) / (2.0 * r)
}

/// Sign changes of `g` on a fine sample of `[a, b]`, refined by bisection.
fn crossings<G: Fn(f64) -> f64>(g: G, a: f64, b: f64) -> Vec<f64> {
    const SAMPLES: usize = 4096;
    let h = (b - a) / SAMPLES as f64;
    let mut out = Vec::new();
    let mut prev = g(a + 0.5 * h);
    for k in 1..SAMPLES {
        let t = a + (k as f64 + 0.5) * h;
        let cur = g(t);
        if prev != 0.0 && cur != 0.0 && (prev < 0.0) != (cur < 0.0) {
            let (mut lo, mut hi) = (t - h, t);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if (g(mid) < 0.0) == (prev < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    out
}

fn oscillation_nd<F: Fn(&[f64]) -> f64>(b: &F, center: &[f64], r: f64) -> f64 {
    const SUB: usize = 64;
    let n = center.len();
    let h = 2.0 * r / SUB as f64;
    let mut samples = Vec::new();
    let mut x = vec![0.0; n];
    for t in 0..SUB.pow(n as u32) {
        let mut rem = t;
        let mut d2 = 0.0;
        for d in 0..n {
            let off = -r + ((rem % SUB) as f64 + 0.5) * h;
            rem /= SUB;
            x[d] = center[d] + off;
            d2 += off * off;
        }
        if d2 <= r * r {
            samples.push(b(&x));
        }
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.iter().map(|v| (v - mean).abs()).sum::<f64>() / samples.len() as f64
}

/// `|| (sum_j |2^{js} chi_j(D) u|^q)^{1/q} ||_{L^p_w}` over `j = 0..=J`.
pub fn triebel_lizorkin_norm(u: &SampledField, s: f64, p: f64, q: f64, w: &Weight, dp: &DyadicPartition) -> Result<f64> {
    if p.is_infinite() || q.is_infinite() {
        return Err(Error::Usage("Triebel-Lizorkin norms need finite p and q".into()));
    }
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::Config(format!("Triebel-Lizorkin exponents p={p}, q={q} must be >= 1")));
    }
    let mut acc = vec![0.0; u.grid().len()];
    for j in 0..dp.len() {
        let piece = dp.project(u, j)?;
        let scale = 2f64.powf(j as f64 * s);
        for (a, v) in acc.iter_mut().zip(piece.values()) {
            *a += (scale * v.norm()).powf(q);
        }
    }
    let g = SampledField::from_physical_real(u.grid().clone(), |_| 0.0);
    let values = acc.into_iter().map(|a| num_complex::Complex64::new(a.powf(1.0 / q), 0.0)).collect();
    let g = SampledField::new(g.grid().clone(), values, Side::Physical)?;
    weighted_norm(&g, p, w)
}
