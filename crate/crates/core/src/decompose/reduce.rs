use std::f64::consts::PI;

use crate::cutoff::{bump, dot, norm};
use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::seminorm::fibonacci_sphere;

/// `phi(x, xi) = theta_l(x, xi) + <grad_xi phi(x, zeta_l), xi>` on each piece of
/// a covering of the sphere by caps of diameter `d`.
#[derive(Debug, Clone)]
pub struct ReducedPhase {
    pub phi: PhaseSpec,
    pub dim: usize,
    pub centers: Vec<Vec<f64>>,
    /// Cap radius: `Xi_l` vanishes where `|xi/|xi| - zeta_l| >= support_radius`.
    pub support_radius: f64,
    pub diameter: f64,
}

/// Largest cap diameter accepted by [`phase_reduce`].
pub const MAX_DIAMETER: f64 = 0.5;

pub fn phase_reduce(phi: &PhaseSpec, dim: usize, pieces: usize) -> Result<ReducedPhase> {
    if !phi.homogeneous {
        return Err(Error::Config("phase reduction needs a phase homogeneous of degree 1".into()));
    }
    let (centers, support_radius) = match dim {
        1 => (vec![vec![1.0], vec![-1.0]], 0.0),
        2 => {
            if pieces < 3 {
                return Err(Error::Config(format!("{pieces} pieces cannot cover the circle")));
            }
            let c = (0..pieces)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / pieces as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect();
            (c, 2.0 * (PI / pieces as f64).sin())
        }
        3 => {
            if pieces < 4 {
                return Err(Error::Config(format!("{pieces} pieces cannot cover the sphere")));
            }
            let c = fibonacci_sphere(pieces);
            let probes = fibonacci_sphere(20 * pieces);
            let cover = probes
                .iter()
                .map(|p| c.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            (c, 1.25 * cover)
        }
        _ => return Err(Error::Config(format!("phase reduction supports n in {{1, 2, 3}}, got {dim}"))),
    };
    let diameter = 2.0 * support_radius;
    if diameter > MAX_DIAMETER {
        return Err(Error::Config(format!(
            "{pieces} pieces give cap diameter {diameter:.4} > {MAX_DIAMETER}; use more pieces"
        )));
    }
    Ok(ReducedPhase { phi: phi.clone(), dim, centers, support_radius, diameter })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl ReducedPhase {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// `grad_xi phi(x, zeta_l)`.
    pub fn pivot(&self, l: usize, x: &[f64]) -> Vec<f64> {
        self.phi.grad_xi(x, &self.centers[l])
    }

    /// `theta_l(x, xi)`.
    pub fn theta(&self, l: usize, x: &[f64], xi: &[f64]) -> f64 {
        self.phi.eval(x, xi) - dot(&self.pivot(l, x), xi)
    }

    /// `grad_xi theta_l = grad_xi phi(x, xi) - grad_xi phi(x, zeta_l)`.
    pub fn grad_theta(&self, l: usize, x: &[f64], xi: &[f64]) -> Vec<f64> {
        let g = self.phi.grad_xi(x, xi);
        g.iter().zip(self.pivot(l, x)).map(|(a, b)| a - b).collect()
    }

    /// Cutoffs `Xi_l(xi)`, homogeneous of degree 0 and summing to one off 0.
    pub fn cutoffs(&self, xi: &[f64]) -> Vec<f64> {
        let r = norm(xi);
        let mut out = vec![0.0; self.len()];
        if r == 0.0 {
            return out;
        }
        if self.dim == 1 {
            out[if xi[0] > 0.0 { 0 } else { 1 }] = 1.0;
            return out;
        }
        let omega: Vec<f64> = xi.iter().map(|c| c / r).collect();
        let mut total = 0.0;
        for (o, c) in out.iter_mut().zip(&self.centers) {
            *o = bump(dist(&omega, c) / self.support_radius);
            total += *o;
        }
        out.iter_mut().for_each(|v| *v /= total);
        out
    }

    /// Largest `|theta_l + <pivot, xi> - phi|` over samples in the support of `Xi_l`.
    pub fn reconstruction_error(&self, xs: &[Vec<f64>], xis: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for x in xs {
            for xi in xis {
                for (l, w) in self.cutoffs(xi).into_iter().enumerate() {
                    if w > 0.0 {
                        let rebuilt = self.theta(l, x, xi) + dot(&self.pivot(l, x), xi);
                        let phi = self.phi.eval(x, xi);
                        worst = worst.max((rebuilt - phi).abs() / phi.abs().max(1.0));
                    }
                }
            }
        }
        worst
    }

    /// `sup |d_xi theta_l| / d` over samples in the support of `Xi_l`.
    pub fn smallness_constant(&self, xs: &[Vec<f64>], xis: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for x in xs {
            for xi in xis {
                for (l, w) in self.cutoffs(xi).into_iter().enumerate() {
                    if w > 0.0 {
                        let g = self.grad_theta(l, x, xi);
                        let m = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                        worst = worst.max(m);
                    }
                }
            }
        }
        if self.diameter == 0.0 {
            if worst == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            worst / self.diameter
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::RoughFactor;

    fn samples() -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let xs = vec![vec![0.0, 0.0], vec![1.5, -0.7], vec![-3.0, 2.0]];
        let xis = (0..720)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / 720.0;
                let r = 0.5 + (k % 7) as f64;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        (xs, xis)
    }

    #[test]
    fn linear_phase_has_zero_remainder() {
        let rp = phase_reduce(&PhaseSpec::linear(), 2, 32).unwrap();
        let (xs, xis) = samples();
        assert_eq!(rp.smallness_constant(&xs, &xis), 0.0);
        assert_eq!(rp.pivot(5, &[1.0, 2.0]), vec![1.0, 2.0]);
        assert_eq!(rp.theta(5, &[1.0, 2.0], &[0.3, 0.4]), 0.0);
    }

    #[test]
    fn wave_remainder_near_e1() {
        let rp = phase_reduce(&PhaseSpec::wave(1.0), 2, 32).unwrap();
        let xi = [1.0, 0.05];
        let th = rp.theta(0, &[0.3, 0.1], &xi);
        assert!((th - (norm(&xi) - xi[0])).abs() < 1e-15);
        let (xs, xis) = samples();
        assert!(rp.reconstruction_error(&xs, &xis) <= 1e-12);
        assert!(rp.smallness_constant(&xs, &xis) <= 1.0);
    }

    #[test]
    fn rough_time_scales_the_remainder() {
        let t = RoughFactor::Step { left: 0.5, right: 2.0, at: 0.0 };
        let rp = phase_reduce(&PhaseSpec::rough_wave(t), 2, 40).unwrap();
        let (xs, xis) = samples();
        assert!(rp.reconstruction_error(&xs, &xis) <= 1e-12);
        assert!(rp.smallness_constant(&xs, &xis) <= 2.0);
    }

    #[test]
    fn too_few_pieces() {
        assert!(matches!(phase_reduce(&PhaseSpec::wave(1.0), 2, 25), Err(Error::Config(_))));
        assert!(phase_reduce(&PhaseSpec::wave(1.0), 2, 26).is_ok());
        assert!(phase_reduce(&PhaseSpec::quadratic(), 2, 64).is_err());
    }
}
