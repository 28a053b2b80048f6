use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cutoff::{annulus, bump, dot, norm};
use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::seminorm::{central_partial, fibonacci_sphere, multi_indices};
use crate::symbol::{SymbolFamily, SymbolSpec};

/// Conic partition of frequency space at scale `h`.
///
/// Centers are `sqrt(h)`-separated unit vectors covering the sphere within
/// `sqrt(h)`; `psi^nu` is `bump(|omega - xi^nu| / sqrt(h))` normalised by the
/// sum over all centers (`omega = xi / |xi|`), so the functions are
/// homogeneous of degree 0 and sum to one off the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeFrame {
    pub h: f64,
    pub dim: usize,
    pub centers: Vec<Vec<f64>>,
}

/// Bounds `c1 <= J h^{(n-1)/2} <= c2` met by every frame this module builds.
///
/// In 3D they follow from cap areas: caps of chord radius `sqrt(h)` cover the
/// sphere and caps of chord radius `sqrt(h)/2` are disjoint.
pub fn cardinality_bounds(n: usize) -> (f64, f64) {
    match n {
        1 => (2.0, 2.0),
        2 => (0.5, 8.0),
        _ => (4.0, 16.0),
    }
}

pub fn sss_frame(h: f64, n: usize) -> Result<ConeFrame> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::Config(format!("cone scale h = {h} must lie in (0, 1]")));
    }
    let sep = h.sqrt();
    let centers = match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            // most centers whose neighbouring chord 2 sin(pi/J) is still >= sqrt(h)
            let mut j = 3usize;
            while 2.0 * (PI / (j + 1) as f64).sin() >= sep {
                j += 1;
            }
            (0..j)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / j as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        }
        3 => {
            let lattice = fibonacci_sphere((400.0 / h).ceil() as usize);
            let mut chosen: Vec<Vec<f64>> = Vec::new();
            for p in lattice {
                if chosen.iter().all(|c| dist(c, &p) >= sep) {
                    chosen.push(p);
                }
            }
            chosen
        }
        _ => return Err(Error::Config(format!("cone frames exist for n in {{1, 2, 3}}, got {n}"))),
    };
    Ok(ConeFrame { h, dim: n, centers })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl ConeFrame {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// `J h^{(n-1)/2}`.
    pub fn cardinality_ratio(&self) -> f64 {
        self.len() as f64 * self.h.powf((self.dim as f64 - 1.0) / 2.0)
    }

    /// All `psi^nu(xi)`; zero vector at `xi = 0`.
    pub fn psi_all(&self, xi: &[f64]) -> Vec<f64> {
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
        let s = self.h.sqrt();
        let mut total = 0.0;
        for (o, c) in out.iter_mut().zip(&self.centers) {
            *o = bump(dist(&omega, c) / s);
            total += *o;
        }
        out.iter_mut().for_each(|v| *v /= total);
        out
    }

    pub fn psi(&self, nu: usize, xi: &[f64]) -> f64 {
        self.psi_all(xi)[nu]
    }

    /// Whether `xi` lies in the cone `|xi/|xi| - xi^nu| <= sqrt(h)`.
    pub fn in_cone(&self, nu: usize, xi: &[f64]) -> bool {
        let r = norm(xi);
        if r == 0.0 {
            return false;
        }
        let omega: Vec<f64> = xi.iter().map(|c| c / r).collect();
        dist(&omega, &self.centers[nu]) <= self.h.sqrt()
    }

    /// Smallest pairwise distance between centers.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.centers.iter().enumerate() {
            for b in &self.centers[i + 1..] {
                best = best.min(dist(a, b));
            }
        }
        best
    }

    /// Largest distance from a probe direction to its nearest center.
    pub fn covering_radius(&self, probes: &[Vec<f64>]) -> f64 {
        probes
            .iter()
            .map(|p| self.centers.iter().map(|c| dist(c, p)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }

    /// Unit vectors orthogonal to `xi^nu` completing an orthonormal frame.
    pub fn orthogonal_frame(&self, nu: usize) -> Vec<Vec<f64>> {
        let c = &self.centers[nu];
        match self.dim {
            1 => vec![],
            2 => vec![vec![-c[1], c[0]]],
            _ => {
                let helper = if c[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                let d = dot(&helper, c);
                let mut e1: Vec<f64> = helper.iter().zip(c).map(|(h, v)| h - d * v).collect();
                let n1 = norm(&e1);
                e1.iter_mut().for_each(|v| *v /= n1);
                let e2 = vec![c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]];
                vec![e1, e2]
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "h": self.h, "dim": self.dim, "J": self.len(), "centers": self.centers })
    }
}

/// `b^nu(x, xi, h) = e^{(i/h) <grad phi(x,xi) - grad phi(x,xi^nu), xi>} chi(xi) psi^nu(xi) a(x, xi/h)`
/// with `chi` the unit annulus cutoff.
pub fn sss_symbol(a: &SymbolSpec, phi: &PhaseSpec, frame: &ConeFrame, nu: usize, h: f64) -> Result<SymbolSpec> {
    if nu >= frame.len() {
        return Err(Error::Usage(format!("cone index {nu} out of range 0..{}", frame.len())));
    }
    let (a, phi, frame) = (a.clone(), phi.clone(), frame.clone());
    let center = frame.centers[nu].clone();
    let order = a.order;
    let rough = a.rough_in_x || phi.class.rough_in_x;
    let rule = move |x: &[f64], xi: &[f64]| -> Complex64 {
        let chi = annulus(norm(xi));
        if chi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let p = frame.psi(nu, xi);
        if p == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let g = phi.grad_xi(x, xi);
        let g0 = phi.grad_xi(x, &center);
        let arg: f64 = g.iter().zip(&g0).zip(xi).map(|((a, b), c)| (a - b) * c).sum::<f64>() / h;
        let scaled: Vec<f64> = xi.iter().map(|c| c / h).collect();
        Complex64::from_polar(chi * p, arg) * a.eval(x, &scaled)
    };
    Ok(SymbolSpec {
        order,
        rough_in_x: rough,
        x_smoothness: 0,
        family: SymbolFamily::Custom { rule: Arc::new(rule), x_independent: false, name: format!("sss_piece_{nu}") },
    })
}

/// One row of [`sss_symbol_diagnostics`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeDerivativeBound {
    /// Derivative counts along `(xi^nu, e_1, ..)` of the adapted frame.
    pub alpha: Vec<usize>,
    pub sup: f64,
    /// `-m - |alpha|(1 - rho) - |alpha'|/2`.
    pub exponent: f64,
    /// `sup / h^{exponent}`.
    pub constant: f64,
}

/// Sampled sup of adapted-frame derivatives of `b` over the annulus piece of
/// cone `nu`, against `h^{-m - |alpha|(1-rho) - |alpha'|/2}`.
pub fn sss_symbol_diagnostics(
    b: &SymbolSpec,
    frame: &ConeFrame,
    nu: usize,
    h: f64,
    x_samples: &[Vec<f64>],
    max_order: usize,
) -> Result<Vec<ConeDerivativeBound>> {
    if nu >= frame.len() {
        return Err(Error::Usage(format!("cone index {nu} out of range 0..{}", frame.len())));
    }
    let n = frame.dim;
    let mut axes = vec![frame.centers[nu].clone()];
    axes.extend(frame.orthogonal_frame(nu));
    // samples: radii across the annulus, angles across the cone
    let mut points = Vec::new();
    let s = h.sqrt();
    for ir in 0..9 {
        let r = 0.5 + 1.5 * ir as f64 / 8.0;
        if n == 1 {
            points.push(vec![r * frame.centers[nu][0]]);
            continue;
        }
        for ia in 0..17 {
            let t = -s + 2.0 * s * ia as f64 / 16.0;
            for e in axes.iter().skip(1) {
                let v: Vec<f64> = (0..n).map(|k| r * (axes[0][k] + t * e[k])).collect();
                points.push(v);
            }
        }
    }
    let (m, rho) = (b.order.m, b.order.rho);
    let mut out = Vec::new();
    for order in 0..=max_order {
        for alpha in multi_indices(n, order) {
            let prime: usize = alpha.iter().skip(1).sum();
            let mut sup: f64 = 0.0;
            for x in x_samples {
                for p in &points {
                    // coordinates in the adapted frame
                    let coords: Vec<f64> = axes.iter().map(|e| dot(e, p)).collect();
                    let f = |c: &[f64]| {
                        let xi: Vec<f64> = (0..n).map(|k| axes.iter().zip(c).map(|(e, ck)| e[k] * ck).sum()).collect();
                        b.eval(x, &xi)
                    };
                    let steps = vec![0.02 * s; n];
                    sup = sup.max(central_partial(f, &coords, &alpha, &steps).norm());
                }
            }
            let exponent = -m - order as f64 * (1.0 - rho) - prime as f64 / 2.0;
            out.push(ConeDerivativeBound { alpha, sup, exponent, constant: sup / h.powf(exponent) });
        }
    }
    Ok(out)
}

/// Measured `C_alpha = sup |d^alpha psi^nu| h^{|alpha|/2}` over the unit
/// sphere (maximised over `nu`), plus the sup of the derivative along
/// `xi^nu` on its own cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiBounds {
    pub constants: Vec<(Vec<usize>, f64)>,
    pub radial_sup: f64,
}

pub fn psi_derivative_bounds(frame: &ConeFrame, max_order: usize) -> PsiBounds {
    let n = frame.dim;
    let probes = match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..2000)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / 2000.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => fibonacci_sphere(4000),
    };
    let step_scale = frame.h.sqrt() * 0.05;
    let mut constants = Vec::new();
    for order in 1..=max_order {
        for alpha in multi_indices(n, order) {
            let steps = vec![step_scale; n];
            let mut sup: f64 = 0.0;
            for p in &probes {
                for nu in 0..frame.len() {
                    let d = central_partial(|xi: &[f64]| Complex64::new(frame.psi(nu, xi), 0.0), p, &alpha, &steps);
                    sup = sup.max(d.norm());
                }
            }
            constants.push((alpha, sup * frame.h.powf(order as f64 / 2.0)));
        }
    }
    let mut radial_sup: f64 = 0.0;
    for nu in 0..frame.len() {
        let c = &frame.centers[nu];
        for p in probes.iter().filter(|p| frame.in_cone(nu, p)) {
            let f = |t: &[f64]| {
                let xi: Vec<f64> = p.iter().zip(c).map(|(a, b)| a + t[0] * b).collect();
                Complex64::new(frame.psi(nu, &xi), 0.0)
            };
            radial_sup = radial_sup.max(central_partial(f, &[0.0], &[1], &[step_scale]).norm());
        }
    }
    PsiBounds { constants, radial_sup }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(k: usize) -> Vec<Vec<f64>> {
        (0..k)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.37) / k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect()
    }

    #[test]
    fn planar_frames() {
        for (h, lo, hi) in [(1.0, 1, 8), (1.0 / 16.0, 12, 50)] {
            let f = sss_frame(h, 2).unwrap();
            assert!(f.len() >= lo && f.len() <= hi, "h={h}: J={}", f.len());
            assert!(f.min_separation() >= h.sqrt() - 1e-12);
            assert!(f.covering_radius(&circle(10_000)) <= h.sqrt());
        }
        assert_eq!(sss_frame(1.0 / 16.0, 2).unwrap().len(), 25);
    }

    #[test]
    fn line_frame_has_two_cones() {
        let f = sss_frame(0.1, 1).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.psi_all(&[3.0]), vec![1.0, 0.0]);
        assert_eq!(f.psi_all(&[-0.2]), vec![0.0, 1.0]);
    }

    #[test]
    fn sphere_frame_is_separated_and_covering() {
        let f = sss_frame(0.25, 3).unwrap();
        let ratio = f.cardinality_ratio();
        let (c1, c2) = cardinality_bounds(3);
        assert!(ratio >= c1 && ratio <= c2, "{ratio}");
        assert!(f.min_separation() >= 0.5 - 1e-12);
        assert!(f.covering_radius(&fibonacci_sphere(5000)) <= 0.5 + 0.02);
    }

    #[test]
    fn partition_sums_to_one() {
        let f = sss_frame(1.0 / 64.0, 2).unwrap();
        for p in circle(997) {
            let xi: Vec<f64> = p.iter().map(|c| 3.7 * c).collect();
            let s: f64 = f.psi_all(&xi).iter().sum();
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn linear_phase_pivot_is_trivial() {
        let f = sss_frame(1.0 / 16.0, 2).unwrap();
        let a = SymbolSpec::one();
        let b = sss_symbol(&a, &PhaseSpec::linear(), &f, 3, 1.0 / 16.0).unwrap();
        let xi = [f.centers[3][0] * 1.2, f.centers[3][1] * 1.2];
        let expect = annulus(1.2) * f.psi(3, &xi);
        let v = b.eval(&[0.4, -2.0], &xi);
        assert!((v.re - expect).abs() < 1e-15 && v.im == 0.0);
        assert!(sss_symbol(&a, &PhaseSpec::linear(), &f, 99, 0.1).is_err());
    }
}
