//! Phase functions `phi(x, xi)` and their declared classes.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cutoff::{dot, norm};
use crate::symbol::RoughFactor;

/// Spatial map `kappa` of a diffeomorphism phase `<kappa(x), xi>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Diffeo {
    /// `kappa(x) = c x`.
    Scale(f64),
    /// `kappa_i(x) = x_i + eps sin(x_i)`, a diffeomorphism for `|eps| < 1`.
    SinePerturbed(f64),
}

impl Diffeo {
    pub fn map(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            Diffeo::Scale(c) => x.iter().map(|v| c * v).collect(),
            Diffeo::SinePerturbed(e) => x.iter().map(|v| v + e * v.sin()).collect(),
        }
    }

    /// Diagonal of the Jacobian at `x`.
    pub fn jacobian_diag(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            Diffeo::Scale(c) => vec![c; x.len()],
            Diffeo::SinePerturbed(e) => x.iter().map(|v| 1.0 + e * v.cos()).collect(),
        }
    }

    /// `sup |kappa'|` over each axis.
    pub fn max_stretch(&self) -> f64 {
        match *self {
            Diffeo::Scale(c) => c.abs(),
            Diffeo::SinePerturbed(e) => 1.0 + e.abs(),
        }
    }

    /// `inf |kappa'|` over each axis.
    pub fn min_stretch(&self) -> f64 {
        match *self {
            Diffeo::Scale(c) => c.abs(),
            Diffeo::SinePerturbed(e) => (1.0 - e.abs()).max(0.0),
        }
    }
}

/// Declared class: `Phi^k`, or `L^infty Phi^k` when rough in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseClass {
    pub k: usize,
    pub rough_in_x: bool,
}

pub type PhaseFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
pub type PhaseGradFn = dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync;

#[derive(Clone)]
pub enum PhaseFamily {
    /// `<x, xi>`.
    Linear,
    /// `<x, xi> + t |xi|`.
    Wave { t: f64 },
    /// `<x, xi> + s xi_1`.
    Shifted { s: f64 },
    /// `<kappa(x), xi>`.
    Diffeo(Diffeo),
    /// `<x, xi> + t(x) |xi|` with `t` bounded measurable.
    RoughWave { t: RoughFactor },
    /// `|xi|^2 / 2 + <x, xi>`; not homogeneous.
    Quadratic,
    Custom { eval: Arc<PhaseFn>, grad_xi: Arc<PhaseGradFn>, name: String },
}

impl fmt::Debug for PhaseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseFamily::Linear => write!(f, "Linear"),
            PhaseFamily::Wave { t } => write!(f, "Wave {{ t: {t} }}"),
            PhaseFamily::Shifted { s } => write!(f, "Shifted {{ s: {s} }}"),
            PhaseFamily::Diffeo(k) => write!(f, "Diffeo({k:?})"),
            PhaseFamily::RoughWave { t } => write!(f, "RoughWave {{ t: {t:?} }}"),
            PhaseFamily::Quadratic => write!(f, "Quadratic"),
            PhaseFamily::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhaseSpec {
    pub family: PhaseFamily,
    pub class: PhaseClass,
    pub homogeneous: bool,
}

impl PhaseSpec {
    pub fn linear() -> Self {
        Self::smooth(PhaseFamily::Linear, true)
    }

    pub fn wave(t: f64) -> Self {
        Self::smooth(PhaseFamily::Wave { t }, true)
    }

    pub fn shifted(s: f64) -> Self {
        Self::smooth(PhaseFamily::Shifted { s }, true)
    }

    pub fn diffeo(kappa: Diffeo) -> Self {
        Self::smooth(PhaseFamily::Diffeo(kappa), true)
    }

    pub fn rough_wave(t: RoughFactor) -> Self {
        let rough = !t.is_constant();
        Self { family: PhaseFamily::RoughWave { t }, class: PhaseClass { k: 2, rough_in_x: rough }, homogeneous: true }
    }

    pub fn quadratic() -> Self {
        Self::smooth(PhaseFamily::Quadratic, false)
    }

    pub fn custom<F, G>(name: &str, class: PhaseClass, homogeneous: bool, eval: F, grad_xi: G) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            family: PhaseFamily::Custom { eval: Arc::new(eval), grad_xi: Arc::new(grad_xi), name: name.to_string() },
            class,
            homogeneous,
        }
    }

    fn smooth(family: PhaseFamily, homogeneous: bool) -> Self {
        Self { family, class: PhaseClass { k: 2, rough_in_x: false }, homogeneous }
    }

    pub fn name(&self) -> String {
        match &self.family {
            PhaseFamily::Linear => "linear".into(),
            PhaseFamily::Wave { .. } => "wave".into(),
            PhaseFamily::Shifted { .. } => "shifted".into(),
            PhaseFamily::Diffeo(_) => "diffeo".into(),
            PhaseFamily::RoughWave { .. } => "rough_wave".into(),
            PhaseFamily::Quadratic => "quadratic".into(),
            PhaseFamily::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        match &self.family {
            PhaseFamily::Linear => dot(x, xi),
            PhaseFamily::Wave { t } => dot(x, xi) + t * norm(xi),
            PhaseFamily::Shifted { s } => dot(x, xi) + s * xi[0],
            PhaseFamily::Diffeo(k) => dot(&k.map(x), xi),
            PhaseFamily::RoughWave { t } => dot(x, xi) + t.eval(x) * norm(xi),
            PhaseFamily::Quadratic => 0.5 * dot(xi, xi) + dot(x, xi),
            PhaseFamily::Custom { eval, .. } => eval(x, xi),
        }
    }

    /// `grad_xi phi`; the `|xi|` terms use the value 0 for `xi / |xi|` at the origin.
    pub fn grad_xi(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
        let unit = |xi: &[f64]| -> Vec<f64> {
            let r = norm(xi);
            if r == 0.0 {
                vec![0.0; xi.len()]
            } else {
                xi.iter().map(|c| c / r).collect()
            }
        };
        match &self.family {
            PhaseFamily::Linear => x.to_vec(),
            PhaseFamily::Wave { t } => x.iter().zip(unit(xi)).map(|(a, u)| a + t * u).collect(),
            PhaseFamily::Shifted { s } => {
                let mut g = x.to_vec();
                g[0] += s;
                g
            }
            PhaseFamily::Diffeo(k) => k.map(x),
            PhaseFamily::RoughWave { t } => {
                let tx = t.eval(x);
                x.iter().zip(unit(xi)).map(|(a, u)| a + tx * u).collect()
            }
            PhaseFamily::Quadratic => x.iter().zip(xi).map(|(a, b)| a + b).collect(),
            PhaseFamily::Custom { grad_xi, .. } => grad_xi(x, xi),
        }
    }

    /// `d^2 phi / dx dxi` (row `i` is `d/dx_i`); `None` when rough in `x`.
    pub fn hess_mixed(&self, x: &[f64], xi: &[f64]) -> Option<DMatrix<f64>> {
        let n = x.len();
        match &self.family {
            PhaseFamily::Linear | PhaseFamily::Wave { .. } | PhaseFamily::Shifted { .. } | PhaseFamily::Quadratic => {
                Some(DMatrix::identity(n, n))
            }
            PhaseFamily::Diffeo(k) => Some(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(k.jacobian_diag(x)))),
            PhaseFamily::RoughWave { t } => {
                if t.is_constant() {
                    Some(DMatrix::identity(n, n))
                } else {
                    None
                }
            }
            PhaseFamily::Custom { grad_xi, .. } => {
                if self.class.rough_in_x {
                    return None;
                }
                let h = 1e-5 * (1.0 + norm(x));
                let mut m = DMatrix::zeros(n, n);
                let mut xp = x.to_vec();
                for i in 0..n {
                    xp[i] = x[i] + h;
                    let gp = grad_xi(&xp, xi);
                    xp[i] = x[i] - h;
                    let gm = grad_xi(&xp, xi);
                    xp[i] = x[i];
                    for j in 0..n {
                        m[(i, j)] = (gp[j] - gm[j]) / (2.0 * h);
                    }
                }
                Some(m)
            }
        }
    }

    /// `d^2 phi / dxi^2`; entries are non-finite at `xi = 0` for the `|xi|` families.
    pub fn hess_xixi(&self, x: &[f64], xi: &[f64]) -> DMatrix<f64> {
        let n = xi.len();
        let cone = |t: f64| -> DMatrix<f64> {
            let r = norm(xi);
            DMatrix::from_fn(n, n, |i, j| {
                let delta = if i == j { 1.0 } else { 0.0 };
                t * (delta / r - xi[i] * xi[j] / (r * r * r))
            })
        };
        match &self.family {
            PhaseFamily::Linear | PhaseFamily::Shifted { .. } | PhaseFamily::Diffeo(_) => DMatrix::zeros(n, n),
            PhaseFamily::Wave { t } => cone(*t),
            PhaseFamily::RoughWave { t } => cone(t.eval(x)),
            PhaseFamily::Quadratic => DMatrix::identity(n, n),
            PhaseFamily::Custom { grad_xi, .. } => {
                let h = 1e-5 * (1.0 + norm(xi));
                let mut m = DMatrix::zeros(n, n);
                let mut kp = xi.to_vec();
                for i in 0..n {
                    kp[i] = xi[i] + h;
                    let gp = grad_xi(x, &kp);
                    kp[i] = xi[i] - h;
                    let gm = grad_xi(x, &kp);
                    kp[i] = xi[i];
                    for j in 0..n {
                        m[(i, j)] = (gp[j] - gm[j]) / (2.0 * h);
                    }
                }
                m
            }
        }
    }

    /// `psi(xi)` when `phi = <x, xi> + psi(xi)`, which makes the operator a multiplier.
    pub fn xi_only_part(&self, xi: &[f64]) -> Option<f64> {
        match &self.family {
            PhaseFamily::Linear => Some(0.0),
            PhaseFamily::Wave { t } => Some(t * norm(xi)),
            PhaseFamily::Shifted { s } => Some(s * xi[0]),
            PhaseFamily::RoughWave { t: RoughFactor::Constant(c) } => Some(c * norm(xi)),
            PhaseFamily::Quadratic => Some(0.5 * dot(xi, xi)),
            _ => None,
        }
    }

    pub fn is_multiplier_form(&self) -> bool {
        self.xi_only_part(&[0.0]).is_some()
    }

    /// For diffeomorphism phases: `kappa(x)`.
    pub fn spatial_image(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.family {
            PhaseFamily::Diffeo(k) => Some(k.map(x)),
            _ => None,
        }
    }

    /// For diffeomorphism phases: `sup |kappa'|`, the factor by which output
    /// frequencies exceed input frequencies.
    pub fn frequency_stretch(&self) -> Option<f64> {
        match &self.family {
            PhaseFamily::Diffeo(k) => Some(k.max_stretch()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn builtins() -> Vec<PhaseSpec> {
        vec![
            PhaseSpec::linear(),
            PhaseSpec::wave(1.3),
            PhaseSpec::shifted(1.0),
            PhaseSpec::diffeo(Diffeo::Scale(2.0)),
            PhaseSpec::diffeo(Diffeo::SinePerturbed(0.25)),
            PhaseSpec::rough_wave(RoughFactor::Step { left: 0.5, right: 1.5, at: 0.0 }),
        ]
    }

    #[test]
    fn homogeneity_on_random_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for phi in builtins() {
            for _ in 0..100 {
                let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-4.0..4.0)).collect();
                let xi: Vec<f64> = (0..2).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let base = phi.eval(&x, &xi);
                for s in [2.0, 0.5, 10.0] {
                    let scaled: Vec<f64> = xi.iter().map(|c| s * c).collect();
                    let err = (phi.eval(&x, &scaled) - s * base).abs();
                    assert!(err <= 1e-10 * s * base.abs().max(1e-300) || err < 1e-13, "{}: {err}", phi.name());
                }
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences_at_second_order() {
        let x = [0.7, -1.1];
        let xi = [1.3, 0.4];
        let mut all = builtins();
        all.push(PhaseSpec::quadratic());
        for phi in all {
            let g = phi.grad_xi(&x, &xi);
            let err = |h: f64| -> f64 {
                (0..2)
                    .map(|k| {
                        let mut p = xi;
                        let mut m = xi;
                        p[k] += h;
                        m[k] -= h;
                        ((phi.eval(&x, &p) - phi.eval(&x, &m)) / (2.0 * h) - g[k]).abs()
                    })
                    .fold(0.0, f64::max)
            };
            let (e1, e2) = (err(1e-2), err(5e-3));
            if e1 > 1e-11 {
                let ratio = e1 / e2;
                assert!((ratio - 4.0).abs() < 0.2, "{}: ratio {ratio}", phi.name());
            }
        }
    }

    #[test]
    fn wave_hessian_has_radial_kernel() {
        let h = PhaseSpec::wave(1.0).hess_xixi(&[0.0, 0.0], &[0.6, 0.8]);
        let v = &h * nalgebra::DVector::from_vec(vec![0.6, 0.8]);
        assert!(v.norm() < 1e-15);
        assert!((h.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rough_wave_has_no_mixed_hessian() {
        let phi = PhaseSpec::rough_wave(RoughFactor::Step { left: 0.0, right: 1.0, at: 0.0 });
        assert!(phi.class.rough_in_x);
        assert!(phi.hess_mixed(&[0.0], &[1.0]).is_none());
    }
}
