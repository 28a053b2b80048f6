//! Sampled symbol seminorms and phase non-degeneracy reports.
//!
//! All suprema are maxima over a finite deterministic sample set, hence lower
//! bounds for the true suprema.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::cutoff::norm;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::phase::PhaseSpec;
use crate::symbol::{bessel_weight, SymbolSpec};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// All multi-indices of length `n` with total order `order`, in lexicographic order.
pub fn multi_indices(n: usize, order: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n - 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(n, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, order, &mut Vec::with_capacity(n), &mut out);
    out
}

fn binomial(k: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// Nested central difference `d^gamma f(z)` with per-coordinate steps.
pub fn central_partial<F>(f: F, z: &[f64], gamma: &[usize], steps: &[f64]) -> Complex64
where
    F: Fn(&[f64]) -> Complex64,
{
    let active: Vec<usize> = (0..z.len()).filter(|&i| gamma[i] > 0).collect();
    if active.is_empty() {
        return f(z);
    }
    let mut counters = vec![0usize; active.len()];
    let mut zz = z.to_vec();
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let mut w = 1.0;
        for (slot, &i) in active.iter().enumerate() {
            let k = gamma[i];
            let j = counters[slot];
            w *= binomial(k, j) * if j % 2 == 0 { 1.0 } else { -1.0 };
            zz[i] = z[i] + (k as f64 / 2.0 - j as f64) * steps[i];
        }
        acc += f(&zz) * w;
        let mut slot = 0;
        loop {
            if slot == active.len() {
                let denom: f64 = active.iter().map(|&i| steps[i].powi(gamma[i] as i32)).product();
                return acc / denom;
            }
            counters[slot] += 1;
            if counters[slot] <= gamma[active[slot]] {
                break;
            }
            counters[slot] = 0;
            slot += 1;
        }
    }
}

/// Step for a finite difference of total order `k` at coordinate scale `scale`.
pub fn fd_step(scale: f64, k: usize) -> f64 {
    scale * f64::EPSILON.powf(1.0 / (k as f64 + 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeminormRequest {
    /// Highest total order `|alpha| + |beta|`.
    pub max_order: usize,
    /// Include `x`-derivatives (`beta != 0`).
    pub x_derivatives: bool,
    /// Entries above this value are flagged.
    pub tolerance: f64,
}

impl Default for SeminormRequest {
    fn default() -> Self {
        Self { max_order: 2, x_derivatives: false, tolerance: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeminormEntry {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub value: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeminormReport {
    pub entries: Vec<SeminormEntry>,
    pub sample_set: String,
    pub max_order: usize,
}

impl SeminormReport {
    pub fn entry(&self, alpha: &[usize], beta: &[usize]) -> Option<&SeminormEntry> {
        self.entries.iter().find(|e| e.alpha == alpha && e.beta == beta)
    }

    pub fn has_violation(&self) -> bool {
        self.entries.iter().any(|e| e.violation)
    }
}

/// Frequency samples: the grid's frequency lattice (at most 64 per axis) plus
/// radii `2^0 .. 2^12` along the coordinate axes and diagonals.
pub fn frequency_samples(grid: &Grid) -> (Vec<Vec<f64>>, String) {
    let n = grid.dim();
    let np = grid.points_per_axis();
    let stride = (np / 64).max(1);
    let per_axis: Vec<usize> = (0..np).step_by(stride).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        out.push(idx.iter().map(|&k| grid.axis_freq(per_axis[k])).collect());
        let mut d = 0;
        while d < n {
            idx[d] += 1;
            if idx[d] < per_axis.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == n {
            break;
        }
    }
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        dirs.push(e.clone());
        e[i] = -1.0;
        dirs.push(e);
    }
    if n > 1 {
        dirs.push(vec![1.0 / (n as f64).sqrt(); n]);
    }
    for k in 0..=12 {
        let r = 2f64.powi(k);
        for d in &dirs {
            out.push(d.iter().map(|c| c * r).collect());
        }
    }
    let desc = format!(
        "frequency lattice of grid (n={n}, N={np}, L={}) with stride {stride}, plus radii 2^0..2^12 on {} axis/diagonal directions",
        grid.half_width(),
        dirs.len()
    );
    (out, desc)
}

/// Weighted sampled suprema `<xi>^{-m + rho|alpha| - delta|beta|} |d^alpha_xi d^beta_x a|`.
pub fn seminorm_report(a: &SymbolSpec, request: SeminormRequest, grid: &Grid, x_samples: &[Vec<f64>]) -> Result<SeminormReport> {
    let n = grid.dim();
    if request.x_derivatives && a.rough_in_x {
        return Err(Error::Capability("x-derivatives requested on a symbol that is rough in x".into()));
    }
    if request.x_derivatives && request.max_order > a.x_smoothness {
        return Err(Error::Capability(format!(
            "x-derivatives up to order {} requested, symbol supplies {}",
            request.max_order, a.x_smoothness
        )));
    }
    if x_samples.is_empty() || x_samples.iter().any(|x| x.len() != n) {
        return Err(Error::Usage(format!("x samples must be non-empty points of dimension {n}")));
    }
    let (xis, xi_desc) = frequency_samples(grid);
    let OrderParamsView { m, rho, delta } = OrderParamsView::of(a);

    let mut entries = Vec::new();
    for order in 0..=request.max_order {
        for gamma in multi_indices(2 * n, order) {
            let (beta, alpha) = gamma.split_at(n);
            if !request.x_derivatives && beta.iter().any(|&b| b > 0) {
                continue;
            }
            let (la, lb) = (alpha.iter().sum::<usize>(), beta.iter().sum::<usize>());
            let mut sup: f64 = 0.0;
            for x in x_samples {
                for xi in &xis {
                    let z: Vec<f64> = x.iter().chain(xi.iter()).copied().collect();
                    let jx = crate::cutoff::japanese(xi);
                    let steps: Vec<f64> =
                        (0..2 * n).map(|i| if i < n { fd_step(1.0, order) } else { fd_step(jx, order) }).collect();
                    let d = central_partial(|z: &[f64]| a.eval(&z[..n], &z[n..]), &z, &gamma, &steps);
                    let weight = bessel_weight(xi, -m + rho * la as f64 - delta * lb as f64);
                    sup = sup.max(weight * d.norm());
                }
            }
            entries.push(SeminormEntry {
                alpha: alpha.to_vec(),
                beta: beta.to_vec(),
                value: sup,
                violation: !sup.is_finite() || sup > request.tolerance,
            });
        }
    }
    let sample_set = format!(
        "{} x samples; {} (sampled maximum, a lower bound of the supremum)",
        x_samples.len(),
        xi_desc
    );
    Ok(SeminormReport { entries, sample_set, max_order: request.max_order })
}

struct OrderParamsView {
    m: f64,
    rho: f64,
    delta: f64,
}

impl OrderParamsView {
    fn of(a: &SymbolSpec) -> Self {
        Self { m: a.order.m, rho: a.order.rho, delta: a.order.delta }
    }
}

/// Points and frequencies used by [`phase_report`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSamples {
    pub x: Vec<Vec<f64>>,
    pub xi: Vec<Vec<f64>>,
    /// Frequencies with `|xi|` below this are rejected.
    pub xi_floor: f64,
}

impl PhaseSamples {
    /// Every `N/8`-th grid point per axis, and unit directions (2 in 1D,
    /// 32 in 2D, 64 Fibonacci points in 3D) at radii 1, 2, 8.
    pub fn from_grid(grid: &Grid) -> Self {
        let n = grid.dim();
        let np = grid.points_per_axis();
        let stride = (np / 8).max(1);
        let axis: Vec<f64> = (0..np).step_by(stride).map(|k| grid.axis_coord(k)).collect();
        let mut x = Vec::new();
        let mut idx = vec![0usize; n];
        'outer: loop {
            x.push(idx.iter().map(|&k| axis[k]).collect());
            for d in 0..n {
                idx[d] += 1;
                if idx[d] < axis.len() {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            break;
        }
        let dirs = unit_directions(n);
        let mut xi = Vec::new();
        for r in [1.0, 2.0, 8.0] {
            for d in &dirs {
                xi.push(d.iter().map(|c| c * r).collect());
            }
        }
        Self { x, xi, xi_floor: grid.dual_spacing() }
    }
}

/// Deterministic unit directions: `+-1` (n=1), 32 equispaced angles (n=2),
/// 64 Fibonacci-sphere points (n=3).
pub fn unit_directions(n: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..32)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / 32.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => fibonacci_sphere(64),
    }
}

/// `count` near-uniform points on the 2-sphere.
pub fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            vec![r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    /// `min |det d^2 phi / dx dxi|`; `None` when rough in `x`.
    pub min_det_mixed: Option<f64>,
    /// Smallest and largest rank of `d^2_xi phi` on `|xi| = 1`.
    pub xixi_rank: (usize, usize),
    /// Range of `det_{n-1}` (product of the nonzero eigenvalues) over the
    /// unit-sphere samples whose rank is `n - 1`; `None` if there are none.
    pub det_n_minus_1: Option<(f64, f64)>,
    /// `min |grad_xi phi(x, xi) - grad_xi phi(y, xi)| / |x - y|` over sampled pairs.
    pub rough_constant: f64,
    /// `sup |xi|^{-1+|alpha|} |d^alpha_xi d^beta_x phi|` for `k <= |alpha|+|beta| <= k+1`.
    pub class_seminorms: Vec<SeminormEntry>,
    pub sample_set: String,
}

/// Rank (against [`RANK_TOLERANCE`]) and product of nonzero eigenvalues.
pub fn rank_and_det(m: &DMatrix<f64>) -> (usize, Option<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let smax = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if smax == 0.0 {
        return (0, None);
    }
    let nonzero: Vec<f64> = eig.eigenvalues.iter().copied().filter(|v| v.abs() >= RANK_TOLERANCE * smax).collect();
    (nonzero.len(), Some(nonzero.iter().product()))
}

pub fn phase_report(phi: &PhaseSpec, samples: &PhaseSamples) -> Result<PhaseReport> {
    if let Some(bad) = samples.xi.iter().find(|xi| norm(xi) < samples.xi_floor) {
        return Err(Error::Domain(format!(
            "frequency sample {bad:?} lies within |xi| < {} where the phase is singular",
            samples.xi_floor
        )));
    }
    let n = samples.xi.first().map_or(0, |v| v.len());
    if n == 0 || samples.x.is_empty() || samples.x.iter().any(|x| x.len() != n) {
        return Err(Error::Usage("phase samples need points and frequencies of one dimension".into()));
    }

    let min_det_mixed = if phi.class.rough_in_x {
        None
    } else {
        let mut best = f64::INFINITY;
        for x in &samples.x {
            for xi in &samples.xi {
                match phi.hess_mixed(x, xi) {
                    Some(h) => best = best.min(h.determinant().abs()),
                    None => return Err(Error::Capability("phase does not supply a mixed Hessian".into())),
                }
            }
        }
        Some(best)
    };

    let mut rank_lo = usize::MAX;
    let mut rank_hi = 0;
    let mut det_range: Option<(f64, f64)> = None;
    for x in &samples.x {
        for xi in &samples.xi {
            let r = norm(xi);
            let unit: Vec<f64> = xi.iter().map(|c| c / r).collect();
            let (rank, det) = rank_and_det(&phi.hess_xixi(x, &unit));
            rank_lo = rank_lo.min(rank);
            rank_hi = rank_hi.max(rank);
            if rank + 1 == n {
                if let Some(d) = det {
                    det_range = Some(match det_range {
                        None => (d, d),
                        Some((lo, hi)) => (lo.min(d), hi.max(d)),
                    });
                }
            }
        }
    }
    if n == 1 && rank_hi == 0 {
        // the empty product: det_0 = 1
        det_range = Some((1.0, 1.0));
    }

    let mut c = f64::INFINITY;
    for (i, x) in samples.x.iter().enumerate() {
        for y in samples.x.iter().skip(i + 1) {
            let dxy: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if dxy == 0.0 {
                continue;
            }
            for xi in &samples.xi {
                let gx = phi.grad_xi(x, xi);
                let gy = phi.grad_xi(y, xi);
                let d: f64 = gx.iter().zip(&gy).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                c = c.min(d / dxy);
            }
        }
    }

    let k = phi.class.k;
    let mut class_seminorms = Vec::new();
    for order in k..=k + 1 {
        for gamma in multi_indices(2 * n, order) {
            let (beta, alpha) = gamma.split_at(n);
            if phi.class.rough_in_x && beta.iter().any(|&b| b > 0) {
                continue;
            }
            let la = alpha.iter().sum::<usize>() as i32;
            let mut sup: f64 = 0.0;
            for x in &samples.x {
                for xi in &samples.xi {
                    let r = norm(xi);
                    let z: Vec<f64> = x.iter().chain(xi.iter()).copied().collect();
                    let steps: Vec<f64> =
                        (0..2 * n).map(|i| if i < n { fd_step(1.0, order) } else { fd_step(r, order) }).collect();
                    let d = central_partial(|z: &[f64]| Complex64::new(phi.eval(&z[..n], &z[n..]), 0.0), &z, &gamma, &steps);
                    sup = sup.max(r.powi(la - 1) * d.norm());
                }
            }
            class_seminorms.push(SeminormEntry { alpha: alpha.to_vec(), beta: beta.to_vec(), value: sup, violation: !sup.is_finite() });
        }
    }

    Ok(PhaseReport {
        min_det_mixed,
        xixi_rank: (rank_lo, rank_hi),
        det_n_minus_1: det_range,
        rough_constant: c,
        class_seminorms,
        sample_set: format!(
            "{} x samples, {} xi samples with |xi| >= {} (sampled extrema)",
            samples.x.len(),
            samples.xi.len(),
            samples.xi_floor
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::Diffeo;
    use crate::symbol::{OrderParams, RoughFactor};

    fn grid1() -> Grid {
        Grid::new(1, 256, 16.0).unwrap()
    }

    fn xs() -> Vec<Vec<f64>> {
        vec![vec![-1.0], vec![0.3], vec![2.0]]
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(2, 2).len(), 3);
        assert_eq!(multi_indices(4, 2).len(), 10);
        assert_eq!(multi_indices(1, 3), vec![vec![3]]);
    }

    #[test]
    fn central_partial_of_polynomial() {
        let f = |z: &[f64]| Complex64::new(z[0].powi(3) * z[1], 0.0);
        let d = central_partial(f, &[1.5, 2.0], &[2, 1], &[1e-3, 1e-3]);
        assert!((d.re - 9.0).abs() < 1e-5);
    }

    #[test]
    fn inverse_bessel_is_in_its_class() {
        let r = seminorm_report(&SymbolSpec::bessel_power(-1.0), SeminormRequest::default(), &grid1(), &xs()).unwrap();
        assert!(!r.has_violation());
        for e in &r.entries {
            assert!(e.value <= 2.0 && e.value >= 0.0, "{e:?}");
        }
    }

    #[test]
    fn constant_symbol_has_trivial_table() {
        let req = SeminormRequest { max_order: 2, x_derivatives: true, tolerance: 10.0 };
        let r = seminorm_report(&SymbolSpec::one(), req, &grid1(), &xs()).unwrap();
        assert_eq!(r.entry(&[0], &[0]).unwrap().value, 1.0);
        for e in r.entries.iter().filter(|e| e.alpha[0] + e.beta[0] > 0) {
            assert_eq!(e.value, 0.0);
        }
    }

    #[test]
    fn misdeclared_order_is_flagged() {
        let a = SymbolSpec::bessel_power(1.0).declared_as(OrderParams::classical(0.0));
        let r = seminorm_report(&a, SeminormRequest::default(), &grid1(), &xs()).unwrap();
        assert!(r.has_violation());
        assert!(r.entry(&[0], &[0]).unwrap().violation);
    }

    #[test]
    fn rough_symbol_refuses_x_derivatives() {
        let a = SymbolSpec::x_modulated(0.0, RoughFactor::Step { left: 1.0, right: 2.0, at: 0.0 });
        let req = SeminormRequest { x_derivatives: true, ..Default::default() };
        assert!(matches!(seminorm_report(&a, req, &grid1(), &xs()), Err(Error::Capability(_))));
        assert!(seminorm_report(&a, SeminormRequest::default(), &grid1(), &xs()).is_ok());
    }

    #[test]
    fn linear_phase_report() {
        let g = Grid::new(2, 32, 4.0).unwrap();
        let r = phase_report(&PhaseSpec::linear(), &PhaseSamples::from_grid(&g)).unwrap();
        assert!((r.min_det_mixed.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(r.xixi_rank, (0, 0));
        assert!((r.rough_constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wave_phase_report() {
        let g = Grid::new(2, 32, 4.0).unwrap();
        let r = phase_report(&PhaseSpec::wave(1.0), &PhaseSamples::from_grid(&g)).unwrap();
        assert!((r.min_det_mixed.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(r.xixi_rank, (1, 1));
        let (lo, hi) = r.det_n_minus_1.unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        assert!(r.rough_constant > 0.0);
    }

    #[test]
    fn shifted_phase_is_rank_zero() {
        let g = Grid::new(2, 32, 4.0).unwrap();
        let r = phase_report(&PhaseSpec::shifted(1.0), &PhaseSamples::from_grid(&g)).unwrap();
        assert_eq!(r.xixi_rank, (0, 0));
    }

    #[test]
    fn diffeo_is_rough_nondegenerate() {
        let g = Grid::new(1, 64, 4.0).unwrap();
        let r = phase_report(&PhaseSpec::diffeo(Diffeo::SinePerturbed(0.25)), &PhaseSamples::from_grid(&g)).unwrap();
        assert!(r.min_det_mixed.unwrap() >= 0.75 - 1e-12);
        assert!(r.rough_constant >= 0.75 - 1e-12);
    }

    #[test]
    fn origin_frequency_is_a_domain_error() {
        let g = Grid::new(1, 64, 4.0).unwrap();
        let mut s = PhaseSamples::from_grid(&g);
        s.xi.push(vec![0.0]);
        assert!(matches!(phase_report(&PhaseSpec::wave(1.0), &s), Err(Error::Domain(_))));
    }
}
