use std::f64::consts::PI;

use fiolab::decompose::sss::{psi_derivative_bounds, sss_symbol_diagnostics};
use fiolab::decompose::{littlewood_paley, phase_reduce, sss_frame, sss_symbol};
use fiolab::{Error, Grid, PhaseSpec, RoughFactor, SymbolSpec};

fn circle(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|i| {
            let t = 2.0 * PI * (i as f64 + 0.5) / k as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

#[test]
fn planar_frame_at_one_sixteenth() {
    let h = 1.0 / 16.0;
    let f = sss_frame(h, 2).unwrap();
    assert!((12..=50).contains(&f.len()), "{}", f.len());
    let probes = circle(10_000);
    assert!(f.covering_radius(&probes) <= h.sqrt() + 1e-12);
    for p in &probes {
        assert!((f.psi_all(p).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    assert_eq!(f, sss_frame(h, 2).unwrap());
}

#[test]
fn coarsest_and_one_dimensional_frames() {
    let f = sss_frame(1.0, 2).unwrap();
    assert!(f.len() <= 8);
    for p in circle(1000) {
        assert!((f.psi_all(&p).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    for h in [1.0, 0.25, 1e-3] {
        let f = sss_frame(h, 1).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.psi_all(&[3.0]), vec![1.0, 0.0]);
        assert_eq!(f.psi_all(&[-0.2]), vec![0.0, 1.0]);
    }
    assert!(sss_frame(0.0, 2).is_err());
    assert!(sss_frame(0.5, 4).is_err());
}

#[test]
fn dyadic_partition_is_exact_on_the_grid() {
    for (g, j) in [(Grid::new(1, 256, 16.0).unwrap(), 5), (Grid::new(2, 64, 8.0).unwrap(), 3)] {
        let dp = littlewood_paley(&g, j).unwrap();
        let sum = dp.reconstruct_table();
        assert!(sum.iter().all(|s| (s - 1.0).abs() <= 1e-12));
    }
}

#[test]
fn psi_bounds_do_not_depend_on_h() {
    let bounds: Vec<_> = [0.25, 1.0 / 16.0, 1.0 / 64.0].iter().map(|&h| psi_derivative_bounds(&sss_frame(h, 2).unwrap(), 2)).collect();
    for k in 0..bounds[0].constants.len() {
        let c: Vec<f64> = bounds.iter().map(|b| b.constants[k].1).collect();
        let (lo, hi) = (c.iter().cloned().fold(f64::MAX, f64::min), c.iter().cloned().fold(0.0, f64::max));
        assert!(hi / lo <= 2.0, "{:?}: {c:?}", bounds[0].constants[k].0);
    }
    // along xi^nu the bound stays O(1) while h^{-1/2} grows fourfold over this range
    let radial: Vec<f64> = bounds.iter().map(|b| b.radial_sup).collect();
    assert!(radial.iter().all(|&r| r <= 3.0), "{radial:?}");
    assert!(radial[2] <= 1.5 * radial[0], "{radial:?}");
}

#[test]
fn wave_symbol_angular_derivative() {
    let h = 1.0 / 16.0;
    let f = sss_frame(h, 2).unwrap();
    let xs = vec![vec![0.0, 0.0], vec![1.0, -0.5]];
    for nu in (0..f.len()).step_by(3) {
        let rows = sss_symbol_diagnostics(&SymbolSpec::one(), &f, nu, h, &xs, 1).unwrap();
        let angular = rows.iter().find(|r| r.alpha == [0, 1]).unwrap();
        assert_eq!(angular.exponent, -0.5);
        assert!(angular.constant <= 10.0, "nu = {nu}: {}", angular.constant);
        let b = sss_symbol(&SymbolSpec::one(), &PhaseSpec::wave(1.0), &f, nu, h).unwrap();
        let c = &f.centers[nu];
        let v = b.eval(&[0.3, 0.1], &[1.2 * c[0], 1.2 * c[1]]);
        assert!(v.norm() <= 1.0 + 1e-12);
    }
    assert!(matches!(sss_symbol_diagnostics(&SymbolSpec::one(), &f, f.len(), h, &xs, 1), Err(Error::Usage(_))));
}

#[test]
fn inverse_bessel_symbol_scales_like_h() {
    let xs = vec![vec![0.0, 0.0]];
    let a = SymbolSpec::bessel_power(-1.0);
    let mut constants = Vec::new();
    for h in [0.25, 1.0 / 16.0, 1.0 / 64.0] {
        let f = sss_frame(h, 2).unwrap();
        let b = sss_symbol(&a, &PhaseSpec::wave(1.0), &f, 0, h).unwrap();
        let rows = sss_symbol_diagnostics(&b, &f, 0, h, &xs, 0).unwrap();
        let sup = rows[0].sup;
        assert!(sup <= 2.0 * h, "h = {h}: {sup}");
        constants.push(sup / h);
    }
    assert!(constants[2] / constants[0] <= 1.5 && constants[0] / constants[2] <= 1.5, "{constants:?}");
}

#[test]
fn rough_step_time_keeps_the_reduction_exact() {
    let xs = vec![vec![-1.0, 0.0], vec![0.5, 2.0]];
    let xis = circle(360).into_iter().map(|p| vec![2.5 * p[0], 2.5 * p[1]]).collect::<Vec<_>>();
    let t = RoughFactor::Step { left: 1.0, right: 3.0, at: 0.0 };
    let rp = phase_reduce(&PhaseSpec::rough_wave(t), 2, 64).unwrap();
    assert!(rp.reconstruction_error(&xs, &xis) <= 1e-12);
    let plain = phase_reduce(&PhaseSpec::wave(1.0), 2, 64).unwrap();
    let (a, b) = (rp.theta(0, &[0.5, 0.0], &[1.0, 0.05]), plain.theta(0, &[0.5, 0.0], &[1.0, 0.05]));
    assert!((a - 3.0 * b).abs() <= 1e-15);
    assert!(rp.smallness_constant(&xs, &xis) <= 3.0);
}
