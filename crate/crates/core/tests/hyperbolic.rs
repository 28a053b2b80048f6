use fiolab::applicator::apply_multiplier;
use fiolab::hyperbolic::{
    cauchy_second_order, energy, half_wave, sobolev_loss, sobolev_loss_sweep, weighted_local_estimate, CauchyData,
    T_MAX_DEFAULT,
};
use fiolab::normest::{ProbeTag, TestFamily, Verdict};
use fiolab::weights::Weight;
use fiolab::{Error, Grid, SampledField, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gauss(g: Grid, c: f64, s: f64) -> SampledField {
    SampledField::from_physical_real(g, move |x| {
        let r2: f64 = x.iter().enumerate().map(|(k, v)| (v - if k == 0 { c } else { 0.0 }).powi(2)).sum();
        (-r2 / (2.0 * s * s)).exp()
    })
}

fn bump(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

#[test]
fn positive_frequencies_translate() {
    let g = Grid::new(1, 512, 16.0).unwrap();
    let k0 = 10.0;
    let packet = |shift: f64| {
        SampledField::from_physical(g, move |x| {
            let y = x[0] + shift;
            Complex64::from_polar((-y * y / 2.0).exp(), k0 * y)
        })
    };
    let u = packet(0.0);
    for t in [0.5, 1.0, 2.0, -3.0] {
        let v = half_wave(&u, t).unwrap();
        assert!(v.sub(&packet(t)).unwrap().max_abs() <= 1e-10, "t = {t}");
        assert!((v.norm_l2() - u.norm_l2()).abs() <= 1e-10 * u.norm_l2());
    }
    let v = apply_multiplier(|xi| Complex64::from_polar(1.0, 1.5 * xi[0].abs()), &u).unwrap();
    assert!(v.sub(&packet(1.5)).unwrap().max_abs() <= 1e-10);
}

#[test]
fn time_zero_is_identity() {
    let g = Grid::new(2, 64, 8.0).unwrap();
    let u = gauss(g, 0.5, 1.0);
    assert!(half_wave(&u, 0.0).unwrap().sub(&u).unwrap().max_abs() <= 1e-12);
}

#[test]
fn velocity_term_matches_cumulative_trapezoid() {
    let g = Grid::new(1, 512, 16.0).unwrap();
    let dx = g.spacing();
    let t = 24.0 * dx;
    let f1 = |y: f64| (-(y - 0.3).powi(2)).exp();
    // F(y) = int_{-L}^{y} f1 on a lattice 256 times finer than the grid, aligned with the cell centres
    let sub = 256usize;
    let h = dx / sub as f64;
    let count = g.points_per_axis() * sub;
    let mut cum = vec![0.0; count];
    let y = |i: usize| -g.half_width() + 0.5 * dx + i as f64 * h;
    for i in 1..count {
        cum[i] = cum[i - 1] + 0.5 * h * (f1(y(i - 1)) + f1(y(i)));
    }
    let at = |k: i64| cum[(k.clamp(0, count as i64 / sub as i64 - 1) as usize) * sub];
    let data = CauchyData::new(SampledField::zeros(g, Side::Physical), SampledField::from_physical_real(g, |x| f1(x[0])), t, T_MAX_DEFAULT)
        .unwrap();
    let u = cauchy_second_order(&data).unwrap();
    let mut err: f64 = 0.0;
    for k in 0..g.len() {
        let want = 0.5 * (at(k as i64 + 24) - at(k as i64 - 24));
        err = err.max((u.values()[k] - want).norm());
    }
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn energy_is_constant_in_time() {
    let g = Grid::new(2, 64, 8.0).unwrap();
    let f0 = gauss(g, 0.5, 0.8);
    let f1 = gauss(g, -1.0, 0.6);
    let e0 = energy(&CauchyData::new(f0.clone(), f1.clone(), 0.0, T_MAX_DEFAULT).unwrap()).unwrap();
    for t in [0.3, 1.0, 2.5] {
        let e = energy(&CauchyData::new(f0.clone(), f1.clone(), t, T_MAX_DEFAULT).unwrap()).unwrap();
        assert!((e - e0).abs() <= 1e-8 * e0, "t = {t}: {e} vs {e0}");
    }
}

#[test]
fn unitary_on_random_pairs() {
    let g = Grid::new(1, 256, 16.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let (c, s, k, t) = (rng.gen_range(-4.0..4.0), rng.gen_range(0.3..2.0), rng.gen_range(-5.0..5.0), rng.gen_range(-6.0..6.0));
        let u = SampledField::from_physical(g, |x| Complex64::from_polar((-(x[0] - c).powi(2) / (2.0 * s * s)).exp(), k * x[0]));
        let v = half_wave(&u, t).unwrap();
        assert!((v.norm_l2() - u.norm_l2()).abs() <= 1e-10 * u.norm_l2());
    }
}

#[test]
fn finite_speed_of_propagation() {
    for (g, f1_on) in [(Grid::new(1, 1024, 16.0).unwrap(), true), (Grid::new(2, 256, 8.0).unwrap(), false)] {
        let f0 = SampledField::from_physical_real(g, |x| bump(x.iter().map(|c| c * c).sum::<f64>().sqrt()));
        let f1 = if f1_on { f0.scale(Complex64::new(0.5, 0.0)) } else { SampledField::zeros(g, Side::Physical) };
        let u = cauchy_second_order(&CauchyData::new(f0, f1, 2.0, T_MAX_DEFAULT).unwrap()).unwrap();
        let (mut outside, mut total) = (0.0, 0.0);
        for k in 0..g.len() {
            let m = u.values()[k].norm_sqr();
            total += m;
            if g.point(k).iter().map(|c| c * c).sum::<f64>().sqrt() > 3.2 {
                outside += m;
            }
        }
        assert!(outside <= 1e-6 * total, "n = {}: {}", g.dim(), outside / total);
    }
}

#[test]
fn loss_exponent() {
    assert_eq!(sobolev_loss(1, 4.0), 0.0);
    assert_eq!(sobolev_loss(2, 2.0), 0.0);
    assert_eq!(sobolev_loss(2, 4.0), 0.25);
    assert!((sobolev_loss(3, 1.5) - 2.0 / 6.0).abs() < 1e-15);
}

#[test]
fn no_loss_in_one_dimension() {
    let grids: Vec<Grid> = [256, 512, 1024].iter().map(|&n| Grid::new(1, n, 16.0).unwrap()).collect();
    for p in [1.5, 2.0, 4.0] {
        let r = sobolev_loss_sweep(p, 0.0, 1.0, &TestFamily::standard(5, 4), &grids).unwrap();
        assert_eq!(r.m_p, 0.0);
        assert_eq!(r.shifted_verdict, Verdict::Stable, "p = {p}: {:?}", r.rows);
    }
}

#[test]
fn sobolev_sweep_in_the_plane() {
    let grids: Vec<Grid> = [32, 64, 128].iter().map(|&n| Grid::new(2, n, 8.0).unwrap()).collect();
    let fam = TestFamily::standard(5, 4);
    let r = sobolev_loss_sweep(2.0, 0.0, 1.0, &fam, &grids).unwrap();
    assert_eq!(r.shifted_verdict, Verdict::Stable, "{:?}", r.rows);
    // data that refocus at time t carry the full loss; the unshifted ratio grows like N^{m_p - eps}
    let focusing = TestFamily::new(vec![ProbeTag::Focusing { t: 1.0 }], 5, 2);
    let r = sobolev_loss_sweep(4.0, 0.0, 1.0, &focusing, &grids).unwrap();
    assert_eq!(r.m_p, 0.25);
    assert_eq!(r.shifted_verdict, Verdict::Stable, "{:?}", r.rows);
    assert!(r.rows.windows(2).all(|w| w[1].unshifted > w[0].unshifted), "{:?}", r.rows);
    for w in r.rows.windows(2) {
        let gain = (w[1].unshifted / w[1].shifted / (w[0].unshifted / w[0].shifted)).log2();
        assert!((gain - r.m_p).abs() <= 0.1, "{gain} {:?}", r.rows);
    }
}

#[test]
fn weighted_local_estimate_is_stable() {
    let chi = |x: &[f64]| bump(x.iter().map(|c| c * c).sum::<f64>().sqrt() / 4.0);
    let w = Weight::power(-0.5);
    let mut ratios = Vec::new();
    for n in [32, 64, 128] {
        let g = Grid::new(2, n, 8.0).unwrap();
        let data = CauchyData::new(gauss(g, 0.5, 0.7), gauss(g, -0.5, 0.5), 1.0, T_MAX_DEFAULT).unwrap();
        let r = weighted_local_estimate(&data, &w, 2.0, 0.0, chi).unwrap();
        assert_eq!(r.loss, 1.5);
        ratios.push(r.ratio);
        let unit = weighted_local_estimate(&data, &Weight::unit(), 2.0, 0.0, chi).unwrap();
        assert!(unit.ratio.is_finite() && unit.ratio > 0.0);
    }
    assert_eq!(Verdict::from_values(&ratios), Verdict::Stable, "{ratios:?}");
    let g = Grid::new(2, 32, 8.0).unwrap();
    let data = CauchyData::new(gauss(g, 0.0, 1.0), gauss(g, 0.0, 1.0), 0.0, T_MAX_DEFAULT).unwrap();
    assert!(matches!(weighted_local_estimate(&data, &w, 2.0, 0.0, chi), Err(Error::Precondition(_))));
}
