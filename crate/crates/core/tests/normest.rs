use fiolab::applicator::{FioOperator, LinearOperator, Multiplier};
use fiolab::normest::{
    ce2_profile, commutator, gaussian_amplitude, kernel_decay_profile, low_frequency_kernel, opnorm_l2, opnorm_lpw, stationary_decay,
    substitution_check, ProbeTag, TestFamily,
};
use fiolab::weights::{truncated_log, Weight};
use fiolab::{Error, Grid, PhaseSpec, Result, SampledField, SymbolSpec};
use num_complex::Complex64;

/// `a S + b T`.
struct Combination<'a> {
    a: Complex64,
    s: &'a FioOperator,
    b: Complex64,
    t: &'a FioOperator,
}

impl LinearOperator for Combination<'_> {
    fn grid(&self) -> &Grid {
        &self.s.grid
    }

    fn apply(&self, u: &SampledField) -> Result<SampledField> {
        self.s.apply(u)?.scale(self.a).add(&self.t.apply(u)?.scale(self.b))
    }

    fn adjoint(&self, v: &SampledField) -> Result<SampledField> {
        self.s.adjoint(v)?.scale(self.a.conj()).add(&self.t.adjoint(v)?.scale(self.b.conj()))
    }
}

fn unimodular(g: Grid) -> Vec<Multiplier> {
    vec![
        Multiplier::from_rule(g, |_| Complex64::new(1.0, 0.0)).unwrap(),
        Multiplier::from_rule(g, |xi| Complex64::from_polar(1.0, xi[0].abs())).unwrap(),
        Multiplier::from_rule(g, |xi| Complex64::from_polar(1.0, 0.8 * xi[0])).unwrap(),
    ]
}

#[test]
fn family_estimate_is_monotone() {
    let g = Grid::new(1, 256, 16.0).unwrap();
    let op = FioOperator::new(SymbolSpec::bessel_power(-0.5), PhaseSpec::wave(1.0), g);
    let small = TestFamily::gaussian(4, 3);
    let big = small.union(&TestFamily::new(vec![ProbeTag::AnnularRandom { j: Some(2) }, ProbeTag::FMu { mu: 0.8 }], 4, 3));
    for (p, w) in [(2.0, Weight::unit()), (3.0, Weight::power(-0.5))] {
        let (a, b) = (opnorm_lpw(&op, p, &w, &small).unwrap(), opnorm_lpw(&op, p, &w, &big).unwrap());
        assert!(b.value >= a.value, "{} < {}", b.value, a.value);
    }
    assert!(opnorm_lpw(&op, 2.0, &Weight::unit(), &TestFamily::new(vec![], 0, 3)).is_err());
}

#[test]
fn power_iteration_dominates_the_family_estimate() {
    let g = Grid::new(1, 256, 16.0).unwrap();
    let fam = TestFamily::standard(9, 4);
    let mut ops = unimodular(g);
    ops.push(Multiplier::from_rule(g, |xi| Complex64::new(1.0 / (1.0 + xi[0] * xi[0]).sqrt(), 0.0)).unwrap());
    ops.push(Multiplier::from_rule(g, |xi| Complex64::from_polar((1.0 + xi[0] * xi[0]).powf(0.25), xi[0].abs())).unwrap());
    for (i, m) in ops.iter().enumerate() {
        let power = opnorm_l2(m, 3000, 11).unwrap();
        assert!((power.value - m.sup_abs()).abs() <= 1e-6, "{i}: {} vs {}", power.value, m.sup_abs());
        let family = opnorm_lpw(m, 2.0, &Weight::unit(), &fam).unwrap();
        assert!(power.value >= family.value - 1e-10, "{i}");
        if i < 3 {
            assert!(power.value - family.value <= 1e-3, "{i}: {} vs {}", power.value, family.value);
        }
    }
}

#[test]
fn commutator_is_linear_in_the_operator() {
    let g = Grid::new(1, 256, 16.0).unwrap();
    let s = FioOperator::new(SymbolSpec::bessel_power(-1.0), PhaseSpec::wave(1.0), g);
    let t = FioOperator::new(SymbolSpec::bessel_power(-0.5), PhaseSpec::shifted(-0.5), g);
    let (a, b) = (Complex64::new(0.7, 0.2), Complex64::new(-1.5, 1.0));
    let u = SampledField::from_physical_real(g, |x| (-(x[0] - 0.4).powi(2)).exp());
    let sum = Combination { a, s: &s, b, t: &t };
    let lhs = commutator(&truncated_log, &sum, &u).unwrap();
    let rhs = commutator(&truncated_log, &s, &u).unwrap().scale(a).add(&commutator(&truncated_log, &t, &u).unwrap().scale(b)).unwrap();
    assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12 * lhs.max_abs().max(1.0));
}

#[test]
fn low_frequency_kernels_decay() {
    let smooth = SymbolSpec::cutoff_times_power(0.0).unwrap();
    let cusp = SymbolSpec::cutoff_times_power(1.0).unwrap();
    let grids = [Grid::new(1, 1024, 128.0).unwrap(), Grid::new(1, 2048, 256.0).unwrap()];
    for (b, mu) in [(&smooth, 0.9), (&cusp, 0.0)] {
        let v: Vec<f64> = grids.iter().map(|g| kernel_decay_profile(b, &[0.0], mu, g, 100.0).unwrap().weighted_sup).collect();
        assert!(v.iter().all(|x| x.is_finite()));
        assert!((v[0] - v[1]).abs() <= 0.1 * v[0], "{} mu={mu}: {v:?}", b.family_name());
    }
    // dyadic shell maxima: the smooth cutoff decays faster than any power, the cusp like |y|^{-2}
    let g = grids[1];
    let shells = |b: &SymbolSpec| -> Vec<f64> {
        let k = low_frequency_kernel(b, &[0.0], &g).unwrap();
        [12.5, 25.0, 50.0, 100.0]
            .iter()
            .map(|&r| (0..g.len()).filter(|&i| (r..2.0 * r).contains(&g.point(i)[0].abs())).map(|i| k[i].norm()).fold(0.0, f64::max))
            .collect()
    };
    let (s, c) = (shells(&smooth), shells(&cusp));
    let ratios = |v: &[f64]| v.windows(2).map(|w| w[1] / w[0]).collect::<Vec<f64>>();
    let (rs, rc) = (ratios(&s), ratios(&c));
    assert!(rs.windows(2).all(|w| w[1] < w[0]), "{rs:?}");
    assert!(rc.iter().all(|r| (0.15..=0.35).contains(r)), "{rc:?}");
    assert!(s[3] <= 1e-2 * c[3], "{s:?} {c:?}");
}

#[test]
fn counterexample_finiteness_verdicts() {
    let g = Grid::new(1, 1024, 16.0).unwrap();
    // finite iff mu > (n + 1)/2 - 1/p = 0.5 at p = 2
    let r = ce2_profile(0.0, 0.75, 0.9, 2.0, &g).unwrap();
    assert!(r.f_mu_finite);
    let r = ce2_profile(0.0, 0.4, 0.9, 2.0, &g).unwrap();
    assert!(!r.f_mu_finite);
    assert!(matches!(ce2_profile(0.0, 1.0, 0.9, 2.0, &g), Err(Error::Precondition(_))));
}

#[test]
fn inflated_support_stays_within_the_bound() {
    // with a dilated Gaussian amplitude I(lambda, 0) = sqrt(2 pi / (1/lambda - i lambda)),
    // so the measured decay is lambda^{-1/2}, inside the bound lambda^{n mu - n/2} = 1
    let lambdas: Vec<f64> = (3..=9).map(|k| 2f64.powi(k)).collect();
    let xs = vec![vec![0.0]];
    let r = stationary_decay(&PhaseSpec::quadratic(), &gaussian_amplitude(), &lambdas, &xs, 8.0, 0.5).unwrap();
    assert_eq!(r.expected, 0.0);
    for (&l, &m) in lambdas.iter().zip(&r.maxima) {
        let exact = (2.0 * std::f64::consts::PI / Complex64::new(1.0 / l, -l).norm()).sqrt();
        assert!((m - exact).abs() <= 1e-6 * exact, "lambda = {l}: {m} vs {exact}");
    }
    assert!(r.slope <= r.expected + 0.1);
    assert!((r.slope + 0.5).abs() <= 0.01, "{}", r.slope);
}

#[test]
fn planar_substitution() {
    let g = Grid::new(2, 256, 8.0).unwrap();
    // per-axis image density rho; a bin four cells wide holds at most ceil(4 rho) images per axis
    let maps: [(fn(&[f64]) -> Vec<f64>, f64, f64); 3] = [
        (|x| x.iter().map(|v| 2.0 * v).collect(), 2.0, 0.5),
        (|x| x.iter().map(|v| v + 0.25 * v.sin()).collect(), 0.75, 4.0 / 3.0),
        (|x| x.to_vec(), 1.0, 1.0),
    ];
    for (t, c, rho) in maps {
        let r = substitution_check(&t, c, &g).unwrap();
        assert_eq!(r.bound, 2.0 * 2f64.sqrt() / c);
        assert!(r.max_density <= r.bound);
        let cap = ((4.0 * rho - 1e-9).ceil() / 4.0).powi(2);
        assert!(r.max_density <= cap + 1e-12, "{} vs {cap}", r.max_density);
        assert!(r.max_density >= rho * rho * 0.99, "{} vs {}", r.max_density, rho * rho);
        assert!(r.formula_errors.iter().all(|&e| e < 0.01), "{:?}", r.formula_errors);
    }
}
