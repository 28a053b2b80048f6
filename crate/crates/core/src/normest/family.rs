use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cutoff::{annulus, dot, japanese, norm};
use crate::error::{Error, Result};
use crate::field::{multiply_in_frequency, transform, Direction, SampledField};
use crate::grid::Grid;
use crate::weights::{weighted_norm, Weight};

/// A generator of probe functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProbeTag {
    /// `e^{i <k, x>} e^{-|x - c|^2 / (2 s^2)}` with `c` in `[-1, 1]^n`,
    /// `s` in `[0.2, 1]`, `|k| <= 4`.
    GaussianBumps,
    /// Random phases on the annulus `2^{j-1} <= |xi| <= 2^{j+1}`; `None`
    /// picks the highest annulus below Nyquist.
    AnnularRandom { j: Option<u32> },
    /// `f_mu(x) = int e^{-i|xi| + i<x, xi>} <xi>^{-mu} dxi`, synthesized from
    /// its transform.
    FMu { mu: f64 },
    /// Indicator of a ball of radius in `[0.5, 2]` centred in `[-1, 1]^n`,
    /// smoothed by `e^{-(0.1 |xi|)^2}`.
    IndicatorSmoothed,
    /// `chi(D) delta_c`: a point mass at `c` in `[-1, 1]^n` restricted to the
    /// annulus `2^{j-1} <= |xi| <= 2^{j+1}`; `None` takes the annulus
    /// `nyquist / 4 <= |xi| <= nyquist`, which follows the grid continuously.
    /// Extremal for `L^p` growth of wave-type operators.
    ConcentratedPiece { j: Option<u32> },
    /// `e^{-it|D|} chi(D) delta_c` on the annulus `nyquist / 4 <= |xi| <= nyquist`:
    /// spread over a sphere of radius `t`, it refocuses at `c` under `e^{it|D|}`.
    Focusing { t: f64 },
}

impl ProbeTag {
    pub fn name(&self) -> String {
        match self {
            ProbeTag::GaussianBumps => "gaussian_bumps".into(),
            ProbeTag::AnnularRandom { j: Some(j) } => format!("annular_random({j})"),
            ProbeTag::AnnularRandom { j: None } => "annular_random".into(),
            ProbeTag::FMu { mu } => format!("f_mu({mu})"),
            ProbeTag::IndicatorSmoothed => "indicator_smoothed".into(),
            ProbeTag::ConcentratedPiece { j: Some(j) } => format!("concentrated_piece({j})"),
            ProbeTag::ConcentratedPiece { j: None } => "concentrated_piece".into(),
            ProbeTag::Focusing { t } => format!("focusing({t})"),
        }
    }

    /// Whether the tag produces `count` distinct members; `f_mu` is one function.
    fn is_random(&self) -> bool {
        !matches!(self, ProbeTag::FMu { .. })
    }
}

/// One probe: its label and physical-side samples.
#[derive(Debug, Clone)]
pub struct Probe {
    pub label: String,
    pub field: SampledField,
}

/// Deterministic probe set: `count` members per random tag, drawn from
/// ChaCha8 streams seeded by `seed + 1000 * tag_index`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFamily {
    pub tags: Vec<ProbeTag>,
    pub seed: u64,
    pub count: usize,
}

impl TestFamily {
    pub fn new(tags: Vec<ProbeTag>, seed: u64, count: usize) -> Self {
        Self { tags, seed, count }
    }

    pub fn gaussian(seed: u64, count: usize) -> Self {
        Self::new(vec![ProbeTag::GaussianBumps], seed, count)
    }

    pub fn f_mu(mus: &[f64]) -> Self {
        Self::new(mus.iter().map(|&mu| ProbeTag::FMu { mu }).collect(), 0, 1)
    }

    /// All five generators.
    pub fn standard(seed: u64, count: usize) -> Self {
        Self::new(
            vec![
                ProbeTag::GaussianBumps,
                ProbeTag::AnnularRandom { j: None },
                ProbeTag::FMu { mu: 1.0 },
                ProbeTag::IndicatorSmoothed,
                ProbeTag::ConcentratedPiece { j: None },
            ],
            seed,
            count,
        )
    }

    pub fn len(&self) -> usize {
        self.tags.iter().map(|t| if t.is_random() { self.count } else { 1 }).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn union(&self, other: &TestFamily) -> TestFamily {
        // keeps self's seed; other's tags are drawn from self's streams
        let mut tags = self.tags.clone();
        tags.extend(other.tags.iter().cloned());
        TestFamily { tags, seed: self.seed, count: self.count.max(other.count) }
    }

    /// Unnormalized members on `grid`.
    pub fn members(&self, grid: &Grid) -> Result<Vec<Probe>> {
        let mut out = Vec::new();
        for (i, tag) in self.tags.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(1000 * i as u64));
            let count = if tag.is_random() { self.count } else { 1 };
            for c in 0..count {
                let field = generate(tag, grid, &mut rng)?;
                let label = if tag.is_random() { format!("{}#{c}", tag.name()) } else { tag.name() };
                out.push(Probe { label, field });
            }
        }
        Ok(out)
    }

    /// Members scaled to unit `L^p_w` norm; members with zero norm are dropped.
    pub fn normalized(&self, grid: &Grid, p: f64, w: &Weight) -> Result<Vec<Probe>> {
        let members = self.members(grid)?;
        let scaled: Vec<Option<Probe>> = members
            .into_par_iter()
            .map(|m| {
                let nrm = weighted_norm(&m.field, p, w)?;
                Ok((nrm > 0.0 && nrm.is_finite())
                    .then(|| Probe { label: m.label, field: m.field.scale(Complex64::new(1.0 / nrm, 0.0)) }))
            })
            .collect::<Result<_>>()?;
        Ok(scaled.into_iter().flatten().collect())
    }
}

/// `2^j`, defaulting to the highest annulus below Nyquist.
fn annulus_scale(j: Option<u32>, grid: &Grid) -> Result<f64> {
    let j = match j {
        Some(j) => j as i32,
        None => (grid.nyquist().log2().floor() as i32 - 1).max(0),
    };
    let scale = 2f64.powi(j);
    if 0.5 * scale >= grid.nyquist() {
        return Err(Error::Precondition(format!("annulus 2^{j} lies beyond Nyquist {}", grid.nyquist())));
    }
    Ok(scale)
}

fn generate(tag: &ProbeTag, grid: &Grid, rng: &mut ChaCha8Rng) -> Result<SampledField> {
    let n = grid.dim();
    match tag {
        ProbeTag::GaussianBumps => {
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s: f64 = rng.gen_range(0.2..1.0);
            let k: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0) / (n as f64).sqrt()).collect();
            Ok(SampledField::from_physical(*grid, |x| {
                let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                Complex64::from_polar((-d2 / (2.0 * s * s)).exp(), dot(&k, x))
            }))
        }
        ProbeTag::AnnularRandom { j } => {
            let scale = annulus_scale(*j, grid)?;
            let phases: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            let values = (0..grid.len())
                .map(|k| Complex64::from_polar(annulus(norm(&grid.freq(k)) / scale), phases[k]))
                .collect();
            transform(&SampledField::new(*grid, values, crate::field::Side::Frequency)?, Direction::Inverse)
        }
        ProbeTag::ConcentratedPiece { j } => {
            let scale = match j {
                Some(_) => annulus_scale(*j, grid)?,
                None => grid.nyquist() / 2.0,
            };
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let hat = SampledField::from_frequency(*grid, |xi| Complex64::from_polar(annulus(norm(xi) / scale), -dot(&c, xi)));
            transform(&hat, Direction::Inverse)
        }
        ProbeTag::Focusing { t } => {
            let scale = grid.nyquist() / 2.0;
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let hat = SampledField::from_frequency(*grid, |xi| {
                let r = norm(xi);
                Complex64::from_polar(annulus(r / scale), -dot(&c, xi) - t * r)
            });
            transform(&hat, Direction::Inverse)
        }
        ProbeTag::FMu { mu } => {
            let c = (2.0 * PI).powi(n as i32);
            let hat = SampledField::from_frequency(*grid, |xi| Complex64::from_polar(c * japanese(xi).powf(-mu), -norm(xi)));
            transform(&hat, Direction::Inverse)
        }
        ProbeTag::IndicatorSmoothed => {
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r: f64 = rng.gen_range(0.5..2.0);
            let ind = SampledField::from_physical_real(*grid, |x| {
                let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2 < r * r {
                    1.0
                } else {
                    0.0
                }
            });
            let sigma: Vec<Complex64> = (0..grid.len())
                .map(|k| {
                    let xi = grid.freq(k);
                    Complex64::new((-0.01 * dot(&xi, &xi)).exp(), 0.0)
                })
                .collect();
            multiply_in_frequency(&ind, &sigma)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_are_deterministic_and_normalized() {
        let g = Grid::new(1, 128, 8.0).unwrap();
        let fam = TestFamily::standard(7, 3);
        let a = fam.normalized(&g, 2.0, &Weight::unit()).unwrap();
        let b = fam.normalized(&g, 2.0, &Weight::unit()).unwrap();
        assert_eq!(a.len(), fam.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label, y.label);
            assert_eq!(x.field.values(), y.field.values());
            assert!((weighted_norm(&x.field, 2.0, &Weight::unit()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn f_mu_transform_is_exact() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let f = &TestFamily::f_mu(&[0.75]).members(&g).unwrap()[0].field;
        let hat = transform(f, Direction::Forward).unwrap();
        for k in 0..g.len() {
            let xi = g.freq(k);
            let want = Complex64::from_polar(2.0 * PI * japanese(&xi).powf(-0.75), -norm(&xi));
            assert!((hat.values()[k] - want).norm() < 1e-12);
        }
    }
}
