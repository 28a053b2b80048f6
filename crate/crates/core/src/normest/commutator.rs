use num_complex::Complex64;

use crate::applicator::LinearOperator;
use crate::error::{Error, Result};
use crate::field::{SampledField, Side};
use crate::grid::Grid;

fn multiply<F: Fn(&[f64]) -> f64>(b: &F, u: &SampledField, power: i32) -> SampledField {
    let grid = *u.grid();
    let values = u.values().iter().enumerate().map(|(k, v)| v * b(&grid.point(k)).powi(power)).collect();
    SampledField::new(grid, values, Side::Physical).expect("same grid and length")
}

/// `b T u - T(b u)`.
pub fn commutator<T, F>(b: &F, op: &T, u: &SampledField) -> Result<SampledField>
where
    T: LinearOperator + ?Sized,
    F: Fn(&[f64]) -> f64,
{
    let btu = multiply(b, &op.apply(u)?, 1);
    let tbu = op.apply(&multiply(b, u, 1))?;
    btu.sub(&tbu)
}

/// `[b, T]` as an operator, for the norm estimators; `b` is real.
pub struct Commutator<'a, T: ?Sized, F> {
    pub b: F,
    pub op: &'a T,
}

impl<'a, T, F> Commutator<'a, T, F>
where
    T: LinearOperator + ?Sized,
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(b: F, op: &'a T) -> Self {
        Self { b, op }
    }
}

impl<T, F> LinearOperator for Commutator<'_, T, F>
where
    T: LinearOperator + ?Sized,
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn grid(&self) -> &Grid {
        self.op.grid()
    }

    fn apply(&self, u: &SampledField) -> Result<SampledField> {
        commutator(&self.b, self.op, u)
    }

    fn adjoint(&self, v: &SampledField) -> Result<SampledField> {
        // [b, T]^* = T^* b - b T^*
        let tbv = self.op.adjoint(&multiply(&self.b, v, 1))?;
        tbv.sub(&multiply(&self.b, &self.op.adjoint(v)?, 1))
    }
}

/// `T((b(x) - b(.))^k u)(x) = sum_i C(k, i) (-1)^i b(x)^{k-i} T(b^i u)(x)`, with
/// `k + 1` applications of `T`.
pub fn commutator_apply<T, F>(b: &F, op: &T, u: &SampledField, k: u32) -> Result<SampledField>
where
    T: LinearOperator + ?Sized,
    F: Fn(&[f64]) -> f64,
{
    if k == 0 {
        return Err(Error::Config("commutator order k must be at least 1".into()));
    }
    if u.side() != Side::Physical {
        return Err(Error::Usage("commutators act on physical-side fields".into()));
    }
    let mut acc = SampledField::zeros(*u.grid(), Side::Physical);
    let mut binom = 1.0f64;
    for i in 0..=k {
        let t = op.apply(&multiply(b, u, i as i32))?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let term = multiply(b, &t, (k - i) as i32).scale(Complex64::new(sign * binom, 0.0));
        acc = acc.add(&term)?;
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    Ok(acc)
}
