//! Amplitudes `a(x, xi)` with declared symbol-class orders.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cutoff::{dot, low_cut, norm};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Order parameters `(m, rho, delta)` of a symbol class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderParams {
    pub m: f64,
    pub rho: f64,
    pub delta: f64,
}

impl OrderParams {
    pub fn new(m: f64, rho: f64, delta: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::Config("m must be finite".into()));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::Config(format!("rho = {rho} must lie in [0, 1]")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Config(format!("delta = {delta} must lie in [0, 1]")));
        }
        Ok(Self { m, rho, delta })
    }

    /// Classical `S^m_{1,0}`.
    pub fn classical(m: f64) -> Self {
        Self { m, rho: 1.0, delta: 0.0 }
    }

    /// `min(0, n (rho - delta))`.
    pub fn lambda(&self, n: usize) -> f64 {
        (n as f64 * (self.rho - self.delta)).min(0.0)
    }
}

/// A bounded measurable function of the first spatial coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RoughFactor {
    Constant(f64),
    /// `left` for `x_1 < at`, `right` otherwise.
    Step { left: f64, right: f64, at: f64 },
    /// `offset + amplitude * frac(x_1 / period)`.
    Sawtooth { period: f64, amplitude: f64, offset: f64 },
}

impl RoughFactor {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let x1 = x.first().copied().unwrap_or(0.0);
        match *self {
            RoughFactor::Constant(c) => c,
            RoughFactor::Step { left, right, at } => {
                if x1 < at {
                    left
                } else {
                    right
                }
            }
            RoughFactor::Sawtooth { period, amplitude, offset } => {
                let r = x1 / period;
                offset + amplitude * (r - r.floor())
            }
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match *self {
            RoughFactor::Constant(c) => c.abs(),
            RoughFactor::Step { left, right, .. } => left.abs().max(right.abs()),
            RoughFactor::Sawtooth { amplitude, offset, .. } => offset.abs().max((offset + amplitude).abs()),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, RoughFactor::Constant(_))
    }
}

/// Amplitude tabulated on `(x_index, xi_index)` pairs of a grid; missing
/// entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSymbol {
    pub grid: Grid,
    pub entries: BTreeMap<(usize, usize), Complex64>,
}

impl TabulatedSymbol {
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        let g = &self.grid;
        let xm: Vec<usize> = x.iter().map(|&c| g.axis_cell_of(c)).collect();
        let km: Vec<usize> = xi.iter().map(|&c| g.axis_bin_of(c)).collect();
        let key = (g.ravel(&xm), g.ravel(&km));
        self.entries.get(&key).copied().unwrap_or_default()
    }

    /// True when every tabulated frequency column is complete and constant in x.
    pub fn x_independent(&self) -> bool {
        let mut columns: BTreeMap<usize, (Complex64, usize)> = BTreeMap::new();
        for (&(_, k), &v) in &self.entries {
            let e = columns.entry(k).or_insert((v, 0));
            if e.0 != v {
                return false;
            }
            e.1 += 1;
        }
        columns.values().all(|&(_, count)| count == self.grid.len())
    }
}

/// `(1 + |xi|^2)^{m/2}`.
pub fn bessel_weight(xi: &[f64], m: f64) -> f64 {
    (1.0 + dot(xi, xi)).powf(0.5 * m)
}

pub type AmplitudeFn = dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync;

/// Evaluation rule of a [`SymbolSpec`].
#[derive(Clone)]
pub enum SymbolFamily {
    /// `<xi>^m`.
    BesselPower { m: f64 },
    /// `chi_0(xi) |xi|^power`; `chi_0` is 1 on `|xi| <= 1` and 0 on `|xi| >= 2`.
    CutoffTimesPower { power: f64 },
    /// `g(x) <xi>^m` with `g` bounded measurable.
    XModulated { factor: RoughFactor, m: f64 },
    Tabulated(Arc<TabulatedSymbol>),
    /// Arbitrary rule; `x_independent` declares whether it ignores `x`.
    Custom { rule: Arc<AmplitudeFn>, x_independent: bool, name: String },
}

impl fmt::Debug for SymbolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolFamily::BesselPower { m } => write!(f, "BesselPower({m})"),
            SymbolFamily::CutoffTimesPower { power } => write!(f, "CutoffTimesPower({power})"),
            SymbolFamily::XModulated { factor, m } => write!(f, "XModulated({factor:?}, {m})"),
            SymbolFamily::Tabulated(t) => write!(f, "Tabulated({} entries)", t.entries.len()),
            SymbolFamily::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// An amplitude with its declared class `S^m_{rho,delta}` (or
/// `L^infty S^m_rho` when `rough_in_x`).
#[derive(Debug, Clone)]
pub struct SymbolSpec {
    pub order: OrderParams,
    pub rough_in_x: bool,
    /// Number of x-derivatives the rule supports (ignored when rough).
    pub x_smoothness: usize,
    pub family: SymbolFamily,
}

impl SymbolSpec {
    /// `<xi>^m` declared in `S^m_{1,0}`.
    pub fn bessel_power(m: f64) -> Self {
        Self { order: OrderParams::classical(m), rough_in_x: false, x_smoothness: usize::MAX, family: SymbolFamily::BesselPower { m } }
    }

    /// The constant amplitude 1.
    pub fn one() -> Self {
        Self::bessel_power(0.0)
    }

    /// `chi_0(xi) |xi|^power`; compactly supported, declared in `S^0_{1,0}`.
    pub fn cutoff_times_power(power: f64) -> Result<Self> {
        if power < 0.0 {
            return Err(Error::Config(format!("cutoff_times_power needs power >= 0, got {power}")));
        }
        Ok(Self {
            order: OrderParams::classical(0.0),
            rough_in_x: false,
            x_smoothness: usize::MAX,
            family: SymbolFamily::CutoffTimesPower { power },
        })
    }

    pub fn x_modulated(m: f64, factor: RoughFactor) -> Self {
        let rough = !factor.is_constant();
        Self {
            order: OrderParams::classical(m),
            rough_in_x: rough,
            x_smoothness: if rough { 0 } else { usize::MAX },
            family: SymbolFamily::XModulated { factor, m },
        }
    }

    pub fn tabulated(order: OrderParams, table: TabulatedSymbol) -> Self {
        Self { order, rough_in_x: true, x_smoothness: 0, family: SymbolFamily::Tabulated(Arc::new(table)) }
    }

    pub fn custom<F>(order: OrderParams, rough_in_x: bool, x_independent: bool, name: &str, rule: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            order,
            rough_in_x,
            x_smoothness: if rough_in_x { 0 } else { 4 },
            family: SymbolFamily::Custom { rule: Arc::new(rule), x_independent, name: name.to_string() },
        }
    }

    /// Same rule with a different declared order.
    pub fn declared_as(mut self, order: OrderParams) -> Self {
        self.order = order;
        self
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        match &self.family {
            SymbolFamily::BesselPower { m } => Complex64::new(bessel_weight(xi, *m), 0.0),
            SymbolFamily::CutoffTimesPower { power } => {
                let r = norm(xi);
                let p = if *power == 0.0 { 1.0 } else { r.powf(*power) };
                Complex64::new(low_cut(r) * p, 0.0)
            }
            SymbolFamily::XModulated { factor, m } => Complex64::new(factor.eval(x) * bessel_weight(xi, *m), 0.0),
            SymbolFamily::Tabulated(t) => t.eval(x, xi),
            SymbolFamily::Custom { rule, .. } => rule(x, xi),
        }
    }

    pub fn is_x_independent(&self) -> bool {
        match &self.family {
            SymbolFamily::BesselPower { .. } | SymbolFamily::CutoffTimesPower { .. } => true,
            SymbolFamily::XModulated { factor, .. } => factor.is_constant(),
            SymbolFamily::Tabulated(t) => t.x_independent(),
            SymbolFamily::Custom { x_independent, .. } => *x_independent,
        }
    }

    /// Product with a frequency cutoff; the result keeps this symbol's order.
    pub fn times_frequency_cutoff<F>(&self, name: &str, cutoff: F) -> SymbolSpec
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let inner = self.clone();
        let x_independent = self.is_x_independent();
        SymbolSpec {
            order: self.order,
            rough_in_x: self.rough_in_x,
            x_smoothness: self.x_smoothness,
            family: SymbolFamily::Custom {
                rule: Arc::new(move |x: &[f64], xi: &[f64]| {
                    let c = cutoff(xi);
                    if c == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        inner.eval(x, xi) * c
                    }
                }),
                x_independent,
                name: name.to_string(),
            },
        }
    }

    pub fn family_name(&self) -> String {
        match &self.family {
            SymbolFamily::BesselPower { .. } => "bessel_power".into(),
            SymbolFamily::CutoffTimesPower { .. } => "cutoff_times_power".into(),
            SymbolFamily::XModulated { .. } => "x_modulated".into(),
            SymbolFamily::Tabulated(_) => "tabulated".into(),
            SymbolFamily::Custom { name, .. } => name.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_power_is_exact() {
        let a = SymbolSpec::bessel_power(-1.5);
        for &xi in &[0.0, 0.3, 2.0, 17.0] {
            let v = a.eval(&[0.4], &[xi]);
            assert_eq!(v.re, (1.0 + xi * xi).powf(-0.75));
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn order_validation_names_field() {
        let e = OrderParams::new(0.0, 1.5, 0.0).unwrap_err();
        assert!(e.to_string().contains("rho"));
        assert!(OrderParams::new(0.0, 1.0, -0.1).unwrap_err().to_string().contains("delta"));
        assert_eq!(OrderParams::new(0.0, 0.5, 1.0).unwrap().lambda(2), -1.0);
    }

    #[test]
    fn cutoff_power_vanishes_outside() {
        let a = SymbolSpec::cutoff_times_power(1.0).unwrap();
        assert_eq!(a.eval(&[0.0], &[3.0]).re, 0.0);
        assert_eq!(a.eval(&[0.0], &[0.5]).re, 0.5);
        assert_eq!(a.eval(&[0.0], &[0.0]).re, 0.0);
        let c = SymbolSpec::cutoff_times_power(0.0).unwrap();
        assert_eq!(c.eval(&[0.0], &[0.0]).re, 1.0);
    }

    #[test]
    fn modulated_step() {
        let a = SymbolSpec::x_modulated(0.0, RoughFactor::Step { left: 1.0, right: 2.0, at: 0.0 });
        assert!(a.rough_in_x);
        assert_eq!(a.eval(&[-1.0], &[5.0]).re, 1.0);
        assert_eq!(a.eval(&[1.0], &[5.0]).re, 2.0);
    }
}
