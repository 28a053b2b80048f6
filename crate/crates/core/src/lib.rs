//! Numerical laboratory for Fourier integral operators
//!
//! `T u(x) = (2 pi)^{-n} int e^{i phi(x, xi)} a(x, xi) u^(xi) dxi`
//!
//! on uniform periodic grids, with the dyadic and conic decompositions,
//! Muckenhoupt weights, and the experiments that probe boundedness thresholds.

pub mod applicator;
pub mod cutoff;
pub mod decompose;
pub mod error;
pub mod field;
pub mod normest;
pub mod grid;
pub mod hyperbolic;
pub mod io;
pub mod phase;
pub mod seminorm;
pub mod special;
pub mod symbol;
pub mod weights;

pub use error::{Error, Result};
pub use field::{transform, Direction, SampledField, Side};
pub use grid::{make_grid, Grid};
pub use phase::{Diffeo, PhaseClass, PhaseFamily, PhaseSpec};
pub use symbol::{OrderParams, RoughFactor, SymbolFamily, SymbolSpec, TabulatedSymbol};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/grids.md")]
    pub struct Grids;
    #[doc = include_str!("../../../book/src/operators.md")]
    pub struct Operators;
    #[doc = include_str!("../../../book/src/decompositions.md")]
    pub struct Decompositions;
    #[doc = include_str!("../../../book/src/weights.md")]
    pub struct Weights;
    #[doc = include_str!("../../../book/src/norm-estimates.md")]
    pub struct NormEstimates;
    #[doc = include_str!("../../../book/src/wave.md")]
    pub struct Wave;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
