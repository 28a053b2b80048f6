//! Frequency decompositions: dyadic annuli, Seeger-Sogge-Stein cones, and
//! reduction of homogeneous phases to a linear part plus a small remainder.

pub mod dyadic;
pub mod reduce;
pub mod sss;

pub use dyadic::{littlewood_paley, littlewood_paley_with_radius, DyadicPartition};
pub use reduce::{phase_reduce, ReducedPhase};
pub use sss::{cardinality_bounds, sss_frame, sss_symbol, ConeFrame};
