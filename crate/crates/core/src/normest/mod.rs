//! Empirical operator norms, threshold sweeps, and numerical checks of the
//! counterexample, stationary-phase, kernel-decay and substitution lemmas.
//!
//! Every norm here is a maximum over finitely many probes and so a lower
//! bound; growth verdicts compare successive grid refinements.

mod ce2;
mod commutator;
mod family;
mod kernel;
mod opnorm;
mod stationary;
mod substitution;

pub use ce2::{bessel_potential, bessel_potential_log_derivative, ce2_profile, Ce2Report};
pub use commutator::{commutator, commutator_apply, Commutator};
pub use family::{Probe, ProbeTag, TestFamily};
pub use kernel::{kernel_decay_profile, low_frequency_kernel, KernelDecayReport};
pub use opnorm::{
    opnorm_l2, opnorm_lpw, threshold_sweep, GrowthRow, GrowthSummary, GrowthTable, LpwReport, PowerReport, Verdict,
    POWER_TOLERANCE,
};
pub use stationary::{gaussian_amplitude, oscillatory_integral, stationary_decay, StationaryReport};
pub use substitution::{substitution_check, SubstitutionReport};
