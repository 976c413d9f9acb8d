//! Dispersive spin readout through optomechanically induced transparency.
//!
//! A spin dispersively coupled to a mechanical mode shifts its frequency by
//! ±χ. A pumped optical cavity turns that shift into a phase on a weak probe,
//! read out by homodyne detection. The crate covers
//!
//! * [`dynamics`]: exact linear Langevin solution, used both directly and as
//!   an oracle for the closed forms,
//! * [`readout`]: closed-form SNR, measurement time, cooperativity optimum
//!   and the QND budget,
//! * [`siv`]: the SiV ground-state Hamiltonian and its strain coupling,
//! * [`sensing`]: frequency-shift estimation errors against the position and
//!   backaction-evading schemes,
//! * [`config`] and [`sweep`]: file input and CSV output for the CLI.
//!
//! Rates are angular (rad/s) throughout; the readout and sensing formulas
//! work in units of the intrinsic mechanical damping Γ_mech.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Small dense matrix kernels read better with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod params;
pub mod readout;
pub mod sensing;
pub mod siv;
pub mod sweep;

pub use config::{parse_config, RawConfig, RunConfig};
pub use error::{Error, Result};
pub use params::{
    derived_quantities, hz_to_rad, normalize, period_seconds, rad_to_hz, validate, DerivedSet, DriveConfig, Normalized,
    SpinParams, SystemParams, Warning,
};
pub use readout::{
    feasibility_report, measurement_time, optimize_cooperativity, readout_result, snr_components, snr_squared,
    CooperativityMode, FeasibilityReport, Optimum, ReadoutResult, SnrComponents,
};
pub use sensing::{estimation_error, Scheme, SensingInputs, SensingResult};
pub use siv::{MagneticField, SivLevelParams, StrainEnergies, StrainTensor};
pub use sweep::{SweepResult, SweepRow};

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
