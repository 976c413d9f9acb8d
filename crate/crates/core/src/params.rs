//! Parameter containers, the Hz ↔ rad/s convention, validation and the
//! Γ_mech-normalised view used by the readout and sensing formulas.
//!
//! All rates stored here are angular (rad/s). Durations reported in seconds
//! follow the period convention `t = 2π·x/Γ` for a dimensionless time
//! `x = τ·Γ`, the same convention under which the spin lifetime is
//! `T1 = 2π/γ_rel`. See [`period_seconds`].

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};

/// Converts a linear frequency (Hz) into an angular one (rad/s).
pub fn hz_to_rad(hz: f64) -> f64 {
    hz * TAU
}

/// Converts an angular frequency (rad/s) into a linear one (Hz).
pub fn rad_to_hz(rad: f64) -> f64 {
    rad / TAU
}

/// Seconds corresponding to a dimensionless time `x` measured in units of
/// `1/rate`, under the period convention `t = 2π·x/rate`.
///
/// Measurement times, Purcell times and `T1` are all reported this way so that
/// their ratios are convention-free. For the e-folding time divide by 2π.
pub fn period_seconds(x: f64, rate: f64) -> f64 {
    TAU * x / rate
}

/// Threshold used for every "≪" / "≫" regime check: `a ≪ b` means `a ≤ 0.1·b`.
pub const MUCH_LESS: f64 = 0.1;

/// Optomechanical device rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Optical energy decay rate κ (rad/s).
    pub kappa: f64,
    /// Intrinsic mechanical energy decay rate Γ_mech (rad/s).
    pub gamma_mech: f64,
    /// Mechanical frequency ω_m (rad/s).
    pub omega_m: f64,
    /// Single-photon optomechanical coupling g₀ (rad/s).
    pub g0: f64,
    /// Thermal phonon occupation of the mechanical bath.
    pub n_th: f64,
}

impl SystemParams {
    pub fn new(kappa: f64, gamma_mech: f64, omega_m: f64, g0: f64, n_th: f64) -> Result<Self> {
        let p = SystemParams { kappa, gamma_mech, omega_m, g0, n_th };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        positive("kappa", self.kappa)?;
        positive("gamma_mech", self.gamma_mech)?;
        positive("omega_m", self.omega_m)?;
        non_negative("g0", self.g0)?;
        non_negative("n_th", self.n_th)
    }

    /// True when κ < ω_m, the regime assumed by the beam-splitter form of the
    /// linearised interaction.
    pub fn sideband_resolved(&self) -> bool {
        self.kappa < self.omega_m
    }
}

/// Pump and probe settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    /// Optomechanical cooperativity C_om = 4G²/(κΓ_mech).
    pub c_om: f64,
    /// Probe amplitude a_pr,in in (rad/s)^½, real and non-negative.
    pub a_pr_in: f64,
    /// Probe-cavity detuning δ (rad/s).
    pub delta: f64,
    /// Homodyne angle φ (rad).
    pub phi: f64,
    /// Detection efficiency η.
    pub eta: f64,
}

impl DriveConfig {
    pub fn new(c_om: f64, a_pr_in: f64, delta: f64, phi: f64, eta: f64) -> Result<Self> {
        let d = DriveConfig { c_om, a_pr_in, delta, phi, eta };
        d.check()?;
        Ok(d)
    }

    /// Resonant probe, φ = 0, perfect detection.
    pub fn resonant(c_om: f64, a_pr_in: f64) -> Result<Self> {
        Self::new(c_om, a_pr_in, 0.0, 0.0, 1.0)
    }

    pub fn check(&self) -> Result<()> {
        non_negative("c_om", self.c_om)?;
        non_negative("a_pr_in", self.a_pr_in)?;
        finite("delta", self.delta)?;
        finite("phi", self.phi)?;
        finite("eta", self.eta)?;
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::invalid("eta", format!("{} is outside [0, 1]", self.eta)));
        }
        Ok(())
    }
}

/// Spin-mechanical coupling parameters. χ is always recomputed from g_sm and
/// Δ_sm, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinParams {
    pub g_sm: f64,
    pub delta_sm: f64,
    pub n_spins: u32,
    /// Polarisation exponent β ∈ {1, 2}.
    pub beta: u32,
    /// Intrinsic spin relaxation rate γ_rel = 2π/T1 (rad/s). Zero means no
    /// intrinsic relaxation.
    pub gamma_rel: f64,
}

impl SpinParams {
    pub fn new(g_sm: f64, delta_sm: f64, n_spins: u32, beta: u32, gamma_rel: f64) -> Result<Self> {
        let s = SpinParams { g_sm, delta_sm, n_spins, beta, gamma_rel };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        non_negative("g_sm", self.g_sm)?;
        finite("delta_sm", self.delta_sm)?;
        if self.delta_sm == 0.0 {
            return Err(Error::invalid("delta_sm", "must be non-zero"));
        }
        if self.n_spins == 0 {
            return Err(Error::invalid("n_spins", "must be a positive integer"));
        }
        if !matches!(self.beta, 1 | 2) {
            return Err(Error::invalid("beta", format!("{} is not 1 or 2", self.beta)));
        }
        non_negative("gamma_rel", self.gamma_rel)
    }

    /// Dispersive shift χ = g_sm²/Δ_sm (rad/s).
    pub fn chi(&self) -> f64 {
        dispersive_shift(self.g_sm, self.delta_sm)
    }
}

pub fn dispersive_shift(g_sm: f64, delta_sm: f64) -> f64 {
    g_sm * g_sm / delta_sm
}

/// Quantities that follow directly from the system and the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedSet {
    /// Optically enhanced coupling G (rad/s).
    pub coupling: f64,
    /// Total mechanical damping Γ_mech(1 + C_om) (rad/s).
    pub gamma_total: f64,
}

pub fn derived_quantities(sys: &SystemParams, drive: &DriveConfig) -> DerivedSet {
    DerivedSet {
        coupling: (drive.c_om * sys.kappa * sys.gamma_mech / 4.0).sqrt(),
        gamma_total: sys.gamma_mech * (1.0 + drive.c_om),
    }
}

/// A regime assumption of the analytic formulas that the inputs violate.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// κ ≫ Γ_mech fails.
    KappaNotDominant { ratio: f64 },
    /// ω_m ≫ κ (good-cavity limit) fails.
    NotSidebandResolved { ratio: f64 },
    /// G ≪ κ fails.
    StrongCoupling { ratio: f64 },
    /// χ ≪ κ fails.
    ChiNotSmall { ratio: f64 },
    /// |g_sm/Δ_sm| ≪ 1 fails, so the dispersive picture is questionable.
    NotDispersive { ratio: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::KappaNotDominant { ratio } => {
                write!(f, "kappa ≫ gamma_mech violated (kappa/gamma_mech = {ratio:.3e})")
            }
            Warning::NotSidebandResolved { ratio } => {
                write!(f, "omega_m ≫ kappa violated (kappa/omega_m = {ratio:.3e})")
            }
            Warning::StrongCoupling { ratio } => write!(f, "G ≪ kappa violated (G/kappa = {ratio:.3e})"),
            Warning::ChiNotSmall { ratio } => write!(f, "chi ≪ kappa violated (chi/kappa = {ratio:.3e})"),
            Warning::NotDispersive { ratio } => {
                write!(f, "dispersive validity: |g_sm/delta_sm| = {ratio:.3e} exceeds {MUCH_LESS}")
            }
        }
    }
}

/// Checks the regime assumptions of the closed-form results. Hard errors only
/// for non-finite or negative rates; everything else becomes a warning.
pub fn validate(sys: &SystemParams, drive: &DriveConfig, spin: &SpinParams) -> Result<Vec<Warning>> {
    sys.check()?;
    drive.check()?;
    spin.check()?;

    let mut out = Vec::new();
    let much_less = |small: f64, large: f64| small <= MUCH_LESS * large;

    if !much_less(sys.gamma_mech, sys.kappa) {
        out.push(Warning::KappaNotDominant { ratio: sys.kappa / sys.gamma_mech });
    }
    if !much_less(sys.kappa, sys.omega_m) {
        out.push(Warning::NotSidebandResolved { ratio: sys.kappa / sys.omega_m });
    }
    let g = derived_quantities(sys, drive).coupling;
    if !much_less(g, sys.kappa) {
        out.push(Warning::StrongCoupling { ratio: g / sys.kappa });
    }
    let chi = spin.chi().abs();
    if !much_less(chi, sys.kappa) {
        out.push(Warning::ChiNotSmall { ratio: chi / sys.kappa });
    }
    let disp = (spin.g_sm / spin.delta_sm).abs();
    if disp > MUCH_LESS {
        out.push(Warning::NotDispersive { ratio: disp });
    }
    Ok(out)
}

/// Inputs expressed in units of Γ_mech: the only combinations the readout and
/// sensing formulas depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalized {
    /// χ/Γ_mech.
    pub chi: f64,
    /// δ/Γ_mech.
    pub delta: f64,
    pub c_om: f64,
    /// a_pr,in/√Γ_mech.
    pub a_pr_norm: f64,
    pub n_th: f64,
}

pub fn normalize(sys: &SystemParams, drive: &DriveConfig, spin: &SpinParams) -> Normalized {
    let g = sys.gamma_mech;
    Normalized {
        chi: spin.chi() / g,
        delta: drive.delta / g,
        c_om: drive.c_om,
        a_pr_norm: drive.a_pr_in / g.sqrt(),
        n_th: sys.n_th,
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{v} is not finite")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    finite(name, v)?;
    if v < 0.0 {
        return Err(Error::invalid(name, format!("{v} is negative")));
    }
    Ok(())
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    non_negative(name, v)?;
    if v == 0.0 {
        return Err(Error::invalid(name, "must be positive"));
    }
    Ok(())
}
