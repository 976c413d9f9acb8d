//! Estimation error of a small mechanical frequency shift for OMIT readout
//! and for the competing position and backaction-evading schemes.
//!
//! All formulas assume the steady state (τ ≫ 1/Γ_mech). Every scheme is
//! compared at the same steady-state phonon number n_ss (taken at ε = 0), and
//! its error is mapped onto the normal form
//!
//! ```text
//! (Δε)² = Γ/(4 n_ss τ) · (1 + 2 n_th + 2 n_add)
//! ```
//!
//! which defines the equivalent added noise n_add.

use crate::error::{Error, Result};
use crate::readout::snr_squared;
use crate::sweep::SweepResult;

/// Readout scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// OMIT readout with perfect detection.
    Omit,
    /// OMIT readout with detection efficiency η.
    OmitImperfect,
    /// Continuous position detection.
    Position,
    /// Two-tone backaction-evading measurement.
    Bae,
}

/// Inputs of one estimation-error evaluation, in units of Γ_mech.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingInputs {
    /// τ·Γ_mech.
    pub tau: f64,
    pub c_om: f64,
    /// δ/Γ_mech.
    pub delta: f64,
    pub n_th: f64,
    pub eta: f64,
    /// a_pr,in/√Γ_mech.
    pub a_pr_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingResult {
    pub scheme: Scheme,
    /// (Δε)²(τ) in units of Γ_mech².
    pub error_sq: f64,
    pub n_add_equiv: f64,
    pub params_echo: SensingInputs,
}

/// Steady-state phonon number at ε = 0, `4C a²/(1 + C)²` in Γ units.
pub fn steady_phonons(c_om: f64, a_pr_norm: f64) -> f64 {
    4.0 * c_om * a_pr_norm * a_pr_norm / (1.0 + c_om).powi(2)
}

/// Normal-form prefactor Γ/(4 n_ss τ).
pub fn normal_form_base(inp: &SensingInputs) -> f64 {
    1.0 / (4.0 * steady_phonons(inp.c_om, inp.a_pr_norm) * inp.tau)
}

/// Added detection noise of an inefficient homodyne detector, (1 − η)/(2η).
pub fn detection_noise_quanta(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("eta = {eta} must lie in (0, 1]")));
    }
    Ok((1.0 - eta) / (2.0 * eta))
}

/// Estimation error of a frequency shift for the chosen scheme.
///
/// ```text
/// OMIT:        [Γ'² + 4δ²][Γ'² + 8n_th Γ²C + 4δ²] / (64 Γ²C² τ a²)
/// imperfect η: OMIT + (1 − η)/η · [Γ'² + 4δ²]² / (64 Γ²C² τ a²)
/// position:    Γ/(4 n_ss τ) · (2 + 2 n_th)
/// BAE:         Γ/(4 n_ss τ) · (1 + 8C(1 + 2 n_th)) / (8C)
/// ```
pub fn estimation_error(scheme: Scheme, inp: &SensingInputs) -> Result<SensingResult> {
    if !(inp.eta > 0.0 && inp.eta <= 1.0) {
        return Err(Error::Domain(format!("eta = {} must lie in (0, 1]", inp.eta)));
    }
    if !(inp.tau > 0.0 && inp.c_om > 0.0 && inp.a_pr_norm > 0.0 && inp.n_th >= 0.0) {
        return Err(Error::Domain("tau, c_om and a_pr_norm must be positive, n_th non-negative".into()));
    }
    let c = inp.c_om;
    let n = inp.n_th;
    let gp = 1.0 + c;
    let lorentz = gp * gp + 4.0 * inp.delta * inp.delta;
    let denom = 64.0 * c * c * inp.tau * inp.a_pr_norm * inp.a_pr_norm;
    let base = normal_form_base(inp);
    let error_sq = match scheme {
        Scheme::Omit => lorentz * (lorentz + 8.0 * n * c) / denom,
        Scheme::OmitImperfect => {
            let ideal = lorentz * (lorentz + 8.0 * n * c) / denom;
            ideal + (1.0 - inp.eta) / inp.eta * lorentz * lorentz / denom
        }
        Scheme::Position => base * (2.0 + 2.0 * n),
        Scheme::Bae => base * (1.0 + 8.0 * c * (1.0 + 2.0 * n)) / (8.0 * c),
    };
    let n_add_equiv = (error_sq / base - 1.0 - 2.0 * n) / 2.0;
    Ok(SensingResult { scheme, error_sq, n_add_equiv, params_echo: *inp })
}

/// Relative deviation between the OMIT estimation error and the small-shift
/// limit 2χ²/SNR²(τ) of the readout formulas (Γ units). Meaningful only for
/// χ/Γ ≪ 1 and τΓ ≫ 1; outside that regime the value is reported as is.
pub fn snr_error_consistency(chi_small: f64, inp: &SensingInputs) -> Result<f64> {
    let direct = estimation_error(Scheme::Omit, inp)?.error_sq;
    let snr2 = snr_squared(inp.tau, chi_small, inp.c_om, inp.a_pr_norm, inp.n_th)?;
    let limit = 2.0 * chi_small * chi_small / snr2;
    Ok((direct - limit).abs() / limit)
}

pub const SENSING_SWEEP_COLUMNS: [&str; 4] = ["eta", "n_add_omit", "n_add_sql", "n_add_bae_inf"];

/// Added noise versus detection efficiency at the OMIT optimum (δ = 0,
/// C_om = 1), against the position-detection SQL and the C → ∞ BAE limit.
pub fn sensing_sweep(eta_grid: &[f64], n_th: f64) -> Result<SweepResult> {
    let mut out = SweepResult::new(&SENSING_SWEEP_COLUMNS, None);
    for &eta in eta_grid {
        let inp = SensingInputs { tau: 1e4, c_om: 1.0, delta: 0.0, n_th, eta, a_pr_norm: 20.0 };
        let omit = estimation_error(Scheme::OmitImperfect, &inp)?.n_add_equiv;
        let sql = estimation_error(Scheme::Position, &inp)?.n_add_equiv;
        // BAE added noise is 1/(16C), which vanishes as C → ∞.
        let bae_inf = 0.0;
        out.push(vec![eta, omit, sql, bae_inf], vec![]);
    }
    Ok(out)
}
