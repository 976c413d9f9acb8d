//! Closed-form readout statistics in the large-κ limit, measurement-time root
//! finding, cooperativity optimisation and the QND budget.
//!
//! The core functions are dimensionless: χ and δ are in units of Γ_mech,
//! times are `τ·Γ_mech`, the probe amplitude is `a_pr,in/√Γ_mech`. Signal and
//! noise are reported per `√(κ/Γ_mech)`, a prefactor that cancels in the SNR.
//! Conversions to seconds happen only in [`ReadoutResult`] and
//! [`FeasibilityReport`], using [`period_seconds`].

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dynamics::{cav_photon_number, phonon_number, rwa_validity_check};
use crate::error::{Error, Result};
use crate::numerics::{bisect, golden_section_min, log_space, phi2};
use crate::params::{period_seconds, DriveConfig, SpinParams, SystemParams, MUCH_LESS};
use crate::sweep::SweepResult;

/// Relative bisection tolerance of [`measurement_time`].
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Starting point of the bracket search, in units of 1/Γ_mech.
pub const TAU_START: f64 = 1e-3;
/// Past this τ·Γ_mech the search gives up.
pub const TAU_MAX: f64 = 1e9;
/// Lower end of the cooperativity search.
pub const C_MIN: f64 = 1e-3;
/// Upper end used for the unconstrained study.
pub const C_MAX_UNCONSTRAINED: f64 = 1e6;
const GRID_POINTS: usize = 64;

/// Signal, noise and their helper terms at one integration time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrComponents {
    pub signal: f64,
    pub noise: f64,
    pub f_term: f64,
    pub g_term: f64,
    pub xi: f64,
    pub snr: f64,
}

/// Evaluates S(τ), N(τ), F(τ), G(τ) and ξ for a resonant probe at the
/// optimal homodyne angle.
///
/// With q = Γ' + 2iχ (Γ' = 1 + C) and y = −q*τ/2, the transient terms are
/// evaluated through φ₂(y) = (e^y − 1 − y)/y², which removes the cancellation
/// at short times:
///
/// ```text
/// 1 − F = τ|q|² Im φ₂(y) / (4χ)
/// G     = −4 n_th C/(1+C) · τ · Re φ₂(y)
/// ```
///
/// Only |χ| enters: the two spin branches are mirror images.
pub fn snr_components(tau: f64, chi: f64, c_om: f64, a_pr_norm: f64, n_th: f64) -> Result<SnrComponents> {
    if !(tau >= 0.0) || !chi.is_finite() || !(c_om >= 0.0) || !(a_pr_norm >= 0.0) || !(n_th >= 0.0) {
        return Err(Error::Domain(format!(
            "snr_components needs tau, c_om, a_pr_norm, n_th >= 0 (tau={tau}, chi={chi}, c_om={c_om}, a={a_pr_norm}, n_th={n_th})"
        )));
    }
    let chi = chi.abs();
    let gp = 1.0 + c_om;
    let xi = (2.0 * chi / gp).atan();
    let q_sq = gp * gp + 4.0 * chi * chi;
    let y = C64::new(-gp / 2.0, chi) * tau;
    let p2 = phi2(y);

    let one_minus_f = if tau == 0.0 {
        0.0
    } else if chi > 0.0 {
        tau * q_sq * p2.im / (4.0 * chi)
    } else {
        1.0 - (2.0 / gp - (2.0 / gp + tau) * (-gp * tau / 2.0).exp()) / tau
    };
    let g_term = -4.0 * n_th * c_om / gp * tau * p2.re;
    let sin_2xi = 4.0 * chi * gp / q_sq;
    let signal = 4.0 * a_pr_norm * c_om / gp * tau * sin_2xi * one_minus_f;
    if 1.0 - g_term <= 0.0 {
        return Err(Error::Domain(format!("1 − G(τ) = {} is not positive", 1.0 - g_term)));
    }
    let noise = (2.0 * tau * (1.0 - g_term)).sqrt();
    let snr = if noise > 0.0 { signal / noise } else { 0.0 };
    Ok(SnrComponents { signal, noise, f_term: 1.0 - one_minus_f, g_term, xi, snr })
}

pub fn snr_squared(tau: f64, chi: f64, c_om: f64, a_pr_norm: f64, n_th: f64) -> Result<f64> {
    snr_components(tau, chi, c_om, a_pr_norm, n_th).map(|c| c.snr * c.snr)
}

/// Homodyne angle that maximises ⟨I⟩ at ε = −χ minus ⟨I⟩ at ε = +χ, for a
/// resonant probe and arg a_pr,in = 0.
///
/// The angle is arg(−E) with
/// `E = q² − q*² − 2iχτ|q|² + q*² e^{−qτ/2} − q² e^{−q*τ/2}`.
/// Expanding the exponentials with φ₂ gives the exact, cancellation-free
/// form `E = |q|⁴τ²/4 · (φ₂(p) − φ₂(p)*)`, p = −qτ/2, used here. For a resonant
/// probe E is purely imaginary, so the optimum sits on the φ = ±π/2
/// quadrature and flips sign only when the signal itself changes sign.
pub fn optimal_homodyne_angle(tau: f64, chi: f64, c_om: f64) -> f64 {
    let gp = 1.0 + c_om;
    let q = C64::new(gp, 2.0 * chi);
    let p = -q * tau / 2.0;
    let f = phi2(p);
    let e = (f - f.conj()) * (q.norm_sqr().powi(2) * tau * tau / 4.0);
    (-e).arg()
}

/// The literal bracketed expression E(τ) for a resonant probe; useful for
/// checking the stable evaluation above.
pub fn angle_bracket(tau: f64, chi: f64, c_om: f64) -> C64 {
    let gp = 1.0 + c_om;
    let q = C64::new(gp, 2.0 * chi);
    let qc = q.conj();
    let i = C64::new(0.0, 1.0);
    q * q - qc * qc - i * 2.0 * chi * tau * q.norm_sqr() + qc * qc * (-q * tau / 2.0).exp()
        - q * q * (-qc * tau / 2.0).exp()
}

/// First τ·Γ_mech at which SNR² reaches 1, for a fixed cooperativity.
///
/// Starts at τΓ = 10⁻³ (halving until SNR² < 1), then marches forward and
/// bisects the first step that crosses 1 down to `rel_tol`. The march
/// doubles τ, except that while the ring-up transient e^{−Γ'τ/2} is alive
/// steps are capped at an eighth of the oscillation period 2π/χ: the
/// transient can push SNR² above 1 and back within a single doubling.
pub fn measurement_time(chi: f64, a_pr_norm: f64, n_th: f64, c_om: f64, rel_tol: f64) -> Result<f64> {
    if !(chi.abs() > 0.0) || !(a_pr_norm > 0.0) || !(c_om > 0.0) {
        return Err(Error::NoCrossing { tau_max: TAU_MAX });
    }
    let f = |t: f64| snr_squared(t, chi, c_om, a_pr_norm, n_th).map(|s| s - 1.0);
    let mut t = TAU_START;
    while f(t)? >= 0.0 {
        t /= 2.0;
        if t < 1e-300 {
            return Err(Error::Domain("SNR² does not vanish as τ → 0".into()));
        }
    }
    let gp = 1.0 + c_om;
    let fine_step = std::f64::consts::PI / (4.0 * chi.abs());
    let transient_end = 80.0 / gp;
    let (lo, hi) = loop {
        let step = if t < transient_end { t.min(fine_step) } else { t };
        let next = t + step;
        if next > TAU_MAX {
            return Err(Error::NoCrossing { tau_max: TAU_MAX });
        }
        if f(next)? >= 0.0 {
            break (t, next);
        }
        t = next;
    };
    // Inside the bracket snr_squared cannot fail: it succeeded at both ends and
    // 1 − G stays positive in between for physical parameters.
    Ok(bisect(|x| f(x).unwrap_or(f64::NAN), lo, hi, rel_tol))
}

/// Best cooperativity and the corresponding τ·Γ_mech.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub c_om: f64,
    pub tau_gamma: f64,
}

/// Minimises [`measurement_time`] over C_om ∈ [10⁻³, c_max]: a 64-point log
/// grid locates the basin, golden-section search in ln C refines it to a
/// relative 10⁻⁴.
pub fn optimize_cooperativity(chi: f64, a_pr_norm: f64, n_th: f64, c_max: f64, rel_tol: f64) -> Result<Optimum> {
    if !(c_max > 0.0) {
        return Err(Error::invalid("c_max", format!("{c_max} must be positive")));
    }
    let c_lo = C_MIN.min(c_max);
    let grid = log_space(c_lo, c_max, if c_max > c_lo { GRID_POINTS } else { 1 });
    let mut best: Option<(usize, f64)> = None;
    let mut first_err = None;
    for (i, &c) in grid.iter().enumerate() {
        match measurement_time(chi, a_pr_norm, n_th, c, rel_tol) {
            Ok(t) if best.map_or(true, |(_, b)| t < b) => best = Some((i, t)),
            Ok(_) => {}
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let Some((i, t_best)) = best else {
        return Err(first_err.unwrap_or(Error::NoCrossing { tau_max: TAU_MAX }));
    };
    if grid.len() == 1 {
        return Ok(Optimum { c_om: grid[0], tau_gamma: t_best });
    }
    let lo = grid[i.saturating_sub(1)].ln();
    let hi = grid[(i + 1).min(grid.len() - 1)].ln();
    let (x, t) = golden_section_min(
        |lc| measurement_time(chi, a_pr_norm, n_th, lc.exp(), rel_tol).unwrap_or(f64::INFINITY),
        lo,
        hi,
        1e-4,
    );
    if t <= t_best {
        Ok(Optimum { c_om: x.exp().clamp(c_lo, c_max), tau_gamma: t })
    } else {
        Ok(Optimum { c_om: grid[i], tau_gamma: t_best })
    }
}

/// Limiting regimes of the optimised measurement time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// χ ≪ Γ at n_th = 0: τΓ = 1/(8a²(χ/Γ)²).
    Weak,
    /// χ ≫ Γ: τΓ = 1/(8a²), the rate at which probe photons arrive.
    Strong,
    /// χ ≪ Γ at finite temperature: the weak value times (1 + 2n_th).
    WeakThermal,
}

/// Closed-form asymptote of τ·Γ_mech.
pub fn asymptotic_tmeas(regime: Regime, chi: f64, a_pr_norm: f64, n_th: f64) -> f64 {
    let a2 = a_pr_norm * a_pr_norm;
    match regime {
        Regime::Weak => 1.0 / (8.0 * a2 * chi * chi),
        Regime::Strong => 1.0 / (8.0 * a2),
        Regime::WeakThermal => (1.0 + 2.0 * n_th) / (8.0 * a2 * chi * chi),
    }
}

/// Largest probe amplitudes that keep the phonon number below the critical
/// value, in (rad/s)^½.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalProbe {
    /// Bound at the given cooperativity, with unit transmission efficiency.
    pub at_c_om: f64,
    /// Bound minimised over the cooperativity, a conservative lower estimate.
    pub minimized: f64,
}

/// Critical probe amplitude:
///
/// ```text
/// |a|² ≥ (Δ/g)² (Γ²(1+C)² + 4χ²)/(4ΓC) ≥ (Δ/g)² (Γ/2)(√(1 + 4χ²/Γ²) + 1)
/// ```
///
/// All rates are angular. The returned values are amplitudes; square them for
/// the photon flux.
pub fn critical_probe_amplitude(chi: f64, gamma_mech: f64, delta_sm: f64, g_sm: f64, c_om: f64) -> CriticalProbe {
    let ratio2 = (delta_sm / g_sm).powi(2);
    let gt = gamma_mech * (1.0 + c_om);
    let at_c = ratio2 * (gt * gt + 4.0 * chi * chi) / (4.0 * gamma_mech * c_om);
    let x = chi / gamma_mech;
    let minimized = ratio2 * gamma_mech / 2.0 * ((1.0 + 4.0 * x * x).sqrt() + 1.0);
    CriticalProbe { at_c_om: at_c.sqrt(), minimized: minimized.sqrt() }
}

/// Phonon number at which the dispersive expansion breaks down,
/// `(Δ_sm/g_sm)²/N`.
pub fn critical_phonon_number(delta_sm: f64, g_sm: f64, n_spins: u32) -> f64 {
    (delta_sm / g_sm).powi(2) / n_spins as f64
}

/// Purcell decay time `2π·Δ_sm/(Γ_mech χ N^β)` with χ = g²/Δ.
///
/// The factor 2π is the period convention shared with `T1 = 2π/γ_rel` and
/// the reported measurement times; the bare inverse rate is 2π smaller.
pub fn purcell_time(delta_sm: f64, g_sm: f64, gamma_mech: f64, n_spins: u32, beta: u32) -> f64 {
    let chi = g_sm * g_sm / delta_sm;
    let rate = gamma_mech * chi * (n_spins as f64).powi(beta as i32) / delta_sm.abs();
    period_seconds(1.0, rate)
}

/// Intrinsic spin lifetime `T1 = 2π/γ_rel`; infinite when γ_rel = 0.
pub fn spin_t1(gamma_rel: f64) -> f64 {
    if gamma_rel > 0.0 {
        period_seconds(1.0, gamma_rel)
    } else {
        f64::INFINITY
    }
}

/// How the cooperativity is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CooperativityMode {
    Fixed(f64),
    /// Optimise over [10⁻³, c_max].
    Auto {
        c_max: f64,
    },
}

/// Measurement time and the phonon budget at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutResult {
    /// Measurement time in seconds (period convention).
    pub tau_meas: f64,
    /// Measurement time as τ·Γ_mech.
    pub tau_gamma: f64,
    pub c_om_opt: f64,
    pub snr_at_tau: f64,
    pub n_mech_at_tau: f64,
    pub n_cav_at_tau: f64,
    pub n_crit: f64,
    pub warnings: Vec<String>,
}

/// Solves for the measurement time at the spin's dispersive shift and
/// evaluates the phonon and photon numbers there.
pub fn readout_result(
    sys: &SystemParams,
    spin: &SpinParams,
    a_pr_norm: f64,
    mode: CooperativityMode,
    rel_tol: f64,
) -> Result<ReadoutResult> {
    sys.check()?;
    spin.check()?;
    let g = sys.gamma_mech;
    let chi = spin.chi() / g;
    let opt = match mode {
        CooperativityMode::Fixed(c) => {
            Optimum { c_om: c, tau_gamma: measurement_time(chi, a_pr_norm, sys.n_th, c, rel_tol)? }
        }
        CooperativityMode::Auto { c_max } => optimize_cooperativity(chi, a_pr_norm, sys.n_th, c_max, rel_tol)?,
    };
    let drive = DriveConfig::resonant(opt.c_om, a_pr_norm * g.sqrt())?;
    // Dynamics takes physical time, i.e. τΓ/Γ.
    let t = opt.tau_gamma / g;
    let n_mech = phonon_number(t, sys, &drive, spin.chi());
    let n_cav = cav_photon_number(t, sys, &drive, spin.chi());
    let n_crit = critical_phonon_number(spin.delta_sm, spin.g_sm, spin.n_spins);
    let snr = snr_components(opt.tau_gamma, chi, opt.c_om, a_pr_norm, sys.n_th)?.snr;

    let mut warnings = Vec::new();
    if n_mech > MUCH_LESS * n_crit {
        warnings.push(format!("n_mech(tau) = {n_mech:.4e} is not ≪ n_crit = {n_crit:.4e}"));
    }
    if let CooperativityMode::Auto { c_max } = mode {
        if opt.c_om >= c_max * (1.0 - 1e-3) {
            warnings.push(format!("optimum pinned at c_max = {c_max:e}"));
        }
    }
    let (rwa_g, rwa_g0) = rwa_validity_check(sys, &drive, n_mech);
    if !rwa_g {
        warnings.push("G·sqrt(n_mech) ≪ 2 omega_m violated".into());
    }
    if !rwa_g0 {
        warnings.push("g0·sqrt(n_mech) ≪ omega_m violated".into());
    }
    Ok(ReadoutResult {
        tau_meas: period_seconds(opt.tau_gamma, g),
        tau_gamma: opt.tau_gamma,
        c_om_opt: opt.c_om,
        snr_at_tau: snr,
        n_mech_at_tau: n_mech,
        n_cav_at_tau: n_cav,
        n_crit,
        warnings,
    })
}

/// QND budget: measurement time against the Purcell and intrinsic lifetimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub tau_meas: f64,
    pub tau_purcell: f64,
    pub t1: f64,
    /// min(T1, τ_Purcell)/τ_meas.
    pub qnd_ratio: f64,
    /// Δ²/Γ² ≫ N^(β−1)/8.
    pub detuning_criterion_ok: bool,
    /// 4Ng²/(Γγ_rel) ≫ 1/2.
    pub cooperativity_criterion_ok: bool,
}

/// Evaluates both feasibility criteria with a ≫ margin of 10 and the QND ratio
/// at the given measurement time (seconds, period convention).
pub fn feasibility_report(spin: &SpinParams, sys: &SystemParams, tau_meas: f64) -> FeasibilityReport {
    let g = sys.gamma_mech;
    let n = spin.n_spins as f64;
    let margin = 1.0 / MUCH_LESS;
    let detuning_ok = (spin.delta_sm / g).powi(2) >= margin * n.powi(spin.beta as i32 - 1) / 8.0;
    let coop_ok = if spin.gamma_rel > 0.0 {
        4.0 * n * spin.g_sm * spin.g_sm / (g * spin.gamma_rel) >= margin * 0.5
    } else {
        true
    };
    let tau_purcell = purcell_time(spin.delta_sm, spin.g_sm, g, spin.n_spins, spin.beta);
    let t1 = spin_t1(spin.gamma_rel);
    FeasibilityReport {
        tau_meas,
        tau_purcell,
        t1,
        qnd_ratio: tau_purcell.min(t1) / tau_meas,
        detuning_criterion_ok: detuning_ok,
        cooperativity_criterion_ok: coop_ok,
    }
}

/// Fixed context of a χ sweep: everything that is not swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSweepSetup {
    pub a_pr_norm: f64,
    pub n_th: f64,
    pub c_max: f64,
    /// κ/Γ_mech, needed for the intracavity photon number.
    pub kappa_over_gamma: f64,
    /// Δ_sm/Γ_mech, held fixed while χ varies; sets n_crit = Δ/(χN).
    pub delta_sm_over_gamma: f64,
    pub n_spins: u32,
    /// Γ_mech in rad/s, only used for the seconds column.
    pub gamma_mech: f64,
    pub rel_tol: f64,
}

pub const CHI_SWEEP_COLUMNS: [&str; 7] =
    ["chi_over_gamma", "c_om_opt", "tau_gamma", "tau_seconds", "n_mech_tau", "n_cav_tau", "n_crit"];

/// Optimised measurement time across a χ grid. Points run in parallel on the
/// current rayon pool; rows keep grid order. Failures are recorded per row.
pub fn sweep_chi(chi_grid: &[f64], setup: &ChiSweepSetup) -> Result<SweepResult> {
    if chi_grid.windows(2).any(|w| !(w[1] > w[0])) || chi_grid.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::invalid("chi_grid", "must be positive and strictly increasing"));
    }
    let rows: Vec<Result<(Vec<f64>, Vec<String>)>> = chi_grid.par_iter().map(|&chi| chi_row(chi, setup)).collect();
    let mut out = SweepResult::new(&CHI_SWEEP_COLUMNS, Some("warnings"));
    for (chi, row) in chi_grid.iter().zip(rows) {
        match row {
            Ok((values, notes)) => out.push(values, notes),
            Err(e) => out.push_failure(&[*chi], e.to_string()),
        }
    }
    Ok(out)
}

fn chi_row(chi: f64, s: &ChiSweepSetup) -> Result<(Vec<f64>, Vec<String>)> {
    let opt = optimize_cooperativity(chi, s.a_pr_norm, s.n_th, s.c_max, s.rel_tol)?;
    // Work in units of Γ_mech = 1 for the occupation formulas.
    let sys = SystemParams::new(s.kappa_over_gamma, 1.0, f64::MAX, 0.0, s.n_th)?;
    let drive = DriveConfig::resonant(opt.c_om, s.a_pr_norm)?;
    let n_mech = phonon_number(opt.tau_gamma, &sys, &drive, chi);
    let n_cav = cav_photon_number(opt.tau_gamma, &sys, &drive, chi);
    let n_crit = s.delta_sm_over_gamma / chi / s.n_spins as f64;
    let mut notes = Vec::new();
    if opt.c_om >= s.c_max * (1.0 - 1e-3) {
        notes.push("optimum pinned at c_max".to_string());
    }
    if n_mech > MUCH_LESS * n_crit {
        notes.push("n_mech not ≪ n_crit".to_string());
    }
    Ok((vec![chi, opt.c_om, opt.tau_gamma, period_seconds(opt.tau_gamma, s.gamma_mech), n_mech, n_cav, n_crit], notes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_dispersive_shift_no_signal() {
        let c = snr_components(3.0, 0.0, 2.0, 20.0, 0.0).unwrap();
        assert_eq!(c.signal, 0.0);
        assert_eq!(c.snr, 0.0);
        assert!(measurement_time(0.0, 20.0, 0.0, 1.0, DEFAULT_REL_TOL).is_err());
    }

    #[test]
    fn no_pump_no_signal() {
        let c = snr_components(3.0, 0.5, 0.0, 20.0, 0.0).unwrap();
        assert_eq!(c.snr, 0.0);
    }

    #[test]
    fn thermal_term_limits() {
        assert_eq!(snr_components(2.0, 0.3, 1.0, 20.0, 0.0).unwrap().g_term, 0.0);
        let g_inf = snr_components(1e7, 1e-9, 1.0, 20.0, 1.5).unwrap().g_term;
        assert!((g_inf + 3.0).abs() < 1e-5, "{g_inf}");
        let g_big_chi = snr_components(2.0, 1e8, 1.0, 20.0, 1.5).unwrap().g_term;
        assert!(g_big_chi.abs() < 1e-7);
    }

    #[test]
    fn stable_terms_match_textbook_form() {
        for &(tau, chi, c) in &[(0.7, 0.4, 2.0), (5.0, 3.0, 20.0), (0.05, 10.0, 1.0)] {
            let gp = 1.0 + c;
            let xi = (2.0f64 * chi / gp).atan();
            let f = ((2.0 * xi).sin() - (2.0 * xi + chi * tau).sin() * (-gp * tau / 2.0).exp()) / (chi * tau);
            let n = 0.8;
            let g = 8.0 * n * c / gp
                * (2.0 * (2.0 * xi).cos() - gp * tau - 2.0 * (2.0 * xi + chi * tau).cos() * (-gp * tau / 2.0).exp())
                / (tau * (gp * gp + 4.0 * chi * chi));
            let comp = snr_components(tau, chi, c, 20.0, n).unwrap();
            assert!((comp.f_term - f).abs() < 1e-12, "F {tau} {chi}");
            assert!((comp.g_term - g).abs() < 1e-12, "G {tau} {chi}");
        }
    }

    #[test]
    fn stable_angle_matches_bracket() {
        for &(tau, chi, c) in &[(0.7, 0.4, 2.0), (5.0, 3.0, 20.0), (0.3, 10.0, 1.0)] {
            let e = angle_bracket(tau, chi, c);
            let expect = (-e).arg();
            let got = optimal_homodyne_angle(tau, chi, c);
            assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
        }
    }

    #[test]
    fn asymptote_values() {
        assert!((asymptotic_tmeas(Regime::Weak, 1e-3, 20.0, 0.0) - 312.5).abs() < 1e-9);
        assert!((asymptotic_tmeas(Regime::Strong, 1e3, 20.0, 0.0) - 3.125e-4).abs() < 1e-15);
        let w = asymptotic_tmeas(Regime::Weak, 1e-3, 20.0, 0.0);
        assert!((asymptotic_tmeas(Regime::WeakThermal, 1e-3, 20.0, 1.0) - 3.0 * w).abs() < 1e-9);
    }

    #[test]
    fn critical_numbers() {
        assert_eq!(critical_phonon_number(75.0, 1.0, 1), 5625.0);
        assert_eq!(critical_phonon_number(75.0, 1.0, 4), 1406.25);
        assert_eq!(critical_phonon_number(75.0, 2.0, 1), 5625.0 / 4.0);
        let small = critical_probe_amplitude(1e-9, 1.0, 75.0, 1.0, 1.0);
        assert!((small.at_c_om.powi(2) - 5625.0).abs() < 1e-6);
    }

    #[test]
    fn purcell_scaling() {
        let base = purcell_time(150.0, 2.0, 0.2, 1, 1);
        assert!((purcell_time(300.0, 2.0, 0.2, 1, 1) / base - 4.0).abs() < 1e-12);
    }

    #[test]
    fn infinite_relaxation_fails_cooperativity_criterion() {
        let sys = SystemParams::new(1e4, 1.0, 1e6, 0.0, 0.0).unwrap();
        let spin = SpinParams::new(1.0, 75.0, 1, 1, 1e300).unwrap();
        let r = feasibility_report(&spin, &sys, 1.0);
        assert!(!r.cooperativity_criterion_ok);
        assert!(r.detuning_criterion_ok);
    }

    #[test]
    fn detuning_criterion_threshold_single_spin() {
        let sys = SystemParams::new(1e4, 1.0, 1e6, 0.0, 0.0).unwrap();
        // Δ/Γ ≫ √(1/8) with margin 10: Δ² ≥ 10/8.
        let edge = (10.0f64 / 8.0).sqrt();
        let ok = SpinParams::new(0.01, edge * 1.0001, 1, 1, 0.0).unwrap();
        let bad = SpinParams::new(0.01, edge * 0.9999, 1, 1, 0.0).unwrap();
        assert!(feasibility_report(&ok, &sys, 1.0).detuning_criterion_ok);
        assert!(!feasibility_report(&bad, &sys, 1.0).detuning_criterion_ok);
    }
}
