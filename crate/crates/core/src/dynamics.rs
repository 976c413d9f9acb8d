//! Exact solution of the linearised optical/mechanical Langevin system.
//!
//! The fluctuation vector is `X = (d, c)`: optical mode in the frame of the
//! cavity resonance, mechanical mode in the frame rotating at ω_m. Its drift
//! matrix is
//!
//! ```text
//! M = [[ -κ/2,  iG              ],
//!      [  iG,  -Γ/2 - iε        ]]      G = √(C_om κ Γ / 4)
//! ```
//!
//! where ε is the spin-dependent mechanical frequency shift. The probe enters
//! the optical mode as `-√κ a e^{-iδt}` for t ≥ 0. Every function here keeps
//! κ finite; the large-κ closed forms live in [`crate::readout`] and the
//! occupation formulas below, and the exact routines serve as their oracle.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numerics::{dopri45, integrate, phi1, solve_lyapunov, Mat2, I};
use crate::params::{derived_quantities, DriveConfig, SystemParams, MUCH_LESS};

/// Propagator of the fluctuations over a time τ, with rows and columns
/// ordered (d, c).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenMatrix {
    pub entries: Mat2,
    pub tau: f64,
}

impl GreenMatrix {
    pub fn dd(&self) -> C64 {
        self.entries.0[0][0]
    }
    pub fn dc(&self) -> C64 {
        self.entries.0[0][1]
    }
    pub fn cd(&self) -> C64 {
        self.entries.0[1][0]
    }
    pub fn cc(&self) -> C64 {
        self.entries.0[1][1]
    }
}

/// Semiclassical amplitudes of the two modes at time t after the probe turns on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMeans {
    pub d_mean: C64,
    pub c_mean: C64,
    pub t: f64,
    pub epsilon: f64,
}

/// Mean and variance of the integrated homodyne current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneStats {
    pub mean: f64,
    pub variance: f64,
    pub tau: f64,
    pub phi: f64,
}

/// Drift matrix in the rotating frame (no probe detuning).
pub fn drift_matrix(sys: &SystemParams, c_om: f64, epsilon: f64) -> Mat2 {
    let g = (c_om * sys.kappa * sys.gamma_mech / 4.0).sqrt();
    Mat2::new(C64::new(-sys.kappa / 2.0, 0.0), I * g, I * g, C64::new(-sys.gamma_mech / 2.0, -epsilon))
}

/// e^{Mτ} for a 2×2 matrix with distinct-or-not eigenvalues, organised so
/// nothing overflows or cancels badly when κ ≫ Γ.
///
/// With `slow` the eigenvalue of larger real part and `fast` the other one,
/// `e^{Mτ} = e^{slow·τ} [1 + (M − slow)·τ·φ₁((fast − slow)τ)]`, where
/// `φ₁(z) = (e^z − 1)/z`. The exceptional point (equal eigenvalues, i.e. a
/// vanishing square root in the cosh/sinh form) needs no special case since
/// φ₁ is regular at zero.
#[derive(Debug, Clone, Copy)]
struct Propagator {
    slow: C64,
    gap: C64,
    shifted: Mat2,
}

impl Propagator {
    fn new(m: &Mat2) -> Self {
        let a = &m.0;
        let mean = m.trace() / 2.0;
        let half_diff = (a[0][0] - a[1][1]) / 2.0;
        let coupling = a[0][1] * a[1][0];
        let root = (half_diff * half_diff + coupling).sqrt();
        let (p, q) = (mean + root, mean - root);
        // The eigenvalue of larger modulus is accurate; recover the other
        // from the determinant.
        let (big, small) = if p.norm() >= q.norm() { (p, q) } else { (q, p) };
        let small = if big.norm() > 0.0 { m.det() / big } else { small };
        let (slow, fast) = if big.re >= small.re { (big, small) } else { (small, big) };

        let mut dd = a[0][0] - slow;
        let mut cc = a[1][1] - slow;
        // (M_dd − λ)(M_cc − λ) = M_dc·M_cd at an eigenvalue; use it to
        // rebuild whichever diagonal entry lost its digits to cancellation.
        if dd.norm() < cc.norm() {
            if cc.norm() > 0.0 {
                dd = coupling / cc;
            }
        } else if dd.norm() > 0.0 {
            cc = coupling / dd;
        }
        Propagator { slow, gap: fast - slow, shifted: Mat2::new(dd, a[0][1], a[1][0], cc) }
    }

    fn at(&self, tau: f64) -> Mat2 {
        let scale = (self.slow * tau).exp();
        let weight = phi1(self.gap * tau) * tau;
        (Mat2::identity() + self.shifted.scale(weight)).scale(scale)
    }
}

/// e^{Mτ} in the rotating frame, without the e^{-iω_m τ} carrier.
pub(crate) fn rotating_green(tau: f64, sys: &SystemParams, c_om: f64, epsilon: f64) -> Mat2 {
    Propagator::new(&drift_matrix(sys, c_om, epsilon)).at(tau)
}

/// Green's function of the linearised Langevin equations, including the
/// common carrier phase e^{-iω_m τ}.
pub fn green_function(tau: f64, sys: &SystemParams, drive: &DriveConfig, epsilon: f64) -> Result<GreenMatrix> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("green_function needs tau >= 0, got {tau}")));
    }
    let carrier = (-I * sys.omega_m * tau).exp();
    let entries = rotating_green(tau, sys, drive.c_om, epsilon).scale(carrier);
    Ok(GreenMatrix { entries, tau })
}

/// Drive vector and particular-solution amplitude A = −(M + iδ)⁻¹u.
struct Forced {
    m: Mat2,
    shifted_inv: Mat2,
    amp: [C64; 2],
}

impl Forced {
    fn new(sys: &SystemParams, drive: &DriveConfig, epsilon: f64) -> Self {
        let m = drift_matrix(sys, drive.c_om, epsilon);
        let shifted = m + Mat2::identity().scale(I * drive.delta);
        // A stable drift keeps M + iδ invertible for every real δ.
        let shifted_inv = shifted.inverse().expect("stable drift matrix is invertible");
        let u = [C64::new(-sys.kappa.sqrt() * drive.a_pr_in, 0.0), C64::new(0.0, 0.0)];
        let v = shifted_inv.apply(u);
        Forced { m, shifted_inv, amp: [-v[0], -v[1]] }
    }
}

/// Mean fields for a probe switched on at t = 0:
/// `X(t) = A e^{-iδt} − e^{Mt} A`.
pub fn mean_fields(t: f64, sys: &SystemParams, drive: &DriveConfig, epsilon: f64) -> FieldMeans {
    let zero = C64::new(0.0, 0.0);
    if t <= 0.0 || drive.a_pr_in == 0.0 {
        return FieldMeans { d_mean: zero, c_mean: zero, t, epsilon };
    }
    let f = Forced::new(sys, drive, epsilon);
    let phase = (-I * drive.delta * t).exp();
    let transient = Propagator::new(&f.m).at(t).apply(f.amp);
    FieldMeans { d_mean: f.amp[0] * phase - transient[0], c_mean: f.amp[1] * phase - transient[1], t, epsilon }
}

/// Mean fields by direct adaptive integration of the Langevin means. This is
/// the oracle for [`mean_fields`] and the occupation formulas; it never
/// touches the closed-form propagator.
pub fn mean_fields_ode(t: f64, sys: &SystemParams, drive: &DriveConfig, epsilon: f64) -> Result<FieldMeans> {
    let zero = C64::new(0.0, 0.0);
    if t <= 0.0 {
        return Ok(FieldMeans { d_mean: zero, c_mean: zero, t, epsilon });
    }
    let m = drift_matrix(sys, drive.c_om, epsilon);
    let drive_amp = -sys.kappa.sqrt() * drive.a_pr_in;
    let delta = drive.delta;
    let rhs = |s: f64, x: &[C64; 2]| {
        let mx = m.apply(*x);
        [mx[0] + (-I * delta * s).exp() * drive_amp, mx[1]]
    };
    let scale = drive.a_pr_in / sys.gamma_mech.sqrt();
    let x = dopri45(rhs, 0.0, [zero, zero], t, 1e-10, 1e-14 * scale.max(1e-300))?;
    Ok(FieldMeans { d_mean: x[0], c_mean: x[1], t, epsilon })
}

/// Effective mechanical detuning from the probe, ε − δ. In the large-κ limit
/// a detuned probe only shifts the mechanical response by −δ.
fn probe_detuning(drive: &DriveConfig, epsilon: f64) -> f64 {
    epsilon - drive.delta
}

/// Mechanical phonon number after a time t (large-κ closed form):
/// `n(t) = 4ΓC a²/(Γ'² + 4ε²)·(1 + e^{-Γ't} − 2cos(εt)e^{-Γ't/2})`,
/// with Γ' = Γ(1 + C_om).
pub fn phonon_number(t: f64, sys: &SystemParams, drive: &DriveConfig, epsilon: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let gt = derived_quantities(sys, drive).gamma_total;
    let e = probe_detuning(drive, epsilon);
    let decay = (-gt * t / 2.0).exp();
    steady_state_phonon_number(sys, drive, epsilon) * (1.0 + decay * decay - 2.0 * (e * t).cos() * decay)
}

/// Intracavity photon number after a time t (large-κ closed form):
/// `n(t) = 4a²/κ · |Γ + 2iε + ΓC e^{-(Γ'/2 + iε)t}|² / (Γ'² + 4ε²)`.
pub fn cav_photon_number(t: f64, sys: &SystemParams, drive: &DriveConfig, epsilon: f64) -> f64 {
    let a2 = drive.a_pr_in * drive.a_pr_in;
    if a2 == 0.0 {
        return 0.0;
    }
    let g = sys.gamma_mech;
    let gt = derived_quantities(sys, drive).gamma_total;
    let e = probe_detuning(drive, epsilon);
    let t = t.max(0.0);
    let ring = (-C64::new(gt / 2.0, e) * t).exp() * (g * drive.c_om);
    let amp = C64::new(g, 2.0 * e) + ring;
    4.0 * a2 / sys.kappa * amp.norm_sqr() / (gt * gt + 4.0 * e * e)
}

/// Steady-state phonon number `4ΓC a²/(Γ²(1+C)² + 4ε²)`.
pub fn steady_state_phonon_number(sys: &SystemParams, drive: &DriveConfig, epsilon: f64) -> f64 {
    let g = sys.gamma_mech;
    let gt = derived_quantities(sys, drive).gamma_total;
    let e = probe_detuning(drive, epsilon);
    4.0 * g * drive.c_om * drive.a_pr_in * drive.a_pr_in / (gt * gt + 4.0 * e * e)
}

/// Integrated output amplitude `Z(τ) = ∫₀^τ e^{iδt}⟨d_out(t)⟩ dt`, exact at
/// finite κ, with `d_out = d_in + √κ d`.
pub fn integrated_output(tau: f64, sys: &SystemParams, drive: &DriveConfig, epsilon: f64) -> C64 {
    if tau <= 0.0 || drive.a_pr_in == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let f = Forced::new(sys, drive, epsilon);
    let sk = sys.kappa.sqrt();
    let shifted = f.m + Mat2::identity().scale(I * drive.delta);
    let prop = Propagator::new(&shifted).at(tau);
    // ∫₀^τ e^{(M+iδ)t} dt · A = (M+iδ)⁻¹ (e^{(M+iδ)τ} − 1) A
    let b = f.shifted_inv.apply(f.amp);
    let transient = (prop - Mat2::identity()).apply(b);
    (sk * f.amp[0] + drive.a_pr_in) * tau - transient[0] * sk
}

/// Mean of the integrated homodyne current
/// `I(τ) = √κ ∫₀^τ (e^{-iφ} e^{iδt} d_out + h.c.) dt`.
pub fn homodyne_mean(tau: f64, phi: f64, sys: &SystemParams, drive: &DriveConfig, epsilon: f64) -> f64 {
    let z = integrated_output(tau, sys, drive, epsilon);
    2.0 * sys.kappa.sqrt() * ((-I * phi).exp() * z).re
}

/// Homodyne angle that maximises the separation of the two spin branches,
/// `arg(Z(+χ) − Z(−χ))` for the integrated output Z.
pub fn best_homodyne_angle(tau: f64, sys: &SystemParams, drive: &DriveConfig, chi: f64) -> f64 {
    let diff = integrated_output(tau, sys, drive, chi) - integrated_output(tau, sys, drive, -chi);
    diff.arg()
}

/// Variance of the integrated homodyne current by quadrature over the
/// stationary output correlation functions.
///
/// Two-time correlations follow from the quantum-regression structure: for
/// u > 0, `⟨X(t+u) X†(t)⟩` propagates the equal-time covariance with e^{Mu}.
/// Equal-time covariances solve `MΣ + ΣM† + K N K = 0` with
/// `K = diag(√κ, √Γ)`; the normally ordered one, Σ_n, has
/// `N = diag(0, n_th)` and the anti-normally ordered one is `1 + Σ_n`. The
/// output correlation then reduces to
///
/// ```text
/// Var = κ [ τ + 4 ∫₀^τ (τ − u) Re(e^{iδu} h(u)) du ],   h(u) = κ [e^{Mu} Σ_n]_dd
/// ```
///
/// where the first term is the vacuum shot noise. κ is never sent to infinity.
pub fn homodyne_variance_oracle(
    tau: f64,
    _phi: f64,
    sys: &SystemParams,
    drive: &DriveConfig,
    epsilon: f64,
) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("variance needs tau >= 0, got {tau}")));
    }
    let kappa = sys.kappa;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let m = drift_matrix(sys, drive.c_om, epsilon);
    let q = Mat2::diag(C64::new(0.0, 0.0), C64::new(sys.gamma_mech * sys.n_th, 0.0));
    let sigma_n = solve_lyapunov(&m, &q)?;
    let prop = Propagator::new(&m);
    let delta = drive.delta;
    let integrand = |u: f64| {
        let h = (prop.at(u) * sigma_n).0[0][0] * kappa;
        (tau - u) * ((I * delta * u).exp() * h).re
    };
    // The optical transient lives on 1/κ; give the quadrature a breakpoint.
    let fast = (60.0 / kappa).min(tau);
    let mut breaks = vec![0.0, fast];
    let slow_rate = derived_quantities(sys, drive).gamma_total.max(epsilon.abs()).max(delta.abs());
    let mut x = fast;
    while x < tau {
        x = (x + 20.0 / slow_rate).min(tau);
        breaks.push(x);
    }
    let coloured = integrate(integrand, &breaks, 1e-11, 1e-15 * tau)?;
    let var = kappa * (tau + 4.0 * coloured);
    if var < 0.0 {
        return Err(Error::Domain(format!("negative variance {var:e}")));
    }
    Ok(var)
}

/// Mean and variance together; the mean is exact and the variance comes
/// from [`homodyne_variance_oracle`].
pub fn homodyne_stats(
    tau: f64,
    phi: f64,
    sys: &SystemParams,
    drive: &DriveConfig,
    epsilon: f64,
) -> Result<HomodyneStats> {
    Ok(HomodyneStats {
        mean: homodyne_mean(tau, phi, sys, drive, epsilon),
        variance: homodyne_variance_oracle(tau, phi, sys, drive, epsilon)?,
        tau,
        phi,
    })
}

/// SNR² of the two spin branches from the exact mean and variance,
/// `|⟨I⟩₋χ − ⟨I⟩₊χ|² / (Var₋χ + Var₊χ)`, at the separating homodyne angle.
/// Brute-force counterpart of the closed form in [`crate::readout`].
pub fn oracle_snr_squared(tau: f64, sys: &SystemParams, drive: &DriveConfig, chi: f64) -> Result<f64> {
    let phi = best_homodyne_angle(tau, sys, drive, chi);
    let drive = DriveConfig { phi, ..*drive };
    let signal = homodyne_mean(tau, phi, sys, &drive, -chi) - homodyne_mean(tau, phi, sys, &drive, chi);
    let noise =
        homodyne_variance_oracle(tau, phi, sys, &drive, -chi)? + homodyne_variance_oracle(tau, phi, sys, &drive, chi)?;
    Ok(signal * signal / noise)
}

/// Whether the counter-rotating terms stay negligible:
/// `(G√n ≪ 2ω_m, g₀√n ≪ ω_m)` with "≪" meaning at most a tenth.
pub fn rwa_validity_check(sys: &SystemParams, drive: &DriveConfig, n_mech: f64) -> (bool, bool) {
    let root_n = n_mech.max(0.0).sqrt();
    let g = derived_quantities(sys, drive).coupling;
    (g * root_n <= MUCH_LESS * 2.0 * sys.omega_m, sys.g0 * root_n <= MUCH_LESS * sys.omega_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(kappa: f64, n_th: f64) -> SystemParams {
        SystemParams::new(kappa, 1.0, 100.0 * kappa, 1e-4, n_th).unwrap()
    }

    #[test]
    fn green_identity_at_zero() {
        let s = sys(1e4, 0.0);
        let d = DriveConfig::resonant(3.0, 1.0).unwrap();
        let g = green_function(0.0, &s, &d, 0.7).unwrap();
        assert!((g.entries - Mat2::identity()).max_abs() < 1e-15);
    }

    #[test]
    fn decoupled_modes_decay_independently() {
        let s = sys(50.0, 0.0);
        let d = DriveConfig::resonant(0.0, 1.0).unwrap();
        let g = green_function(0.3, &s, &d, 2.0).unwrap();
        let carrier = (-I * s.omega_m * 0.3).exp();
        assert_eq!(g.dc().norm(), 0.0);
        assert!((g.dd() - carrier * (-25.0 * 0.3f64).exp()).norm() < 1e-15);
        assert!((g.cc() - carrier * (C64::new(-0.5, -2.0) * 0.3).exp()).norm() < 1e-15);
    }

    #[test]
    fn negative_time_is_domain_error() {
        let s = sys(1e4, 0.0);
        let d = DriveConfig::resonant(1.0, 1.0).unwrap();
        assert!(green_function(-1.0, &s, &d, 0.0).is_err());
    }

    #[test]
    fn exceptional_point_is_regular() {
        // Γ − κ + 2iε = 0 and C = 0 make the square root vanish.
        let s = SystemParams::new(1.0, 1.0, 100.0, 0.0, 0.0).unwrap();
        let d = DriveConfig::resonant(0.0, 1.0).unwrap();
        let g = rotating_green(2.0, &s, d.c_om, 0.0);
        assert!((g.0[0][0] - (-1.0f64).exp()).norm() < 1e-15);
    }

    #[test]
    fn no_probe_no_means() {
        let s = sys(1e4, 0.0);
        let d = DriveConfig::resonant(1.0, 0.0).unwrap();
        let m = mean_fields(5.0, &s, &d, 0.3);
        assert_eq!(m.d_mean.norm() + m.c_mean.norm(), 0.0);
        assert_eq!(homodyne_mean(5.0, 0.2, &s, &d, 0.3), 0.0);
        assert_eq!(cav_photon_number(5.0, &s, &d, 0.3), 0.0);
    }

    #[test]
    fn phonon_number_limits() {
        let s = sys(1e4, 0.0);
        let d = DriveConfig::resonant(1.0, 20.0).unwrap();
        assert_eq!(phonon_number(0.0, &s, &d, 0.0), 0.0);
        assert!((phonon_number(200.0, &s, &d, 0.0) - 400.0).abs() < 1e-9);
        assert!((steady_state_phonon_number(&s, &d, 0.0) - 400.0).abs() < 1e-12);
        let off = DriveConfig::resonant(0.0, 20.0).unwrap();
        assert_eq!(steady_state_phonon_number(&s, &off, 0.0), 0.0);
    }

    #[test]
    fn detuned_phonons_are_suppressed() {
        let s = sys(1e6, 0.0);
        let d = DriveConfig::resonant(2.0, 20.0).unwrap();
        let chi = 1e3;
        let n = steady_state_phonon_number(&s, &d, chi);
        let approx = s.gamma_mech * d.c_om * d.a_pr_in.powi(2) / (chi * chi);
        assert!((n / approx - 1.0).abs() < 1e-5);
    }

    #[test]
    fn photon_number_at_switch_on() {
        let s = sys(1e4, 0.0);
        let d = DriveConfig::resonant(1.0, 20.0).unwrap();
        let n0 = cav_photon_number(0.0, &s, &d, 0.0);
        assert!((n0 - 4.0 * 400.0 / 1e4).abs() < 1e-12);
        let ratio = phonon_number(1e3, &s, &d, 0.0) / cav_photon_number(1e3, &s, &d, 0.0);
        assert!((ratio - 1e4).abs() < 1e-6);
    }

    #[test]
    fn vacuum_variance_is_shot_noise() {
        let s = sys(1e4, 0.0);
        let d = DriveConfig::resonant(5.0, 20.0).unwrap();
        assert_eq!(homodyne_variance_oracle(2.0, 0.4, &s, &d, 1.0).unwrap(), 2e4);
        assert_eq!(homodyne_variance_oracle(0.0, 0.4, &s, &d, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rwa_checks() {
        let s = SystemParams::new(2e9, 2e5, 6e9, 1.9e5, 0.0).unwrap();
        let d = DriveConfig::resonant(8.6, 20.0 * 2e5f64.sqrt()).unwrap();
        assert_eq!(rwa_validity_check(&s, &d, 0.0), (true, true));
        assert_eq!(rwa_validity_check(&s, &d, 137.0), (true, true));
        let (first, second) = rwa_validity_check(&s, &d, 1e6 / d.c_om);
        assert!(!first && second);
    }
}
