//! SiV ground-state model: spin-orbit, Zeeman and strain terms in the basis
//! {e₋↓, e₊↑, e₊↓, e₋↑}, field tuning at fixed qubit splitting, and the
//! dressed strain coupling of the {e₋↓′, e₊↑′} two-level system.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::hermitian_eigen;
use crate::params::{hz_to_rad, rad_to_hz};
use crate::sweep::SweepResult;

pub type Matrix4 = [[C64; 4]; 4];

/// Basis positions.
pub const MINUS_DOWN: usize = 0;
pub const PLUS_UP: usize = 1;
pub const PLUS_DOWN: usize = 2;
pub const MINUS_UP: usize = 3;

/// Level structure and susceptibilities. Rates in rad/s, gyromagnetic ratios
/// in rad/s per tesla, susceptibilities in rad/s per unit strain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SivLevelParams {
    pub lambda_so: f64,
    pub gamma_l: f64,
    pub gamma_s: f64,
    pub d_sus: f64,
    pub f_sus: f64,
    pub t_par: f64,
    pub t_perp: f64,
}

impl Default for SivLevelParams {
    fn default() -> Self {
        SivLevelParams {
            lambda_so: hz_to_rad(46e9),
            gamma_l: hz_to_rad(1.4e9),
            gamma_s: hz_to_rad(14e9),
            d_sus: hz_to_rad(1.3e15),
            f_sus: hz_to_rad(-1.7e15),
            t_par: 0.0,
            t_perp: 0.0,
        }
    }
}

impl SivLevelParams {
    pub fn check(&self) -> Result<()> {
        if !(self.lambda_so > 0.0) {
            return Err(Error::invalid("lambda_so", "must be positive"));
        }
        if !(self.gamma_l > 0.0 && self.gamma_s > self.gamma_l) {
            return Err(Error::invalid("gamma_s", "need gamma_s > gamma_l > 0"));
        }
        Ok(())
    }
}

/// Default qubit splitting ω_s/2π = 7.64 GHz, in rad/s.
pub fn default_omega_s() -> f64 {
    hz_to_rad(7.64e9)
}

/// Cartesian strain components in the defect frame (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StrainTensor {
    pub e_xx: f64,
    pub e_yy: f64,
    pub e_zz: f64,
    pub e_xy: f64,
    pub e_yz: f64,
    pub e_zx: f64,
}

impl StrainTensor {
    /// Components larger than 10⁻³ are far outside the zero-point regime.
    pub fn warnings(&self) -> Vec<String> {
        let comps = [
            ("e_xx", self.e_xx),
            ("e_yy", self.e_yy),
            ("e_zz", self.e_zz),
            ("e_xy", self.e_xy),
            ("e_yz", self.e_yz),
            ("e_zx", self.e_zx),
        ];
        comps
            .iter()
            .filter(|(_, v)| !v.is_finite() || v.abs() > 1e-3)
            .map(|(n, v)| format!("strain component {n} = {v:e} is not a small zero-point strain"))
            .collect()
    }
}

/// Strain energies of the A1g and Eg irreducible representations (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StrainEnergies {
    pub e_a1g: f64,
    pub e_egx: f64,
    pub e_egy: f64,
}

impl StrainEnergies {
    /// Zero-point strain of the reference optomechanical crystal:
    /// ε_Egx/2π = −7.92 MHz, ε_Egy = 0.
    pub fn reference() -> Self {
        StrainEnergies { e_a1g: 0.0, e_egx: hz_to_rad(-7.92e6), e_egy: 0.0 }
    }
}

pub fn strain_energies(t: &StrainTensor, p: &SivLevelParams) -> StrainEnergies {
    StrainEnergies {
        e_a1g: p.t_perp * (t.e_xx + t.e_yy) + p.t_par * t.e_zz,
        e_egx: p.d_sus * (t.e_xx - t.e_yy) + p.f_sus * t.e_zx,
        e_egy: -2.0 * p.d_sus * t.e_xy + p.f_sus * t.e_yz,
    }
}

/// Magnetic field in tesla.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MagneticField {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

/// Strain-only part of the Hamiltonian.
pub fn strain_hamiltonian(se: &StrainEnergies) -> Matrix4 {
    let z = C64::new(0.0, 0.0);
    let plus = C64::new(-se.e_egx, -se.e_egy);
    let minus = C64::new(-se.e_egx, se.e_egy);
    let mut h = [[z; 4]; 4];
    h[MINUS_DOWN][PLUS_DOWN] = plus;
    h[PLUS_DOWN][MINUS_DOWN] = minus;
    h[PLUS_UP][MINUS_UP] = minus;
    h[MINUS_UP][PLUS_UP] = plus;
    h
}

/// Spin-orbit, Zeeman and strain Hamiltonian, without the A1g shift.
pub fn hamiltonian_4x4(b: &MagneticField, se: &StrainEnergies, p: &SivLevelParams) -> Matrix4 {
    let mut h = strain_hamiltonian(se);
    let l2 = p.lambda_so / 2.0;
    let (gs, gl) = (p.gamma_s, p.gamma_l);
    h[MINUS_DOWN][MINUS_DOWN] = C64::new(-l2 - (gs + gl) * b.bz, 0.0);
    h[PLUS_UP][PLUS_UP] = C64::new(-l2 + (gs + gl) * b.bz, 0.0);
    h[PLUS_DOWN][PLUS_DOWN] = C64::new(l2 - (gs - gl) * b.bz, 0.0);
    h[MINUS_UP][MINUS_UP] = C64::new(l2 + (gs - gl) * b.bz, 0.0);
    let bp = C64::new(gs * b.bx, gs * b.by);
    h[MINUS_DOWN][MINUS_UP] = bp;
    h[MINUS_UP][MINUS_DOWN] = bp.conj();
    h[PLUS_UP][PLUS_DOWN] = bp.conj();
    h[PLUS_DOWN][PLUS_UP] = bp;
    h
}

/// Energies of the four field-dressed levels, indexed like the basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEnergies(pub [f64; 4]);

impl LevelEnergies {
    pub fn qubit_splitting(&self) -> f64 {
        self.0[PLUS_UP] - self.0[MINUS_DOWN]
    }
}

/// Closed-form energies at zero strain and B_y = 0:
/// `E_{τσ} = τ[γ_L B_z − (2δ_{σ↑} − 1)/2 · √(4γ_S²B_x² + (λ − 2τγ_S B_z)²)]`.
pub fn analytic_energies(b: &MagneticField, p: &SivLevelParams) -> LevelEnergies {
    let bx = (b.bx * b.bx + b.by * b.by).sqrt();
    let level = |tau: f64, up: bool| {
        let root = (4.0 * p.gamma_s.powi(2) * bx * bx + (p.lambda_so - 2.0 * tau * p.gamma_s * b.bz).powi(2)).sqrt();
        let sign = if up { 0.5 } else { -0.5 };
        tau * (p.gamma_l * b.bz - sign * root)
    };
    let mut e = [0.0; 4];
    e[MINUS_DOWN] = level(-1.0, false);
    e[PLUS_UP] = level(1.0, true);
    e[PLUS_DOWN] = level(1.0, false);
    e[MINUS_UP] = level(-1.0, true);
    LevelEnergies(e)
}

/// Validity range of [`tune_bx`]: `[ω_s/(2(γ_L+γ_S)), ω_s/(2γ_L))`.
pub fn bz_range(omega_s: f64, p: &SivLevelParams) -> (f64, f64) {
    (omega_s / (2.0 * (p.gamma_l + p.gamma_s)), omega_s / (2.0 * p.gamma_l))
}

/// Off-axis field |B_x| that holds E₊↑ − E₋↓ at ω_s for the given B_z:
///
/// ```text
/// |B_x| = √((2γ_S B_z)² − x²) · √(λ² − x²) / (2γ_S |x|),   x = 2γ_L B_z − ω_s
/// ```
pub fn tune_bx(bz: f64, omega_s: f64, p: &SivLevelParams) -> Result<f64> {
    let (lo, hi) = bz_range(omega_s, p);
    if !(bz >= lo * (1.0 - 1e-12)) || !(bz < hi) {
        return Err(Error::Domain(format!("B_z = {bz} T outside the tunable range [{lo:.6}, {hi:.6}) T")));
    }
    let x = 2.0 * p.gamma_l * bz - omega_s;
    if x.abs() < 1e-9 * omega_s {
        return Err(Error::Domain(format!("B_x diverges as B_z → {hi:.6} T")));
    }
    let a = ((2.0 * p.gamma_s * bz).powi(2) - x * x).max(0.0);
    let c = p.lambda_so.powi(2) - x * x;
    if c < 0.0 {
        return Err(Error::Domain("splitting exceeds the spin-orbit gap".into()));
    }
    let bx = a.sqrt() * c.sqrt() / (2.0 * p.gamma_s * x.abs());
    if !bx.is_finite() {
        return Err(Error::Domain(format!("B_x is not finite at B_z = {bz} T")));
    }
    Ok(bx)
}

/// Eigenpairs of the zero-strain Hamiltonian, labelled like the basis.
///
/// Zeeman terms at zero strain never mix the orbital branches τ = ±, so each
/// eigenvector is assigned the branch it overlaps most with. Within a branch
/// the two levels follow the closed-form ordering, which is what adiabatic
/// continuation from B = 0 with B_x ≠ 0 gives: on the − branch ↓ lies below
/// ↑, on the + branch ↑ lies below ↓. Pure overlap labelling would swap the
/// labels of the + branch once 2γ_S B_z exceeds λ. At B_x = B_y = 0 the spin is a
/// good quantum number and labels follow it instead.
pub fn dressed_states(b: &MagneticField, p: &SivLevelParams) -> Result<(LevelEnergies, Matrix4)> {
    let h = hamiltonian_4x4(b, &StrainEnergies::default(), p);
    let (vals, vecs) = hermitian_eigen(&h);
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    for k in 0..4 {
        let w_minus = vecs[MINUS_DOWN][k].norm_sqr() + vecs[MINUS_UP][k].norm_sqr();
        let w_plus = vecs[PLUS_UP][k].norm_sqr() + vecs[PLUS_DOWN][k].norm_sqr();
        if (w_minus - w_plus).abs() < 1e-6 {
            return Err(Error::LabelAmbiguity(format!("eigenvector {k} splits evenly between orbital branches")));
        }
        if w_minus > w_plus {
            minus.push(k);
        } else {
            plus.push(k);
        }
    }
    if minus.len() != 2 || plus.len() != 2 {
        return Err(Error::LabelAmbiguity("orbital branches are not populated two and two".into()));
    }
    let gap_tol = 1e-6 * p.lambda_so;
    for pair in [&minus, &plus] {
        if (vals[pair[0]] - vals[pair[1]]).abs() < gap_tol {
            return Err(Error::LabelAmbiguity("degenerate levels within one orbital branch".into()));
        }
    }
    // Eigenvalues come sorted, so pair[0] is the lower level. Without a
    // transverse field the spin is conserved and levels of one branch cross
    // instead of repelling, so the spin content decides the label.
    if b.bx == 0.0 && b.by == 0.0 {
        if vecs[MINUS_UP][minus[0]].norm_sqr() > vecs[MINUS_DOWN][minus[0]].norm_sqr() {
            minus.swap(0, 1);
        }
        if vecs[PLUS_DOWN][plus[0]].norm_sqr() > vecs[PLUS_UP][plus[0]].norm_sqr() {
            plus.swap(0, 1);
        }
    }
    let assignment = [(MINUS_DOWN, minus[0]), (MINUS_UP, minus[1]), (PLUS_UP, plus[0]), (PLUS_DOWN, plus[1])];
    let mut energies = [0.0; 4];
    let mut states = [[C64::new(0.0, 0.0); 4]; 4];
    for (label, k) in assignment {
        energies[label] = vals[k];
        for r in 0..4 {
            states[r][label] = vecs[r][k];
        }
    }
    Ok((LevelEnergies(energies), states))
}

/// Effective two-level system {e₋↓′, e₊↑′} and its strain coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedTwoLevel {
    /// E₊↑′ − E₋↓′ (rad/s).
    pub omega_s: f64,
    /// |c₁|·|ε_Egx + iε_Egy| (rad/s).
    pub g_sm: f64,
    pub b_field: MagneticField,
    /// Dressed strain matrix elements per unit (ε_Egx ± iε_Egy):
    /// c₁ = ⟨e₋↓′|·|e₊↑′⟩, c₂ = ⟨e₋↓′|·|e₊↓′⟩, c₃ = ⟨e₊↑′|·|e₋↑′⟩, c₄ = ⟨e₊↓′|·|e₋↑′⟩.
    pub c1: C64,
    pub c2: C64,
    pub c3: C64,
    pub c4: C64,
}

fn sandwich(states: &Matrix4, h: &Matrix4, i: usize, j: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..4 {
        for c in 0..4 {
            acc += states[r][i].conj() * h[r][c] * states[c][j];
        }
    }
    acc
}

/// Strain coupling of the dressed qubit at field `b`.
pub fn strain_coupling(b: &MagneticField, se: &StrainEnergies, p: &SivLevelParams) -> Result<DressedTwoLevel> {
    let (energies, states) = dressed_states(b, p)?;
    let unit = strain_hamiltonian(&StrainEnergies { e_a1g: 0.0, e_egx: 1.0, e_egy: 0.0 });
    let c1 = sandwich(&states, &unit, MINUS_DOWN, PLUS_UP);
    let c2 = sandwich(&states, &unit, MINUS_DOWN, PLUS_DOWN);
    let c3 = sandwich(&states, &unit, PLUS_UP, MINUS_UP);
    let c4 = sandwich(&states, &unit, PLUS_DOWN, MINUS_UP);
    Ok(DressedTwoLevel {
        omega_s: energies.qubit_splitting(),
        g_sm: c1.norm() * C64::new(se.e_egx, se.e_egy).norm(),
        b_field: *b,
        c1,
        c2,
        c3,
        c4,
    })
}

/// `n` B_z points on [ω_s/(2(γ_L+γ_S)), ω_s/(2γ_L)), upper end excluded.
pub fn default_bz_grid(omega_s: f64, p: &SivLevelParams, n: usize) -> Vec<f64> {
    let (lo, hi) = bz_range(omega_s, p);
    crate::numerics::lin_space_half_open(lo, hi, n)
}

pub const BZ_SWEEP_COLUMNS: [&str; 3] = ["b_z_tesla", "b_x_tesla", "g_sm_hz"];

/// g_sm along a B_z grid at fixed qubit splitting.
pub fn sweep_bz(b_z_grid: &[f64], omega_s: f64, se: &StrainEnergies, p: &SivLevelParams) -> SweepResult {
    let rows: Vec<Result<(f64, f64, Vec<String>)>> = b_z_grid
        .par_iter()
        .map(|&bz| {
            let bx = tune_bx(bz, omega_s, p)?;
            let b = MagneticField { bx, by: 0.0, bz };
            let dressed = strain_coupling(&b, se, p)?;
            let mut notes = Vec::new();
            let split = analytic_energies(&b, p).qubit_splitting();
            if ((split - omega_s) / omega_s).abs() > 1e-9 {
                notes.push(format!("qubit splitting off target by {:.3e}", (split - omega_s) / omega_s));
            }
            Ok((bx, dressed.g_sm, notes))
        })
        .collect();
    let mut out = SweepResult::new(&BZ_SWEEP_COLUMNS, Some("warnings"));
    for (bz, row) in b_z_grid.iter().zip(rows) {
        match row {
            Ok((bx, g, notes)) => out.push(vec![*bz, bx, rad_to_hz(g)], notes),
            Err(e) => out.push_failure(&[*bz], e.to_string()),
        }
    }
    out
}
