//! One function per subcommand. Each returns its table plus any failure
//! message; writing files is left to the caller.

use std::fmt::Write as _;

use omit_core::dynamics::{
    best_homodyne_angle, cav_photon_number, homodyne_variance_oracle, mean_fields, mean_fields_ode, oracle_snr_squared,
    phonon_number,
};
use omit_core::numerics::{lin_space_half_open, log_space};
use omit_core::readout::{
    critical_probe_amplitude, measurement_time, optimal_homodyne_angle, snr_components, sweep_chi, ChiSweepSetup,
};
use omit_core::sensing::sensing_sweep;
use omit_core::siv::{default_bz_grid, sweep_bz};
use omit_core::sweep::format_value;
use omit_core::{
    feasibility_report, readout_result, validate, CooperativityMode, DriveConfig, RunConfig, SweepResult, SystemParams,
};

use crate::Command;

pub struct Context<'a> {
    pub run: &'a RunConfig,
    pub points: usize,
    pub tolerance: f64,
}

pub enum Table {
    Sweep(SweepResult),
    /// Pre-rendered CSV for the non-sweep commands.
    Text(String),
}

impl Table {
    pub fn to_csv(&self) -> String {
        match self {
            Table::Sweep(s) => s.to_csv(),
            Table::Text(t) => t.clone(),
        }
    }
}

pub struct Outcome {
    pub table: Table,
    pub notes: Vec<String>,
    pub stdout: Option<String>,
    pub failure: Option<String>,
}

impl Outcome {
    fn sweep(s: SweepResult) -> Self {
        let failure = match s.failures() {
            0 => None,
            n => Some(format!("{n} of {} points failed; see the warnings column", s.rows.len())),
        };
        Outcome { table: Table::Sweep(s), notes: vec![], stdout: None, failure }
    }

    fn failed(msg: String) -> Self {
        Outcome { table: Table::Text(String::new()), notes: vec![], stdout: None, failure: Some(msg) }
    }
}

pub fn execute(cmd: Command, ctx: &Context) -> Outcome {
    match cmd {
        Command::Fig2 => fig2(ctx),
        Command::FigS1 => stacked(ctx, "n_th", &[0.0, 1.0, 10.0], |s, v| s.n_th = v),
        Command::FigS2 => stacked(ctx, "c_max", &[1e1, 1e2, 1e3, 1e4, 1e6], |s, v| s.c_max = v),
        Command::Fig3 => fig3(ctx),
        Command::FigS5 => fig_s5(ctx),
        Command::Report => report(ctx),
        Command::SnrTrace => snr_trace(ctx),
        Command::OracleCheck => oracle_check(ctx),
    }
}

fn chi_setup(ctx: &Context) -> ChiSweepSetup {
    let r = ctx.run;
    let g = r.sys.gamma_mech;
    ChiSweepSetup {
        a_pr_norm: r.a_pr_norm,
        n_th: r.sys.n_th,
        c_max: r.c_max(),
        kappa_over_gamma: r.sys.kappa / g,
        delta_sm_over_gamma: r.spin.delta_sm / g,
        n_spins: r.spin.n_spins,
        gamma_mech: g,
        rel_tol: ctx.tolerance,
    }
}

fn chi_grid(ctx: &Context) -> Vec<f64> {
    log_space(1e-3, 1e3, ctx.points)
}

fn fig2(ctx: &Context) -> Outcome {
    match sweep_chi(&chi_grid(ctx), &chi_setup(ctx)) {
        Ok(s) => Outcome::sweep(s),
        Err(e) => Outcome::failed(e.to_string()),
    }
}

/// χ sweeps at several values of one outer parameter, stacked with that
/// parameter as the leading column.
fn stacked(ctx: &Context, name: &str, values: &[f64], set: impl Fn(&mut ChiSweepSetup, f64)) -> Outcome {
    let grid = chi_grid(ctx);
    let mut all: Option<SweepResult> = None;
    for &v in values {
        let mut setup = chi_setup(ctx);
        set(&mut setup, v);
        let part = match sweep_chi(&grid, &setup) {
            Ok(s) => s.with_leading_column(name, v),
            Err(e) => return Outcome::failed(e.to_string()),
        };
        match &mut all {
            Some(a) => a.extend(part),
            None => all = Some(part),
        }
    }
    Outcome::sweep(all.expect("at least one outer value"))
}

fn fig3(ctx: &Context) -> Outcome {
    // η = 0 is excluded; the grid ends exactly at 1.
    let grid: Vec<f64> = lin_space_half_open(0.0, 1.0, ctx.points).iter().map(|x| 1.0 - x).rev().collect();
    match sensing_sweep(&grid, ctx.run.sys.n_th) {
        Ok(s) => Outcome::sweep(s),
        Err(e) => Outcome::failed(e.to_string()),
    }
}

fn fig_s5(ctx: &Context) -> Outcome {
    let r = ctx.run;
    let grid = default_bz_grid(r.omega_s, &r.siv, ctx.points);
    Outcome::sweep(sweep_bz(&grid, r.omega_s, &r.strain, &r.siv))
}

fn mode(r: &RunConfig) -> CooperativityMode {
    r.cooperativity
}

fn csv_line(out: &mut String, key: &str, value: f64) {
    let _ = writeln!(out, "{key},{}", format_value(value));
}

fn report(ctx: &Context) -> Outcome {
    let r = ctx.run;
    let g = r.sys.gamma_mech;
    let mut notes: Vec<String> = match validate(&r.sys, &r.drive, &r.spin) {
        Ok(ws) => ws.iter().map(|w| w.to_string()).collect(),
        Err(e) => return Outcome::failed(e.to_string()),
    };
    let res = match readout_result(&r.sys, &r.spin, r.a_pr_norm, mode(r), ctx.tolerance) {
        Ok(res) => res,
        Err(e) => return Outcome::failed(e.to_string()),
    };
    notes.extend(res.warnings.iter().cloned());
    let feas = feasibility_report(&r.spin, &r.sys, res.tau_meas);
    let chi = r.spin.chi();
    let probe = critical_probe_amplitude(chi, g, r.spin.delta_sm, r.spin.g_sm, res.c_om_opt);
    let a_in = r.a_pr_norm * g.sqrt();
    if a_in > probe.at_c_om {
        notes.push(format!(
            "probe amplitude {:.4e} exceeds the critical amplitude {:.4e} at C_om = {:.4e}",
            a_in, probe.at_c_om, res.c_om_opt
        ));
    }
    if !feas.detuning_criterion_ok {
        notes.push("detuning criterion for QND readout not met".into());
    }
    if !feas.cooperativity_criterion_ok {
        notes.push("collective cooperativity criterion not met".into());
    }

    let mut csv = String::from("quantity,value\n");
    csv_line(&mut csv, "chi_over_gamma", chi / g);
    csv_line(&mut csv, "c_om_opt", res.c_om_opt);
    csv_line(&mut csv, "tau_gamma", res.tau_gamma);
    csv_line(&mut csv, "tau_meas_s", res.tau_meas);
    csv_line(&mut csv, "snr_at_tau", res.snr_at_tau);
    csv_line(&mut csv, "n_mech_tau", res.n_mech_at_tau);
    csv_line(&mut csv, "n_cav_tau", res.n_cav_at_tau);
    csv_line(&mut csv, "n_crit", res.n_crit);
    csv_line(&mut csv, "tau_purcell_s", feas.tau_purcell);
    csv_line(&mut csv, "t1_s", feas.t1);
    csv_line(&mut csv, "qnd_ratio", feas.qnd_ratio);
    csv_line(&mut csv, "detuning_criterion_ok", f64::from(u8::from(feas.detuning_criterion_ok)));
    csv_line(&mut csv, "cooperativity_criterion_ok", f64::from(u8::from(feas.cooperativity_criterion_ok)));
    csv_line(&mut csv, "a_pr_in_over_sqrt_gamma", r.a_pr_norm);
    csv_line(&mut csv, "critical_a_over_sqrt_gamma", probe.at_c_om / g.sqrt());
    csv_line(&mut csv, "critical_a_min_over_sqrt_gamma", probe.minimized / g.sqrt());

    let mut text = String::new();
    for line in csv.lines().skip(1) {
        let (k, v) = line.split_once(',').unwrap_or((line, ""));
        let _ = writeln!(text, "{k:<32} {v}");
    }
    Outcome { table: Table::Text(csv), notes, stdout: Some(text), failure: None }
}

pub const TRACE_COLUMNS: [&str; 10] =
    ["tau_gamma", "tau_seconds", "snr", "signal", "noise", "f_term", "g_term", "xi", "n_mech", "n_cav"];

/// Trace from a hundredth to a hundred times the measurement time.
fn snr_trace(ctx: &Context) -> Outcome {
    let r = ctx.run;
    let g = r.sys.gamma_mech;
    let res = match readout_result(&r.sys, &r.spin, r.a_pr_norm, mode(r), ctx.tolerance) {
        Ok(res) => res,
        Err(e) => return Outcome::failed(e.to_string()),
    };
    let chi = r.spin.chi();
    let drive = match DriveConfig::resonant(res.c_om_opt, r.a_pr_norm * g.sqrt()) {
        Ok(d) => d,
        Err(e) => return Outcome::failed(e.to_string()),
    };
    let mut out = SweepResult::new(&TRACE_COLUMNS, Some("warnings"));
    for tau in log_space(res.tau_gamma * 1e-2, res.tau_gamma * 1e2, ctx.points) {
        match snr_components(tau, chi / g, res.c_om_opt, r.a_pr_norm, r.sys.n_th) {
            Ok(c) => {
                let t = tau / g;
                out.push(
                    vec![
                        tau,
                        omit_core::period_seconds(tau, g),
                        c.snr,
                        c.signal,
                        c.noise,
                        c.f_term,
                        c.g_term,
                        c.xi,
                        phonon_number(t, &r.sys, &drive, chi),
                        cav_photon_number(t, &r.sys, &drive, chi),
                    ],
                    vec![],
                );
            }
            Err(e) => out.push_failure(&[tau], e.to_string()),
        }
    }
    let mut o = Outcome::sweep(out);
    o.notes = res.warnings;
    o
}

struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Cross-checks of the closed forms against the finite-κ oracles at the
/// configured operating point, in units of Γ_mech.
fn oracle_check(ctx: &Context) -> Outcome {
    let r = ctx.run;
    let g = r.sys.gamma_mech;
    let sys = match SystemParams::new(r.sys.kappa / g, 1.0, r.sys.omega_m / g, r.sys.g0 / g, r.sys.n_th) {
        Ok(s) => s,
        Err(e) => return Outcome::failed(e.to_string()),
    };
    let chi = r.spin.chi() / g;
    let a = r.a_pr_norm;
    let res = match readout_result(&r.sys, &r.spin, a, mode(r), ctx.tolerance) {
        Ok(res) => res,
        Err(e) => return Outcome::failed(e.to_string()),
    };
    let (c, tau) = (res.c_om_opt, res.tau_gamma);
    let drive = match DriveConfig::resonant(c, a) {
        Ok(d) => d,
        Err(e) => return Outcome::failed(e.to_string()),
    };
    // The closed forms take κ → ∞; their error is of order Γ(1 + C)/κ.
    let adiabatic = 2.0 * (1.0 + c) / sys.kappa;
    let mut checks: Vec<Check> = Vec::new();
    let mut errors: Vec<String> = Vec::new();

    let mut field_dev: f64 = 0.0;
    let mut occ_dev: f64 = 0.0;
    let mut cav_dev: f64 = 0.0;
    for eps in [chi, -chi] {
        match mean_fields_ode(tau, &sys, &drive, eps) {
            Ok(ode) => {
                let exact = mean_fields(tau, &sys, &drive, eps);
                field_dev = field_dev
                    .max((exact.d_mean - ode.d_mean).norm() / ode.d_mean.norm())
                    .max((exact.c_mean - ode.c_mean).norm() / ode.c_mean.norm());
                occ_dev = occ_dev.max(rel(phonon_number(tau, &sys, &drive, eps), ode.c_mean.norm_sqr()));
                cav_dev = cav_dev.max(rel(cav_photon_number(tau, &sys, &drive, eps), ode.d_mean.norm_sqr()));
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    checks.push(Check { name: "mean_fields_vs_ode", value: field_dev, tolerance: 1e-6 });
    checks.push(Check { name: "phonon_number_vs_ode", value: occ_dev, tolerance: 0.01 + adiabatic });
    checks.push(Check { name: "cav_photon_number_vs_ode", value: cav_dev, tolerance: 0.01 + adiabatic });

    let vacuum = SystemParams { n_th: 0.0, ..sys };
    match homodyne_variance_oracle(tau, 0.0, &vacuum, &drive, chi) {
        Ok(v) => {
            checks.push(Check { name: "vacuum_variance_vs_kappa_tau", value: rel(v, sys.kappa * tau), tolerance: 1e-6 })
        }
        Err(e) => errors.push(e.to_string()),
    }

    if sys.n_th > 0.0 {
        // N² is the sum of both branch variances in units of κ.
        let branches = homodyne_variance_oracle(tau, 0.0, &sys, &drive, chi)
            .and_then(|p| Ok(p + homodyne_variance_oracle(tau, 0.0, &sys, &drive, -chi)?));
        match (branches, snr_components(tau, chi, c, a, sys.n_th)) {
            (Ok(v), Ok(closed)) => checks.push(Check {
                name: "thermal_variance_vs_closed_form",
                value: rel(v / sys.kappa, closed.noise * closed.noise),
                tolerance: 0.01 + adiabatic,
            }),
            (Err(e), _) | (_, Err(e)) => errors.push(e.to_string()),
        }
    }

    match (snr_components(tau, chi, c, a, sys.n_th), oracle_snr_squared(tau, &sys, &drive, chi)) {
        (Ok(closed), Ok(oracle)) => {
            checks.push(Check { name: "snr_vs_oracle", value: rel(oracle.sqrt(), closed.snr), tolerance: 0.02 });
            checks.push(Check { name: "snr_at_tau_meas", value: (closed.snr - 1.0).abs(), tolerance: 1e-6 });
        }
        (Err(e), _) | (_, Err(e)) => errors.push(e.to_string()),
    }

    let phi_oracle = best_homodyne_angle(tau, &sys, &drive, chi);
    let phi_closed = optimal_homodyne_angle(tau, chi, c);
    let d = (phi_oracle - phi_closed).rem_euclid(std::f64::consts::PI);
    let angle_dev = d.min(std::f64::consts::PI - d).abs();
    checks.push(Check { name: "homodyne_angle_vs_closed_form", value: angle_dev, tolerance: 1e-4 + adiabatic });

    if let CooperativityMode::Auto { c_max } = r.cooperativity {
        // The optimum must not be beaten by neighbouring cooperativities.
        let mut worst: f64 = 0.0;
        for f in [0.99, 1.01] {
            let cn = (c * f).clamp(omit_core::readout::C_MIN, c_max);
            match measurement_time(chi, a, sys.n_th, cn, ctx.tolerance) {
                Ok(tn) => worst = worst.max((tau - tn) / tau),
                Err(e) => errors.push(e.to_string()),
            }
        }
        checks.push(Check { name: "cooperativity_optimum", value: worst.max(0.0), tolerance: 1e-6 });
    }

    let mut csv = String::from("check,value,tolerance,pass\n");
    let mut text = format!("{:<32} {:>12} {:>12}  result\n", "check", "value", "tolerance");
    for ch in &checks {
        let verdict = if ch.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(csv, "{},{},{},{}", ch.name, format_value(ch.value), format_value(ch.tolerance), verdict);
        let _ = writeln!(text, "{:<32} {:>12.4e} {:>12.4e}  {verdict}", ch.name, ch.value, ch.tolerance);
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let failure = if failed > 0 || !errors.is_empty() {
        Some(format!("{failed} of {} oracle checks failed, {} could not run", checks.len(), errors.len()))
    } else {
        None
    };
    Outcome { table: Table::Text(csv), notes: errors, stdout: Some(text), failure }
}
