//! Configuration loading and everything written next to the CSV: the `.meta`
//! sidecar that reproduces a run and the gnuplot script.

use std::path::{Path, PathBuf};

use omit_core::config::SIV_EXAMPLE;
use omit_core::{RawConfig, RunConfig};

use crate::{Command, Failure};

/// `#! key = value` lines. The core parser treats them as comments; the CLI
/// reads them so that a `.meta` file passed back through `--config` restores
/// the grid size and tolerance of the original run.
#[derive(Debug, Default)]
pub struct Directives {
    pub command: Option<String>,
    pub points: Option<usize>,
    pub tolerance: Option<f64>,
}

pub struct Loaded {
    pub raw: RawConfig,
    pub run: RunConfig,
    pub directives: Directives,
}

pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Loaded, Failure> {
    let text = match path {
        Some(p) => {
            std::fs::read_to_string(p).map_err(|e| Failure::Setup(format!("cannot read {}: {e}", p.display())))?
        }
        None => SIV_EXAMPLE.to_string(),
    };
    let origin = path.map(|p| p.display().to_string()).unwrap_or_else(|| "built-in SiV example".into());
    let config_err = |e: omit_core::Error| Failure::Setup(format!("{origin}: {e}"));
    let directives = parse_directives(&text)
        .map_err(|(line, msg)| Failure::Setup(format!("{origin}: config line {line}: {msg}")))?;
    let mut raw = RawConfig::parse(&text).map_err(config_err)?;
    for o in overrides {
        raw.apply_override(o).map_err(config_err)?;
    }
    let run = raw.resolve().map_err(config_err)?;
    Ok(Loaded { raw, run, directives })
}

fn parse_directives(text: &str) -> Result<Directives, (usize, String)> {
    let mut d = Directives::default();
    for (idx, line) in text.lines().enumerate() {
        let Some(rest) = line.trim_start().strip_prefix("#!") else { continue };
        let Some((key, value)) = rest.split_once('=') else { continue };
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| (idx + 1, format!("directive `{key}` expects {what}, found `{value}`"));
        match key {
            "command" => d.command = Some(value.to_string()),
            "points" => d.points = Some(value.parse().map_err(|_| bad("an integer"))?),
            "tolerance" => d.tolerance = Some(value.parse().map_err(|_| bad("a number"))?),
            _ => {}
        }
    }
    Ok(d)
}

pub fn check_output(out: &Path) -> Result<(), Failure> {
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => return Ok(()),
    };
    if parent.is_dir() {
        Ok(())
    } else {
        Err(Failure::Setup(format!("output directory {} does not exist", parent.display())))
    }
}

fn sidecar(out: &Path, ext: &str) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(ext);
    out.with_file_name(name)
}

pub fn write_sidecar(out: &Path, ext: &str, text: &str) -> Result<(), Failure> {
    let path = sidecar(out, ext);
    std::fs::write(&path, text).map_err(|e| Failure::Setup(format!("cannot write {}: {e}", path.display())))
}

pub fn write_csv(out: &Path, table: &crate::commands::Table) -> Result<(), Failure> {
    std::fs::write(out, table.to_csv()).map_err(|e| Failure::Setup(format!("cannot write {}: {e}", out.display())))
}

/// Resolved configuration plus the run directives. Deliberately free of
/// timestamps and paths so that identical runs give identical files.
pub fn write_meta(out: &Path, command: Command, raw: &RawConfig, points: usize, tolerance: f64) -> Result<(), Failure> {
    let mut text = String::new();
    text.push_str(&format!(
        "# omit {} run; re-run with: omit {} --config <this file>\n",
        omit_core::VERSION,
        command.name()
    ));
    text.push_str(&format!("#! version = {}\n", omit_core::VERSION));
    text.push_str(&format!("#! command = {}\n", command.name()));
    text.push_str(&format!("#! points = {points}\n"));
    text.push_str(&format!("#! tolerance = {tolerance:e}\n"));
    match command {
        Command::FigS1 => text.push_str("# n_th is swept over 0, 1, 10; the configured value is ignored\n"),
        Command::FigS2 => {
            text.push_str("# c_max is swept over 1e1, 1e2, 1e3, 1e4, 1e6; the configured value is ignored\n")
        }
        _ => {}
    }
    text.push_str(&raw.to_config_text());
    write_sidecar(out, "meta", &text)
}

/// Standalone gnuplot script that plots the CSV it sits next to.
pub fn gnuplot_script(command: Command, out: &Path) -> Option<String> {
    let csv = out.file_name()?.to_string_lossy().replace('\'', "");
    let head = format!(
        "# gnuplot -p {name}.gp\nset datafile separator ','\nset key autotitle columnhead\nset grid\n",
        name = csv
    );
    let body = match command {
        Command::Fig2 => format!(
            "set logscale xy\nset format xy '10^{{%L}}'\nset xlabel 'chi / Gamma_mech'\nset ylabel 'tau_meas Gamma_mech'\n\
             plot '{csv}' using 1:3 with linespoints title 'optimised C_om'\n"
        ),
        Command::FigS1 => format!(
            "set logscale xy\nset xlabel 'chi / Gamma_mech'\nset ylabel 'tau_meas Gamma_mech'\n\
             plot for [n in '0 1 10'] '{csv}' using ($1 == n ? $2 : 1/0):4 with lines title 'n_th = '.n\n"
        ),
        Command::FigS2 => format!(
            "set logscale xy\nset xlabel 'chi / Gamma_mech'\nset ylabel 'tau_meas Gamma_mech'\n\
             plot for [c in '10 100 1000 10000 1000000'] '{csv}' using ($1 == c ? $2 : 1/0):4 with lines title 'C_max = '.c\n"
        ),
        Command::Fig3 => format!(
            "set xlabel 'detection efficiency eta'\nset ylabel 'added noise quanta'\nset logscale y\n\
             plot '{csv}' using 1:2 with lines, '' using 1:3 with lines, '' using 1:($4 > 0 ? $4 : 1/0) with lines\n"
        ),
        Command::FigS5 => format!(
            "set xlabel 'B_z (T)'\nset ylabel 'g_sm / 2 pi (MHz)'\n\
             plot '{csv}' using 1:($3 / 1e6) with lines title 'strain coupling'\n"
        ),
        Command::SnrTrace => format!(
            "set logscale x\nset xlabel 'tau Gamma_mech'\nset ylabel 'SNR'\nset arrow from graph 0, first 1 to graph 1, first 1 nohead dt 2\n\
             plot '{csv}' using 1:3 with lines title 'SNR'\n"
        ),
        Command::Report | Command::OracleCheck => return None,
    };
    Some(head + &body)
}
