//! Strict `key = value` configuration files.
//!
//! Linear frequencies are given in Hz and converted to rad/s on resolution.
//! Unknown keys are rejected so that typos never silently fall back to a
//! default. A repeated key keeps its last value and records a warning.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::{hz_to_rad, DriveConfig, SpinParams, SystemParams};
use crate::readout::{CooperativityMode, C_MIN};
use crate::siv::{SivLevelParams, StrainEnergies};

/// Keys that every file must define.
pub const REQUIRED_KEYS: [&str; 12] = [
    "kappa_hz",
    "gamma_mech_hz",
    "omega_m_hz",
    "g0_hz",
    "n_th",
    "g_sm_hz",
    "delta_sm_hz",
    "a_pr_in_normalized",
    "c_om",
    "eta",
    "n_spins",
    "beta",
];

/// Optional keys and the default each one takes when absent.
pub const OPTIONAL_KEYS: [(&str, &str); 13] = [
    ("delta_hz", "0"),
    ("phi_rad", "0"),
    ("gamma_rel_hz", "0"),
    ("c_max", "1e6"),
    ("lambda_so_hz", "46e9"),
    ("gamma_l_hz_per_t", "1.4e9"),
    ("gamma_s_hz_per_t", "14e9"),
    ("d_sus_hz", "1.3e15"),
    ("f_sus_hz", "-1.7e15"),
    ("e_egx_hz", "-7.92e6"),
    ("e_egy_hz", "0"),
    ("e_a1g_hz", "0"),
    ("omega_s_hz", "7.64e9"),
];

fn is_known(key: &str) -> bool {
    REQUIRED_KEYS.contains(&key) || OPTIONAL_KEYS.iter().any(|(k, _)| *k == key)
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    /// Source line, `None` for command-line overrides.
    line: Option<usize>,
}

/// Parsed but not yet interpreted configuration. Values are kept as text so
/// that a resolved run can be written back out verbatim.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
    pub warnings: Vec<String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RawConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(Some(line_no), format!("expected `key = value`, found `{line}`")))?;
            cfg.insert(key.trim(), value.trim(), Some(line_no))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(None, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies a `KEY=VALUE` override. Overrides go through the same checks as
    /// file entries and always win.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(None, format!("override `{assignment}` is not KEY=VALUE")))?;
        self.insert(key.trim(), value.trim(), None)
    }

    fn insert(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<()> {
        if !is_known(key) {
            return Err(Error::config(line, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(Error::config(line, format!("key `{key}` has no value")));
        }
        let entry = Entry { value: value.to_string(), line };
        // Overrides replace file values by design; only repeated file keys warn.
        if let (Some(old), Some(now)) = (self.entries.insert(key.to_string(), entry), line) {
            let origin = match old.line {
                Some(n) => format!("line {n}"),
                None => "an override".to_string(),
            };
            let now = format!("line {now}");
            self.warnings.push(format!("duplicate key `{key}`: {now} replaces {origin}"));
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).and_then(|e| e.line)
    }

    fn number(&self, key: &'static str) -> Result<f64> {
        let text = match self.get(key) {
            Some(v) => v,
            None => match OPTIONAL_KEYS.iter().find(|(k, _)| *k == key) {
                Some((_, d)) => d,
                None => return Err(Error::config(None, format!("missing required key `{key}`"))),
            },
        };
        let v: f64 = text
            .parse()
            .map_err(|_| Error::config(self.line_of(key), format!("`{key}` = `{text}` is not a number")))?;
        if !v.is_finite() {
            return Err(Error::config(self.line_of(key), format!("`{key}` must be finite")));
        }
        Ok(v)
    }

    fn integer(&self, key: &'static str) -> Result<u32> {
        let text = self.get(key).ok_or_else(|| Error::config(None, format!("missing required key `{key}`")))?;
        text.parse()
            .map_err(|_| Error::config(self.line_of(key), format!("`{key}` = `{text}` is not a non-negative integer")))
    }

    /// Interprets the entries. Parameter-level failures are reported against
    /// the line of the offending key when it came from a file.
    pub fn resolve(&self) -> Result<RunConfig> {
        for key in REQUIRED_KEYS {
            if self.get(key).is_none() {
                return Err(Error::config(None, format!("missing required key `{key}`")));
            }
        }
        let at = |key: &'static str| {
            let line = self.line_of(key);
            move |e: Error| Error::config(line, e.to_string())
        };

        let gamma_mech = hz_to_rad(self.number("gamma_mech_hz")?);
        let sys = SystemParams::new(
            hz_to_rad(self.number("kappa_hz")?),
            gamma_mech,
            hz_to_rad(self.number("omega_m_hz")?),
            hz_to_rad(self.number("g0_hz")?),
            self.number("n_th")?,
        )
        .map_err(at("kappa_hz"))?;

        let c_max = self.number("c_max")?;
        let cooperativity = if self.get("c_om") == Some("auto") {
            if !(c_max > C_MIN) {
                return Err(Error::config(self.line_of("c_max"), "c_max must exceed 1e-3"));
            }
            CooperativityMode::Auto { c_max }
        } else {
            let c = self.number("c_om")?;
            if !(c > 0.0) {
                return Err(Error::config(self.line_of("c_om"), "c_om must be positive or `auto`"));
            }
            CooperativityMode::Fixed(c)
        };
        let a_pr_norm = self.number("a_pr_in_normalized")?;
        if !(a_pr_norm > 0.0) {
            return Err(Error::config(self.line_of("a_pr_in_normalized"), "a_pr_in_normalized must be positive"));
        }
        let c_placeholder = match cooperativity {
            CooperativityMode::Fixed(c) => c,
            CooperativityMode::Auto { .. } => 1.0,
        };
        let drive = DriveConfig::new(
            c_placeholder,
            a_pr_norm * gamma_mech.sqrt(),
            hz_to_rad(self.number("delta_hz")?),
            self.number("phi_rad")?,
            self.number("eta")?,
        )
        .map_err(at("eta"))?;
        if drive.eta == 0.0 {
            return Err(Error::config(self.line_of("eta"), "eta must be positive"));
        }

        let spin = SpinParams::new(
            hz_to_rad(self.number("g_sm_hz")?),
            hz_to_rad(self.number("delta_sm_hz")?),
            self.integer("n_spins")?,
            self.integer("beta")?,
            hz_to_rad(self.number("gamma_rel_hz")?),
        )
        .map_err(at("g_sm_hz"))?;

        let siv = SivLevelParams {
            lambda_so: hz_to_rad(self.number("lambda_so_hz")?),
            gamma_l: hz_to_rad(self.number("gamma_l_hz_per_t")?),
            gamma_s: hz_to_rad(self.number("gamma_s_hz_per_t")?),
            d_sus: hz_to_rad(self.number("d_sus_hz")?),
            f_sus: hz_to_rad(self.number("f_sus_hz")?),
            ..SivLevelParams::default()
        };
        siv.check().map_err(at("gamma_s_hz_per_t"))?;
        let strain = StrainEnergies {
            e_a1g: hz_to_rad(self.number("e_a1g_hz")?),
            e_egx: hz_to_rad(self.number("e_egx_hz")?),
            e_egy: hz_to_rad(self.number("e_egy_hz")?),
        };
        let omega_s = hz_to_rad(self.number("omega_s_hz")?);
        if !(omega_s > 0.0) {
            return Err(Error::config(self.line_of("omega_s_hz"), "omega_s_hz must be positive"));
        }

        Ok(RunConfig { sys, drive, spin, siv, strain, omega_s, cooperativity, a_pr_norm })
    }

    /// Canonical text form: every key, explicit or defaulted, in a fixed
    /// order. Parsing the output resolves to the same [`RunConfig`].
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        for key in REQUIRED_KEYS {
            if let Some(v) = self.get(key) {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        for (key, default) in OPTIONAL_KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).unwrap_or(default));
        }
        out
    }
}

/// Fully interpreted configuration, in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sys: SystemParams,
    /// Drive settings. Under [`CooperativityMode::Auto`] `c_om` is a
    /// placeholder of 1 until the optimiser picks a value.
    pub drive: DriveConfig,
    pub spin: SpinParams,
    pub siv: SivLevelParams,
    pub strain: StrainEnergies,
    pub omega_s: f64,
    pub cooperativity: CooperativityMode,
    /// a_pr,in/√Γ_mech.
    pub a_pr_norm: f64,
}

impl RunConfig {
    /// Upper cooperativity bound for sweeps: c_max under `auto`, the fixed
    /// value otherwise.
    pub fn c_max(&self) -> f64 {
        match self.cooperativity {
            CooperativityMode::Auto { c_max } => c_max,
            CooperativityMode::Fixed(c) => c,
        }
    }
}

/// Reads a file, applies overrides last and resolves it.
pub fn parse_config(path: &Path, overrides: &[String]) -> Result<(RawConfig, RunConfig)> {
    let mut raw = RawConfig::from_file(path)?;
    for o in overrides {
        raw.apply_override(o)?;
    }
    let run = raw.resolve()?;
    Ok((raw, run))
}

/// The worked single-SiV example: κ/2π = 2 GHz, Γ_mech/2π = 200 kHz,
/// g_sm/2π = 2 MHz, Δ_sm/2π = 150 MHz, a_pr,in/√Γ = 20.
pub const SIV_EXAMPLE: &str = "\
kappa_hz = 2e9
gamma_mech_hz = 2e5
omega_m_hz = 6e9
g0_hz = 1.9e5
n_th = 0
g_sm_hz = 2e6
delta_sm_hz = 150e6
a_pr_in_normalized = 20
c_om = auto
eta = 1
n_spins = 1
beta = 1
";
