use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn siv_conf() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/siv.conf")
}

fn omit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omit")).current_dir(dir).args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Parses a numeric CSV into (header, rows); empty cells become NaN and a
/// trailing text column is dropped.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect::<Vec<f64>>()).collect();
    (header, rows)
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (header, rows) = parse_csv(text);
    let idx = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[idx]).collect()
}

#[test]
fn fig2_reproduces_the_siv_measurement_time() {
    let dir = TempDir::new().unwrap();
    let conf = siv_conf();
    let out = omit(dir.path(), &["fig2", "--config", conf.to_str().unwrap(), "--out", "fig2.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = read(&dir.path().join("fig2.csv"));
    let chi = column(&csv, "chi_over_gamma");
    let tau = column(&csv, "tau_seconds");
    assert_eq!(chi.len(), 60);
    let nearest = (0..chi.len())
        .min_by(|&a, &b| (chi[a].ln() - 0.135f64.ln()).abs().total_cmp(&(chi[b].ln() - 0.135f64.ln()).abs()))
        .unwrap();
    assert!((tau[nearest] / 3.31e-6 - 1.0).abs() < 0.05, "tau = {:e} at chi = {}", tau[nearest], chi[nearest]);

    assert!(dir.path().join("fig2.csv.meta").exists());
    let gp = read(&dir.path().join("fig2.csv.gp"));
    assert!(gp.contains("plot 'fig2.csv'"));
}

#[test]
fn fig_s5_reaches_the_strain_coupling_ceiling() {
    let dir = TempDir::new().unwrap();
    let out = omit(dir.path(), &["figS5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir.path().join("figS5.csv"));
    let g = column(&csv, "g_sm_hz");
    assert_eq!(g.len(), 200);
    let max = g.iter().cloned().fold(f64::NAN, f64::max);
    assert!((max / 8e6 - 1.0).abs() < 0.15, "max g_sm = {max:e}");
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    for (jobs, name) in [("1", "a.csv"), ("4", "b.csv")] {
        let out = omit(dir.path(), &["figS1", "--points", "12", "--jobs", jobs, "--out", name]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = read(&dir.path().join("a.csv"));
    assert_eq!(a, read(&dir.path().join("b.csv")));
    // Three stacked n_th blocks.
    assert_eq!(a.lines().count(), 1 + 3 * 12);
    assert!(a.starts_with("n_th,chi_over_gamma,"));
}

#[test]
fn meta_sidecar_alone_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let first = omit(
        dir.path(),
        &[
            "figS2",
            "--points",
            "9",
            "--tolerance",
            "1e-9",
            "--set",
            "a_pr_in_normalized=5",
            "--set",
            "n_th=0.5",
            "--out",
            "first.csv",
        ],
    );
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let meta = read(&dir.path().join("first.csv.meta"));
    assert!(meta.contains("#! points = 9"));
    assert!(meta.contains(&format!("#! version = {}", env!("CARGO_PKG_VERSION"))));
    assert!(meta.contains("a_pr_in_normalized = 5"));

    let again = omit(dir.path(), &["figS2", "--config", "first.csv.meta", "--out", "second.csv"]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
    assert_eq!(read(&dir.path().join("first.csv")), read(&dir.path().join("second.csv")));
    assert_eq!(meta, read(&dir.path().join("second.csv.meta")));
}

#[test]
fn config_errors_exit_1_with_line_numbers() {
    let dir = TempDir::new().unwrap();
    let good = read(&siv_conf());

    let unknown = dir.path().join("unknown.conf");
    std::fs::write(&unknown, format!("kappa_hz = 2e9\n\nkapa_hz = 3\n{good}")).unwrap();
    let out = omit(dir.path(), &["fig3", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("kapa_hz"), "{err}");

    let bad_value = dir.path().join("bad.conf");
    std::fs::write(&bad_value, good.replace("n_spins = 1", "n_spins = one")).unwrap();
    let out = omit(dir.path(), &["fig3", "--config", bad_value.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 16"));

    let missing = dir.path().join("missing.conf");
    std::fs::write(&missing, good.replace("\neta = 1", "\n")).unwrap();
    let out = omit(dir.path(), &["fig3", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta"));

    let out = omit(dir.path(), &["fig3", "--set", "nonsense=1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = omit(dir.path(), &["fig3", "--out", "no/such/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let out = omit(dir.path(), &["fig3", "--points", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn duplicate_keys_warn_and_last_wins() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("dup.conf");
    std::fs::write(&conf, format!("{}n_th = 2\n", read(&siv_conf()))).unwrap();
    let out = omit(dir.path(), &["report", "--config", conf.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate key `n_th`"));
    assert!(read(&dir.path().join("report.csv.meta")).contains("n_th = 2"));
}

#[test]
fn failed_points_exit_2_with_partial_output() {
    let dir = TempDir::new().unwrap();
    // A very weak probe never reaches SNR = 1 at small χ but does at large χ.
    let out = omit(dir.path(), &["fig2", "--points", "7", "--set", "a_pr_in_normalized=1e-4"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir.path().join("fig2.csv"));
    let tau = column(&csv, "tau_gamma");
    assert_eq!(tau.len(), 7);
    assert!(tau[0].is_nan() && tau[6].is_finite());
    assert!(csv.lines().nth(1).unwrap().contains("SNR"));
}

#[test]
fn report_lists_the_siv_budget() {
    let dir = TempDir::new().unwrap();
    let out = omit(dir.path(), &["report"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir.path().join("report.csv"));
    let value = |key: &str| -> f64 {
        let line = csv.lines().find(|l| l.starts_with(&format!("{key},"))).unwrap();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    assert!((value("tau_meas_s") / 3.3e-6 - 1.0).abs() < 0.01);
    assert!((value("n_mech_tau") / 137.0 - 1.0).abs() < 0.01);
    assert!(value("qnd_ratio") > 1e3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("tau_purcell_s"));
}

#[test]
fn oracle_check_passes_for_the_siv_device() {
    let dir = TempDir::new().unwrap();
    for extra in [&[][..], &["--set", "n_th=2", "--set", "c_om=4"][..]] {
        let mut args = vec!["oracle-check"];
        args.extend_from_slice(extra);
        let out = omit(dir.path(), &args);
        let table = String::from_utf8_lossy(&out.stdout);
        assert!(out.status.success(), "{table}{}", String::from_utf8_lossy(&out.stderr));
        assert!(table.contains("snr_vs_oracle") && !table.contains("FAIL"));
    }
}

#[test]
fn oracle_check_fails_where_the_large_kappa_limit_breaks() {
    let dir = TempDir::new().unwrap();
    // κ barely above Γ(1 + C): the closed forms no longer describe the device.
    let out = omit(dir.path(), &["oracle-check", "--set", "kappa_hz=4e6", "--set", "c_om=10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn snr_trace_crosses_one_at_the_measurement_time() {
    let dir = TempDir::new().unwrap();
    let out = omit(dir.path(), &["snr-trace", "--points", "41"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir.path().join("snr-trace.csv"));
    let snr = column(&csv, "snr");
    assert_eq!(snr.len(), 41);
    // The grid is centred on the measurement time.
    assert!((snr[20] - 1.0).abs() < 1e-6, "{}", snr[20]);
}

#[test]
fn fig3_has_the_sensing_columns() {
    let dir = TempDir::new().unwrap();
    let out = omit(dir.path(), &["fig3", "--points", "10"]);
    assert!(out.status.success());
    let csv = read(&dir.path().join("fig3.csv"));
    assert!(csv.starts_with("eta,n_add_omit,n_add_sql,n_add_bae_inf\n"));
    let eta = column(&csv, "eta");
    assert_eq!(eta.len(), 10);
    assert!((eta[9] - 1.0).abs() < 1e-15 && eta[0] > 0.0);
    assert!(column(&csv, "n_add_omit")[9].abs() < 1e-12);
}
