//! End-to-end tests of the `twoatom` binary: golden scan values, exit codes,
//! determinism of emitted files.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twoatom"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut lines = text.lines();
        let header = lines.next().unwrap().split(',').map(str::to_string).collect();
        let rows = lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        Self { header, rows }
    }

    fn column(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| {
            panic!("no column '{name}' in {:?}", self.header)
        })
    }

    fn float(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.column(name)].parse().unwrap()
    }

    fn text(&self, row: usize, name: &str) -> &str {
        &self.rows[row][self.column(name)]
    }
}

#[test]
fn ratio_scan_reproduces_the_overlap_law() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scan.conf",
        "statistics = both\noverlaps = 0, 0.25, 0.5, 0.75\n",
    );
    let stdout = run_ok(bin().arg("ratio-scan").arg("--config").arg(&cfg));
    let csv = Csv::parse(&stdout);
    assert_eq!(csv.rows.len(), 8);
    let boson_expected = [1.0, 0.8, 2.0 / 3.0, 4.0 / 7.0];
    let fermion_expected = [1.0, 4.0 / 3.0, 2.0, 4.0];
    for (i, expect) in boson_expected.iter().enumerate() {
        assert_eq!(csv.text(i, "statistics"), "boson");
        assert!(
            (csv.float(i, "ratio") - expect).abs() < 1e-6,
            "boson row {i}: {} vs {expect}",
            csv.float(i, "ratio")
        );
        assert_eq!(csv.text(i, "regime"), "crossed-negligible");
    }
    for (i, expect) in fermion_expected.iter().enumerate() {
        let row = i + 4;
        assert_eq!(csv.text(row, "statistics"), "fermion");
        assert!(
            (csv.float(row, "ratio") - expect).abs() < 1e-6,
            "fermion row {row}: {} vs {expect}",
            csv.float(row, "ratio")
        );
    }
}

#[test]
fn unit_overlap_rows_are_marked_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scan.conf", "statistics = both\noverlaps = 0.5, 1\n");
    let stdout = run_ok(bin().arg("ratio-scan").arg("--config").arg(&cfg));
    let csv = Csv::parse(&stdout);
    assert_eq!(csv.rows.len(), 4);
    // boson unit-overlap row routes through the equal-state superposition
    assert_eq!(csv.text(1, "status"), "equal-state");
    assert!((csv.float(1, "ratio") - 1.0).abs() < 1e-10);
    // fermion unit-overlap row is a Pauli marker with empty numerics
    assert_eq!(csv.text(3, "status"), "pauli-violation");
    assert_eq!(csv.text(3, "ratio"), "");
    assert_eq!(csv.text(3, "p_two"), "");
}

#[test]
fn ratio_scan_json_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scan.conf", "statistics = boson\noverlaps = 0.5\n");
    let stdout = run_ok(bin().arg("ratio-scan").arg("--config").arg(&cfg).args(["--format", "json"]));
    let rows: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let row = &rows.as_array().unwrap()[0];
    assert_eq!(row["statistics"], "boson");
    assert!((row["ratio"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn oracle_check_passes_for_any_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "oracle.conf",
        "n_points = 32\nx_min = -16\nx_max = 16\ninstances = 3\n",
    );
    let default_seed = run_ok(bin().arg("oracle-check").arg("--config").arg(&cfg));
    assert!(default_seed.contains("overall: PASS"));
    let other_seed =
        run_ok(bin().arg("oracle-check").arg("--config").arg(&cfg).args(["--seed", "99"]));
    assert!(other_seed.contains("overall: PASS"));
    // different seed, different instances
    assert_ne!(default_seed, other_seed);
}

#[test]
fn oracle_check_rejects_oversized_grids() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "oracle.conf", "n_points = 256\n");
    let out = bin().arg("oracle-check").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("TooLarge"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scan.conf", "sigma = 2.0\nnot_a_key = 1\n");
    let out = bin().arg("ratio-scan").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not_a_key"));
}

#[test]
fn invalid_parameter_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    // theta outside [0, pi/2]
    let cfg = write_config(dir.path(), "scan.conf", "theta = 3.0\n");
    let out = bin().arg("ratio-scan").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn experiment_is_deterministic_and_routes_zero_delay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.conf",
        "statistics = boson\nshots = 20000\ndelay_points = 6\ndelay_max = 8e-6\nseed = 11\n",
    );
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    run_ok(bin().arg("experiment").arg("--config").arg(&cfg).arg("--out").arg(&out_a));
    run_ok(bin().arg("experiment").arg("--config").arg(&cfg).arg("--out").arg(&out_b));
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same config and seed must be byte-identical");

    let csv = Csv::parse(std::str::from_utf8(&bytes_a).unwrap());
    assert_eq!(csv.text(0, "status"), "equal-state");
    for i in 1..csv.rows.len() {
        assert!(csv.float(i, "overlap_sq") <= csv.float(i - 1, "overlap_sq") + 1e-12);
    }

    // a different seed changes the detected counts
    let out_c = dir.path().join("c.csv");
    run_ok(
        bin()
            .arg("experiment")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out_c)
            .args(["--seed", "12"]),
    );
    assert_ne!(bytes_a, std::fs::read(&out_c).unwrap());
}

#[test]
fn thermal_scan_wavelengths_and_limits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "thermal.conf",
        "temperatures = 1e-6, 2e-6, 4e-6, 1e-3\nspacing = 5e-7\n",
    );
    let stdout = run_ok(bin().arg("thermal").arg("--config").arg(&cfg));
    let csv = Csv::parse(&stdout);
    // Rb-87 at 1 uK
    let lambda = csv.float(0, "lambda_t");
    assert!((lambda - 1.87269e-7).abs() / 1.87269e-7 < 5e-3);
    // doubling T scales lambda by 1/sqrt(2)
    for i in 0..2 {
        let ratio = csv.float(i + 1, "lambda_t") / csv.float(i, "lambda_t");
        assert!((ratio - 0.5f64.sqrt()).abs() < 1e-12);
    }
    // hot tail: both ratios at 1
    let last = csv.rows.len() - 1;
    assert!((csv.float(last, "ratio_boson") - 1.0).abs() < 1e-6);
    assert!((csv.float(last, "ratio_fermion") - 1.0).abs() < 1e-6);
    // cold rows obey the sign law
    assert!(csv.float(0, "ratio_boson") <= 1.0);
    assert!(csv.float(0, "ratio_fermion") >= 1.0);
}

#[test]
fn amplitude_dump_is_consistent_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "amp.conf",
        "statistics = fermion\ncenter_phi = -1\ncenter_psi = 1\ntheta = 0.6\n",
    );
    let stdout = run_ok(bin().arg("amplitude").arg("--config").arg(&cfg));
    let dump: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(dump["statistics"], "fermion");
    let result = &dump["result"];
    let m_total = result["m_total"].as_array().unwrap();
    let p_two = result["p_two"].as_f64().unwrap();
    let modulus_sq = m_total[0].as_f64().unwrap().powi(2) + m_total[1].as_f64().unwrap().powi(2);
    assert!((p_two - modulus_sq).abs() < 1e-12);
    let x = result["overlap_sq"].as_f64().unwrap();
    assert!((x - (-1.0f64).exp()).abs() < 1e-9);
}

#[test]
fn amplitude_pauli_violation_is_a_physics_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "amp.conf",
        "statistics = fermion\ncenter_phi = 0\ncenter_psi = 0\n",
    );
    let out = bin().arg("amplitude").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(exit_code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PauliViolation"));
}
