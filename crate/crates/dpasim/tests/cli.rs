//! End-to-end checks of the binary: exit codes, determinism, and agreement
//! between emitted tables and direct library evaluation.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;

use dpa::circuit::{derive_dpa_params, DriveCondition, FilmDevice};
use dpa::iotheory::reflection_gain;
use dpa::units::angular;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dpasim"))
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root")
}

fn kipa_config() -> PathBuf {
    workspace_root().join("configs/kipa.json")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

/// Parses a CSV emission: leading # comments, then a header, then rows.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .expect("header line")
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            l.split(',')
                .map(|c| c.parse().expect("numeric cell"))
                .collect()
        })
        .collect();
    (header, rows)
}

#[test]
fn missing_config_exits_2_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.csv");
    let output = bin()
        .args(["threshold", "--config"])
        .arg(dir.path().join("missing.json"))
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!out_path.exists(), "no partial output on config failure");
    let record: serde_json::Value =
        serde_json::from_slice(&output.stderr).expect("machine-readable error record");
    assert_eq!(record["error"], "config");
}

#[test]
fn threshold_reproduces_fixture_value() {
    let output = bin()
        .args(["threshold", "--config"])
        .arg(kipa_config())
        .output()
        .unwrap();
    let text = stdout_of(&output);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["threshold_dbm"]);
    assert!(
        (rows[0][0] - 4.22).abs() <= 0.5,
        "threshold {} dBm outside the expected band",
        rows[0][0]
    );
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let status = bin()
            .args([
                "gain-spectrum",
                "--span",
                "100e6",
                "--points",
                "101",
                "--config",
            ])
            .arg(kipa_config())
            .arg("--out")
            .arg(path)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    let text = String::from_utf8(bytes_a).unwrap();
    assert!(text.starts_with("# dpasim gain-spectrum\n"));
    let hash_line = text.lines().nth(1).unwrap();
    assert!(hash_line.starts_with("# config_sha256 = "));
    assert_eq!(hash_line.len(), "# config_sha256 = ".len() + 64);
}

#[test]
fn gain_spectrum_equals_library_evaluation() {
    let output = bin()
        .args([
            "gain-spectrum",
            "--span",
            "80e6",
            "--points",
            "41",
            "--config",
        ])
        .arg(kipa_config())
        .output()
        .unwrap();
    let (header, rows) = parse_csv(&stdout_of(&output));
    assert_eq!(header, ["freq_hz", "gain_db", "phase_rad"]);
    assert_eq!(rows.len(), 41);

    // The same operating point, straight from the library.
    let device = FilmDevice {
        l_total: 3.84e-9,
        i_star: 5.1e-3,
        omega0: angular(7.28987e9),
        z0: 50.0,
        q_internal: 1e5,
        q_coupling: None,
    };
    let drive = DriveCondition {
        i_dc: 0.834e-3,
        p_pump_dbm: -4.0,
        lambda_p_db: 26.65,
        omega_p: angular(14.381e9),
        varphi_p: 4.71238898038469,
    };
    let kappa = Complex64::new(angular(53e6), 0.0);
    let params = derive_dpa_params(&device, &drive, Some(kappa)).unwrap();
    for row in &rows {
        let gamma = reflection_gain(&params, angular(row[0]), drive.omega_p).unwrap();
        assert!((row[1] - 20.0 * gamma.norm().log10()).abs() < 1e-9);
        assert!((row[2] - gamma.arg()).abs() < 1e-9);
    }
}

#[test]
fn above_threshold_exits_3_and_reports_margin() {
    let dir = tempfile::tempdir().unwrap();
    let mut config: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(kipa_config()).unwrap()).unwrap();
    config["drive"]["p_pump_dbm"] = serde_json::json!(8.0);
    let hot = dir.path().join("hot.json");
    std::fs::write(&hot, serde_json::to_string(&config).unwrap()).unwrap();

    let output = bin()
        .args(["gain-spectrum", "--config"])
        .arg(&hot)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let record: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(record["error"], "above_threshold");
    assert!(record["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_orders_rows_by_axis_value() {
    let output = bin()
        .args([
            "sweep",
            "phase-gain",
            "--variable",
            "pump-power",
            "--values",
            "2,-10,-4",
            "--config",
        ])
        .arg(kipa_config())
        .output()
        .unwrap();
    let (header, rows) = parse_csv(&stdout_of(&output));
    assert_eq!(header[0], "p_pump_dbm");
    let axis: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(axis, [-10.0, -4.0, 2.0]);
    // Peak gain grows monotonically toward threshold.
    assert!(rows.windows(2).all(|w| w[0][1] < w[1][1]));
}

#[test]
fn quality_factor_sweep_steps_squeezing_plateau() {
    let output = bin()
        .args([
            "sweep",
            "squeeze-budget",
            "--variable",
            "q-internal",
            "--values",
            "1e4,1e5,1e6",
            "--config",
        ])
        .arg(kipa_config())
        .output()
        .unwrap();
    let (header, rows) = parse_csv(&stdout_of(&output));
    let col = header.iter().position(|h| h == "plateau_db").unwrap();
    for pair in rows.windows(2) {
        let step = pair[0][col] - pair[1][col];
        assert!(
            (step - 10.0).abs() <= 2.0,
            "plateau step {step} dB outside 10 +- 2"
        );
    }
}

#[test]
fn seeded_fit_roundtrip_recovers_coupling_and_attenuation() {
    let dir = tempfile::tempdir().unwrap();
    let spectrum = dir.path().join("spectrum.csv");
    let status = bin()
        .args([
            "gain-spectrum",
            "--span",
            "200e6",
            "--points",
            "201",
            "--config",
        ])
        .arg(kipa_config())
        .arg("--out")
        .arg(&spectrum)
        .status()
        .unwrap();
    assert!(status.success());

    let output = bin()
        .arg("fit")
        .arg(&spectrum)
        .args(["--seed", "11", "--format", "json", "--config"])
        .arg(kipa_config())
        .output()
        .unwrap();
    let result: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(result["kind"], "gain-spectrum");
    let names: Vec<String> = result["names"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let values = result["values"].as_array().unwrap();
    let kappa = values[names.iter().position(|n| n == "kappa_abs_hz").unwrap()]
        .as_f64()
        .unwrap();
    let lambda = values[names.iter().position(|n| n == "lambda_p_db").unwrap()]
        .as_f64()
        .unwrap();
    assert!((kappa - 53e6).abs() < 1e-3 * 53e6);
    assert!((lambda - 26.65).abs() < 1e-3 * 26.65);
    assert!(result["covariance"].as_array().unwrap().len() == 3);
    assert!(result["residual_rms"].as_f64().unwrap() < 1e-9);
}

#[test]
fn calibrate_recovers_conversion_from_fixture() {
    let fixture = workspace_root().join("crates/dpa/tests/fixtures/calibration.csv");
    let output = bin()
        .arg("calibrate")
        .arg(&fixture)
        .args(["--format", "json", "--config"])
        .arg(kipa_config())
        .output()
        .unwrap();
    let result: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let fw = result["z_g_t_fw_per_photon"].as_f64().unwrap();
    assert!(
        (fw - 93.2).abs() <= 1.0,
        "z g_t {fw} fW outside quoted band"
    );
}

#[test]
fn inapplicable_sweep_variable_exits_2() {
    let output = bin()
        .args([
            "sweep",
            "gain-spectrum",
            "--variable",
            "temperature",
            "--values",
            "0.1,0.2",
            "--config",
        ])
        .arg(kipa_config())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let record: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(record["error"], "config");
}

#[test]
fn formats_agree_on_values() {
    let csv = bin()
        .args(["noise-budget", "--config"])
        .arg(kipa_config())
        .output()
        .unwrap();
    let (header, rows) = parse_csv(&stdout_of(&csv));
    let json = bin()
        .args(["noise-budget", "--format", "json", "--config"])
        .arg(kipa_config())
        .output()
        .unwrap();
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&json)).unwrap();
    let columns: Vec<String> = value["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(columns, header);
    let json_row = value["rows"][0].as_array().unwrap();
    for (i, cell) in json_row.iter().enumerate() {
        let x = cell.as_f64().unwrap();
        let rel = (rows[0][i] - x).abs() / x.abs().max(1e-300);
        assert!(rel < 1e-11, "column {} differs between formats", header[i]);
    }
}
