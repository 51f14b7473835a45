use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use zitter_cli::output::matrix_from_json;
use zitter_core::operator_core::{commutator, ComplexMatrix};

fn zitter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zitter")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn csv_columns(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn traj_csv_shape_and_positive_energy_velocity_is_real() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = zitter(&[
        "--command", "traj", "--kind", "dirac", "--mass", "3", "--momentum", "4,0,0",
        "--composition", "positive", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 513);
    let (header, rows) = csv_columns(&out);
    assert_eq!(header.len(), 14);
    assert_eq!(header.last().unwrap(), "mode");
    for name in ["im_v1", "im_v2", "im_v3"] {
        let col = header.iter().position(|h| h == name).unwrap();
        for row in &rows {
            assert!(row[col].parse::<f64>().unwrap().abs() <= 1e-12);
        }
    }
    // Positive energy: constant group velocity p/E = 0.8.
    let v1 = header.iter().position(|h| h == "re_v1").unwrap();
    assert!(rows.iter().all(|r| (r[v1].parse::<f64>().unwrap() - 0.8).abs() <= 1e-12));
    assert!(rows[0].last().unwrap().contains("kind=Dirac m=3 p=(4,0,0)"));
}

#[test]
fn traj_json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    let json_path = dir.path().join("t.json");
    let base = ["--command", "traj", "--kind", "st", "--mass", "2", "--momentum", "0.5,-1,0.25", "--samples", "32", "--composition", "mixed:0.8"];
    assert_eq!(code(&zitter(&[&base[..], &["--out", csv_path.to_str().unwrap()]].concat())), 0);
    assert_eq!(code(&zitter(&[&base[..], &["--out", json_path.to_str().unwrap(), "--format", "json"]].concat())), 0);
    let (header, rows) = csv_columns(&csv_path);
    let json = read_json(&json_path);
    for (j, name) in header.iter().enumerate().filter(|(_, h)| *h != "mode") {
        let col = json[name].as_array().unwrap_or_else(|| panic!("missing {name}"));
        assert_eq!(col.len(), 32);
        for (row, v) in rows.iter().zip(col) {
            assert_eq!(row[j].parse::<f64>().unwrap(), v.as_f64().unwrap());
        }
    }
    assert_eq!(json["mode"]["descriptor"].as_str().unwrap(), rows[0].last().unwrap());
}

#[test]
fn packet_norm_column_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("packet.csv");
    let o = zitter(&["--command", "packet", "--composition", "mixed:0.5", "--samples", "64", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_columns(&out);
    assert_eq!(header, ["t", "x_expect", "norm", "sector_purity", "mode"]);
    let norms: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(norms.iter().all(|n| (n - norms[0]).abs() <= 1e-11));
    let purity: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(purity.iter().all(|p| (p - 0.5).abs() <= 1e-12));
}

#[test]
fn fw_json_round_trips_into_matrices_meeting_the_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fw.json");
    let o = zitter(&["--command", "fw", "--kind", "dirac", "--mass", "3", "--momentum", "4,0,0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let json = read_json(&out);
    let m = |key: &str| matrix_from_json(&json[key]).unwrap();
    let (h, h_fw, t, t_inv) = (m("H"), m("H_FW"), m("T"), m("T_inv"));
    let residuals = &json["residuals"];
    assert!(residuals["hamiltonian"].as_f64().unwrap() <= 1e-11);
    assert!(residuals["velocity"].as_f64().unwrap() <= 1e-11);

    let recomputed = &(&t * &h) * &t_inv;
    assert!(recomputed.max_abs_diff(&h_fw) <= 1e-15);
    let beta_e = ComplexMatrix::diagonal(&[5.0, 5.0, -5.0, -5.0].map(|x| zitter_core::operator_core::c(x, 0.0)));
    assert!(h_fw.max_abs_diff(&beta_e) <= residuals["hamiltonian"].as_f64().unwrap() + 1e-15);
    assert!((&t * &t_inv).max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-14);
    let v_fw: Vec<ComplexMatrix> = json["v_FW"].as_array().unwrap().iter().map(|v| matrix_from_json(v).unwrap()).collect();
    assert_eq!(v_fw.len(), 3);
    for v in &v_fw {
        assert!(commutator(&h_fw, v).unwrap().max_abs() <= residuals["commutator"].as_f64().unwrap() + 1e-15);
    }
    // v_FW,1 = β p₁/E.
    let expected = beta_e.scale_re(4.0 / 25.0);
    assert!(v_fw[0].max_abs_diff(&expected) <= residuals["velocity"].as_f64().unwrap() + 1e-15);
}

#[test]
fn massless_gfv_with_n_equal_to_momentum_needs_no_transformation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fw.json");
    let o = zitter(&["--command", "fw", "--kind", "gfv", "--mass", "0", "--momentum", "3,0,4", "--gfv-n", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let t = matrix_from_json(&read_json(&out)["T"]).unwrap();
    assert_eq!(t.max_abs_diff(&ComplexMatrix::identity(2)), 0.0);
}

#[test]
fn verify_default_passes_and_tampered_tolerance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = zitter(&["--command", "verify", "--out", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = read_json(&out);
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["modes"].as_array().unwrap().len(), 16);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 15);
    for c in checks {
        assert!(c["max_residual"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }

    let o = zitter(&["--command", "verify", "--kind", "dirac", "--mass", "3", "--momentum", "4,0,0", "--tolerance", "1e-30"]);
    assert_eq!(code(&o), 1);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("verification failed:"), "{stderr}");
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn unsupported_physics_exits_with_two() {
    let massless_st = zitter(&["--command", "verify", "--kind", "st", "--mass", "0", "--momentum", "1,0,0"]);
    assert_eq!(code(&massless_st), 2);
    assert!(String::from_utf8_lossy(&massless_st.stderr).contains("cannot be carried out for a massless spin-1 particle"));
    for command in ["traj", "fw", "packet"] {
        assert_eq!(code(&zitter(&["--command", command, "--kind", "st", "--mass", "0"])), 2, "{command}");
        assert_eq!(code(&zitter(&["--command", command, "--kind", "dirac", "--mass", "0"])), 2, "{command}");
    }
}

#[test]
fn config_and_io_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&zitter(&["--kind", "dirac"])), 3);
    assert_eq!(code(&zitter(&["--command", "traj", "--mass", "abc"])), 3);
    assert_eq!(code(&zitter(&["--command", "fw", "--format", "csv"])), 3);
    assert_eq!(code(&zitter(&["--command", "traj", "--bogus"])), 3);
    assert_eq!(code(&zitter(&["--config", dir.path().join("missing.cfg").to_str().unwrap()])), 3);
    // Null charge norm: GFV mixed at one half.
    assert_eq!(code(&zitter(&["--command", "traj", "--kind", "gfv", "--momentum", "1,0,0"])), 3);
    let unwritable = dir.path().join("no/such/dir/out.csv");
    let o = zitter(&["--command", "traj", "--samples", "4", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains(unwritable.to_str().unwrap()));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let from_file = dir.path().join("file.csv");
    let from_flags = dir.path().join("flags.csv");
    std::fs::write(
        &cfg,
        format!("# trajectory run\ncommand = traj\nkind = gfv\nmass = 2\ngfv-n = 17\nmomentum = 1,0,0\ncomposition = mixed:0.75\nsamples = 8\nout = {}\n", from_file.display()),
    )
    .unwrap();
    assert_eq!(code(&zitter(&["--config", cfg.to_str().unwrap()])), 0);
    assert_eq!(code(&zitter(&["--config", cfg.to_str().unwrap(), "--samples", "16", "--out", from_flags.to_str().unwrap()])), 0);
    let (_, file_rows) = csv_columns(&from_file);
    let (_, flag_rows) = csv_columns(&from_flags);
    assert_eq!(file_rows.len(), 8);
    assert_eq!(flag_rows.len(), 16);
    assert!(flag_rows[0].last().unwrap().contains("kind=GFV m=2 p=(1,0,0) N=17"));
}

#[test]
fn identical_runs_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        ("traj", vec!["--command", "traj", "--kind", "gfv", "--mass", "1.5", "--momentum", "0.3,0.2,-0.1", "--composition", "mixed:0.3"]),
        ("fw", vec!["--command", "fw", "--kind", "st", "--mass", "3", "--momentum", "0,0,4"]),
        ("verify", vec!["--command", "verify", "--kind", "st", "--mass", "2", "--momentum", "1,1,1", "--format", "json"]),
    ] {
        let a = dir.path().join(format!("{name}-a"));
        let b = dir.path().join(format!("{name}-b"));
        for p in [&a, &b] {
            let o = zitter(&[&args[..], &["--out", p.to_str().unwrap()]].concat());
            assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{name}");
    }
}
