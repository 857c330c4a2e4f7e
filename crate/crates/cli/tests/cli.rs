use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_circle-rds");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cfg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn circle_rds(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("CIRCLE_RDS_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn in_process(args: &[&str]) -> i32 {
    circle_rds_cli::run(std::iter::once("circle-rds").chain(args.iter().copied()))
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.json");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let mut lines = text.lines().map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>());
    let header = lines.next().unwrap();
    (header, lines.collect())
}

#[test]
fn theorem_a_csv_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = in_process(&["theorem-a", &cfg("standard_pair.json"), "--trials", "40", "--out-dir", out]);
    assert_eq!(code, 0);
    let root = dir.path().join("theorem-a");

    let (header, rows) = read_csv(&root.join("theorem_a.csv"));
    assert_eq!(header, ["n", "trials", "successes", "rate", "wilson_lo", "wilson_hi"]);
    assert_eq!(rows.len(), 12);
    for r in &rows {
        let (s, t): (usize, usize) = (r[2].parse().unwrap(), r[1].parse().unwrap());
        let rate: f64 = r[3].parse().unwrap();
        assert_eq!(t, 40);
        assert_eq!(rate, s as f64 / t as f64);
        // 17 significant digits in scientific notation
        assert_eq!(r[3].split('e').next().unwrap().replace('.', "").len(), 17, "{}", r[3]);
    }

    let (header, trials) = read_csv(&root.join("theorem_a_trials.csv"));
    assert_eq!(header, ["n", "trial", "success", "value"]);
    assert_eq!(trials.len(), 40 * 12);
    let successes = trials.iter().filter(|r| r[2] == "1").count();
    let certs: serde_json::Value = serde_json::from_slice(&fs::read(root.join("certificates.json")).unwrap()).unwrap();
    assert_eq!(certs.as_array().unwrap().len(), successes);
    assert!(certs.as_array().unwrap().iter().all(|c| c["verified"] == true));
}

#[test]
fn manifest_lists_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(in_process(&["inclusion", &cfg("standard_pair.json"), "--trials", "30", "--out-dir", out]), 0);
    let root = dir.path().join("inclusion");
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(root.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "inclusion");
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    let files = manifest["files"].as_array().unwrap();
    let mut listed: Vec<&str> = files.iter().map(|f| f["path"].as_str().unwrap()).collect();
    listed.sort();
    let mut on_disk: Vec<String> = fs::read_dir(&root)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    for f in files {
        let bytes = fs::read(root.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), format!("{:x}", Sha256::digest(&bytes)));
        if let Some(rows) = f["rows"].as_u64() {
            assert_eq!(bytes.iter().filter(|&&b| b == b'\n').count() as u64, rows + 1);
        }
    }
    let trials = files.iter().find(|f| f["path"] == "inclusion_trials.csv").unwrap();
    assert_eq!(trials["rows"], 30 * 12);
}

fn outputs(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_do_not_depend_on_workers() {
    let runs: Vec<_> = ["1", "8", "1"]
        .iter()
        .map(|w| {
            let dir = tempfile::tempdir().unwrap();
            let o = circle_rds(&[
                "theorem-a",
                &cfg("standard_pair.json"),
                "--trials",
                "64",
                "--workers",
                w,
                "--out-dir",
                dir.path().to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", stderr(&o));
            outputs(&dir.path().join("theorem-a"))
        })
        .collect();
    assert!(runs[0].len() >= 5);
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn eps_list_writes_one_file_set_per_eps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = in_process(&[
        "theorem-a",
        "--config",
        &cfg("standard_pair.json"),
        "--trials",
        "20",
        "--n-max",
        "30",
        "--eps",
        "0.9,0.95",
        "--out-dir",
        out,
    ]);
    assert_eq!(code, 0);
    let root = dir.path().join("theorem-a");
    for e in ["0.9", "0.95"] {
        let (_, rows) = read_csv(&root.join(format!("theorem_a_eps{e}.csv")));
        assert_eq!(rows.len(), 6);
        assert!(root.join(format!("certificates_eps{e}.json")).exists());
    }
    let effective: serde_json::Value = serde_json::from_slice(&fs::read(root.join("config.json")).unwrap()).unwrap();
    assert_eq!(effective["experiment"]["trials"], 20);
    assert_eq!(effective["experiment"]["eps"], serde_json::json!(["0.9", "0.95"]));
}

#[test]
fn moment_prints_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = circle_rds(&[
        "run",
        "moment",
        &cfg("diag2_symmetric.json"),
        "--delta",
        "1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "4.0");
}

#[test]
fn relator_of_two_rotations_is_the_commutator() {
    let dir = tempfile::tempdir().unwrap();
    let o = circle_rds(&["run", "relator", &cfg("rotations.json"), "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "f g f^-1 g^-1");
    let o = circle_rds(&["relator", &cfg("standard_pair.json"), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "no relator up to length 8");
}

#[test]
fn validate_reports_diagnostics() {
    let o = circle_rds(&["validate", &cfg("standard_pair.json")]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("valid "));

    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        r#"{"measures": {"measure_1": {"atoms": [
            {"map": {"type": "rotation", "angle": "0.1"}, "weight": "0.5"},
            {"map": {"type": "moebius", "matrix": ["1", "2", "2", "4"]}, "weight": "0.4"}]}}}"#,
    );
    let o = circle_rds(&["validate", &path]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("measure_1.atoms[1]:"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let o = circle_rds(&["bogus", &cfg("standard_pair.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));

    assert_eq!(circle_rds(&["--help"]).status.code(), Some(0));
    assert_eq!(circle_rds(&["density", "/nonexistent/cfg.json"]).status.code(), Some(2));

    let path = write_config(dir.path(), r#"{"measures": {"measure_1": {"atoms": []}}, "experiment": {"trails": 3}}"#);
    let o = circle_rds(&["theorem-a", &path, "--out-dir", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trails"));

    // the cyclic pair is not proximal
    let o = circle_rds(&["independence", &cfg("cyclic_pair.json"), "--out-dir", out]);
    assert_eq!(o.status.code(), Some(2));

    let o = circle_rds(&["theorem-a", &cfg("standard_pair.json"), "--eps", "1.5", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(2));

    // 4^5000 overflows
    let o = circle_rds(&["moment", &cfg("diag2_symmetric.json"), "--delta", "5000", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(dir.path().join("moment/manifest.json").exists());
}

#[test]
fn out_dir_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let run = |flag: Option<&Path>| {
        let mut c = Command::new(BIN);
        c.args(["moment", &cfg("diag2_symmetric.json")]).env("CIRCLE_RDS_OUT", env_dir.path());
        if let Some(f) = flag {
            c.arg("--out-dir").arg(f);
        }
        assert!(c.output().unwrap().status.success());
    };
    run(None);
    assert!(env_dir.path().join("moment/manifest.json").exists());
    run(Some(flag_dir.path()));
    assert!(flag_dir.path().join("moment/manifest.json").exists());
}

#[test]
fn pingpong_check_on_explicit_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let pair = |v_g: &str| {
        format!(
            r#"{{"measures": {{"measure_1": {{"atoms": [{{"map": {{"type": "rotation", "angle": "0"}}, "weight": "1"}}]}}}},
            "experiment": {{"pair": {{
                "f": {{"type": "moebius", "matrix": ["10", "0", "0", "0.1"]}},
                "g": {{"type": "conjugate", "map": {{"type": "moebius", "matrix": ["10", "0", "0", "0.1"]}}, "rotation": "0.25"}},
                "arcs": {{"u_f": ["0.45", "0.55"], "v_f": ["0.95", "0.05"], "u_g": ["0.7", "0.8"], "v_g": {v_g}}}}}}}}}"#
        )
    };
    let out = dir.path().join("out");
    let path = write_config(dir.path(), &pair(r#"["0.2", "0.3"]"#));
    let o = circle_rds(&["pingpong-check", &path, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("verified = true"), "{}", stdout(&o));
    let c: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("pingpong-check/certificate.json")).unwrap()).unwrap();
    assert_eq!(c["verified"], true);

    // V_g overlapping U_f
    let path = write_config(dir.path(), &pair(r#"["0.5", "0.6"]"#));
    let o = circle_rds(&["pingpong-check", &path, "--out-dir", out.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("verified = false"));
}

#[test]
fn estimator_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for cmd in ["contraction", "repulsor", "lyapunov"] {
        assert_eq!(in_process(&[cmd, &cfg("standard_pair.json"), "--trials", "50", "--out-dir", out]), 0);
    }
    for (cmd, file, rows) in [
        ("contraction", "contraction.csv", 10),
        ("repulsor", "repulsor.csv", 8),
        ("lyapunov", "estimators.csv", 1),
    ] {
        let (header, data) = read_csv(&dir.path().join(cmd).join(file));
        assert_eq!(header, ["estimator", "n", "value", "stderr", "trials", "seed"]);
        assert_eq!(data.len(), rows);
        assert!(data.iter().all(|r| r[5] == "1"));
    }
}

#[test]
fn quiet_runs_print_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = circle_rds(&["moment", &cfg("diag2_symmetric.json"), "-q", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty() && o.stderr.is_empty());
    assert!(dir.path().join("moment/estimators.csv").exists());
}
