//! End-to-end smoke tests of the command-line driver: spawn the real
//! binary, parse its stdout, and check values against frozen references.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mbtorsion"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary should spawn");
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(str::to_owned)
        .collect()
}

fn field(line: &str, i: usize) -> f64 {
    line.split(',')
        .nth(i)
        .unwrap_or_else(|| panic!("field {i} missing in {line:?}"))
        .parse()
        .unwrap_or_else(|e| panic!("field {i} of {line:?}: {e}"))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

#[test]
fn oracle_prints_the_reference_product() {
    let out = run_ok(&["oracle", "--m", "2", "--epsr", "0.01", "--R", "1", "--N", "4000"]);
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "lambda,sup_u,product");
    assert!(close(field(&lines[1], 0), 0.5136454627, 1e-8));
    assert!(close(field(&lines[1], 1), 2.05261, 1e-5));
    assert!(close(field(&lines[1], 2), 1.0543138609, 1e-8));
}

#[test]
fn torsion_solves_the_reference_annulus() {
    let out = run_ok(&[
        "torsion",
        "--domain",
        "disk:r=1",
        "--obstacle",
        "disk:r=1",
        "--eps",
        "0.2",
        "--h",
        "0.05",
    ]);
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "sup_u,min_u,active_cells,cg_iterations");
    assert!(close(field(&lines[1], 0), 0.572013199865, 1e-8));
}

#[test]
fn eigen_lists_the_reflecting_disk_modes() {
    let out = run_ok(&["eigen", "--domain", "disk:r=1", "--h", "0.1", "--k", "3"]);
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "index,lambda,residual");
    assert_eq!(lines.len(), 4);
    // constant mode at zero, then the degenerate first angular pair
    assert!(field(&lines[1], 1).abs() < 1e-6);
    assert!(close(field(&lines[2], 1), 3.2766245014, 1e-5));
    assert!(close(field(&lines[3], 1), 3.2766245014, 1e-5));
}

#[test]
fn php_emits_the_deficit_table_and_fitted_constants() {
    let out = run_ok(&[
        "php",
        "--domain",
        "square:side=1",
        "--h",
        "0.0625",
        "--tgrid",
        "1:10:10",
    ]);
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "t,deficit,trace");
    assert_eq!(lines.len(), 12, "10 rows + header + comment");
    // deficits decay along the grid; traces stay above 1
    let d_first = field(&lines[1], 1);
    let d_last = field(&lines[10], 1);
    assert!(d_last < d_first && d_last > 0.0);
    assert!(field(&lines[10], 2) >= 1.0);
    assert!(lines[11].starts_with("# t1="), "{}", lines[11]);
}

#[test]
fn capacity_extrapolates_toward_the_ball_value() {
    let out = run_ok(&[
        "capacity", "--obstacle", "ball:r=1", "--box", "4", "--h", "0.1",
    ]);
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "value,method,extrapolated");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[1], "variational");
    let four_pi = 4.0 * std::f64::consts::PI;
    let raw: f64 = fields[0].parse().unwrap();
    let extrapolated: f64 = fields[2].parse().unwrap();
    assert!(raw > four_pi, "finite boxes overestimate: {raw}");
    assert!(close(extrapolated, four_pi, 0.10), "{extrapolated}");
}

#[test]
fn sweep_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let rows = dir.path().join("rows.csv");
    std::fs::write(
        &cfg,
        r#"{
            "dimension": 2,
            "domain": "disk:r=1",
            "obstacle": "disk:r=1",
            "epsilons": [1e-2, 1e-3, 1e-4, 1e-5],
            "path": "oracle",
            "oracle_n": 2000
        }"#,
    )
    .unwrap();

    let out = run_ok(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        rows.to_str().unwrap(),
    ]);
    let summary = stdout_lines(&out).pop().unwrap();
    assert!(summary.contains("4 rows (0 failures)"), "{summary}");
    let text = std::fs::read_to_string(&rows).unwrap();
    assert!(text.starts_with("epsilon,h,lambda,sup_u,product,lemma1_scaled,runtime_s,path"));

    let out = run_ok(&["verify", "theorem1", "--in", rows.to_str().unwrap(), "--m", "2"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("theorem1: PASS"));

    let out = run_ok(&["verify", "lemma1", "--in", rows.to_str().unwrap(), "--m", "2"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("lemma1: PASS"));
}

#[test]
fn verify_prop1_passes_square_and_flags_the_disconnected_control() {
    let out = run_ok(&[
        "verify",
        "prop1",
        "--domain",
        "square:side=1",
        "--h",
        "0.0625",
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("prop1: PASS"));

    let out = bin()
        .args([
            "verify",
            "prop1",
            "--domain",
            "twosquares:side=1,gap=0.5",
            "--h",
            "0.0625",
        ])
        .output()
        .unwrap();
    assert!(
        !out.status.success(),
        "the disconnected control must exit nonzero"
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("prop1: FAIL"), "{text}");
    assert!(text.contains("[FAIL] i-equilibration"), "{text}");
}

#[test]
fn bad_inputs_exit_nonzero_with_a_message() {
    let out = bin()
        .args(["oracle", "--m", "7", "--epsr", "0.01"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());

    let missing = Path::new("definitely-not-here.csv");
    let out = bin()
        .args(["verify", "theorem1", "--in", missing.to_str().unwrap(), "--m", "2"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
