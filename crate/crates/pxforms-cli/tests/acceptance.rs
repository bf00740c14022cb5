//! CLI acceptance: determinism of reports across invocations and thread
//! counts, plus the documented exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pxforms")
}

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("spawn pxforms")
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn criterion_10_determinism() {
    // selftest --seed 7 twice, different thread counts: byte-identical stdout
    let a = run(&["--threads", "1", "selftest", "--seed", "7"]);
    let b = run(&["--threads", "4", "selftest", "--seed", "7"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(
        a.stdout, b.stdout,
        "selftest output differs across thread counts"
    );

    // every bundled config run twice, different thread counts:
    // byte-identical reports
    let dir = tempfile::tempdir().unwrap();
    for name in ["p2-square.cfg", "px-ramp-square.cfg", "p15-uhlenbeck.cfg"] {
        let cfg = workspace_root().join("configs").join(name);
        let out1 = dir.path().join(format!("{name}.r1"));
        let out2 = dir.path().join(format!("{name}.r2"));
        let r1 = run(&[
            "--threads",
            "1",
            "run",
            cfg.to_str().unwrap(),
            "--output",
            out1.to_str().unwrap(),
        ]);
        let r2 = run(&[
            "--threads",
            "4",
            "run",
            cfg.to_str().unwrap(),
            "--output",
            out2.to_str().unwrap(),
        ]);
        assert!(
            r1.status.success(),
            "{name} run 1 failed: {}",
            String::from_utf8_lossy(&r1.stderr)
        );
        assert!(
            r2.status.success(),
            "{name} run 2 failed: {}",
            String::from_utf8_lossy(&r2.stderr)
        );
        for file in [
            "report.txt",
            "config_echo.cfg",
            "u_bar.coch",
            "omega.coch",
            "u_tilde.coch",
        ] {
            assert_eq!(
                read(&out1.join(file)),
                read(&out2.join(file)),
                "{name}: {file} differs between runs"
            );
        }
    }
    println!("ACCEPTANCE 10: PASS — selftest and bundled-config reports byte-identical across invocations and thread counts");
}

#[test]
fn bundled_config_runs_end_to_end() {
    let cfg = workspace_root().join("configs/p2-square.cfg");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let r = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&r.stderr)
    );
    let report = String::from_utf8(read(&out.join("report.txt"))).unwrap();
    assert!(report.contains("converged = true"));
    assert!(report.contains("[algebra]"));
    assert!(report.contains("pass = true"));
    // timings are written separately so the report itself stays deterministic
    assert!(out.join("timings.txt").exists());
}

#[test]
fn config_with_p_one_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.cfg");
    std::fs::write(
        &cfg_path,
        "[mesh]\nsource = square:4\n\n[model]\np = 1.0\n\n[output]\ndir = out\n",
    )
    .unwrap();
    let r = run(&["run", cfg_path.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("p⁻ > 1"), "stderr: {err}");
}

#[test]
fn missing_mesh_file_leaves_no_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("missing.cfg");
    let out = dir.path().join("never");
    std::fs::write(
        &cfg_path,
        format!(
            "[mesh]\nsource = file:{}/does-not-exist.mesh\n\n[output]\ndir = {}\n",
            dir.path().display(),
            out.display()
        ),
    )
    .unwrap();
    let r = run(&["run", cfg_path.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!out.exists(), "partial outputs written on failure");
}

#[test]
fn selftest_negative_control_fails_with_witness() {
    let r = run(&["selftest", "--seed", "7", "--inject-violation"]);
    assert_eq!(r.status.code(), Some(3));
    let out = String::from_utf8_lossy(&r.stdout);
    assert!(out.contains("witness alg1"), "no witness dumped:\n{out}");
    assert!(out.contains("result = FAIL"));
}

#[test]
fn plots_tables_match_report_and_row_counts() {
    let cfg = workspace_root().join("configs/p2-square.cfg");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let r = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let p = run(&["plots", out.to_str().unwrap()]);
    assert!(p.status.success());
    // morrey table has exactly `levels` rows (bundled config: 3 levels)
    let morrey = String::from_utf8(read(&out.join("morrey.csv"))).unwrap();
    let rows: Vec<&str> = morrey.lines().collect();
    assert_eq!(rows[0], "radius,value,fitted");
    assert_eq!(rows.len() - 1, 3, "morrey rows: {rows:?}");
    // values match the report to full precision
    let report = String::from_utf8(read(&out.join("report.txt"))).unwrap();
    for row in &rows[1..] {
        let spaced = row.replace(',', " ");
        assert!(
            report.contains(&format!("point {spaced}")),
            "row {row} not found verbatim in report"
        );
    }
    // a run with diagnostics disabled yields header-only tables
    let cfg2 = dir.path().join("min.cfg");
    std::fs::write(
        &cfg2,
        "[mesh]\nsource = square:4\n\n[model]\np = 2\nf = [x1, x2]\n\n[diagnostics]\nmeyers = off\nmorrey = off\ncampanato = off\nmoduli = off\nuhlenbeck = off\n\n[output]\ndir = unused\n",
    )
    .unwrap();
    let out2 = dir.path().join("min");
    let r2 = run(&[
        "run",
        cfg2.to_str().unwrap(),
        "--output",
        out2.to_str().unwrap(),
    ]);
    assert!(
        r2.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&r2.stderr)
    );
    let p2 = run(&["plots", out2.to_str().unwrap()]);
    assert!(p2.status.success());
    let empty = String::from_utf8(read(&out2.join("morrey.csv"))).unwrap();
    assert_eq!(empty.trim(), "radius,value,fitted");
}

#[test]
fn mesh_gen_roundtrips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("disk.mesh");
    let g = run(&["mesh", "gen", "disk:8", mesh_path.to_str().unwrap()]);
    assert!(g.status.success());
    let cfg_path = dir.path().join("file.cfg");
    std::fs::write(
        &cfg_path,
        format!(
            "[mesh]\nsource = file:{}\n\n[model]\np = 2\nf = [x2, x1]\n\n[diagnostics]\nradius = 0.45\nrho0 = 0.45\nlevels = 3\n\n[output]\ndir = unused\n",
            mesh_path.display()
        ),
    )
    .unwrap();
    let out = dir.path().join("run");
    let r = run(&[
        "run",
        cfg_path.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&r.stderr)
    );
}
