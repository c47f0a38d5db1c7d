//! End-to-end checks of the binary: exit codes, CSV shape, determinism.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracsinc"))
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_and_flag() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["solve", "--what"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_2() {
    let dir = std::env::temp_dir().join("fracsinc-cli-test-cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.cfg");
    std::fs::write(&bad, "[sweep]\nunknown_knob = 3\n").unwrap();
    let out = bin()
        .args(["convergence", "--config", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown_knob"), "stderr: {err}");
    // unknown preset
    let out = bin()
        .args(["convergence", "--preset", "nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mlf_check_writes_csv_and_manifest() {
    let dir = std::env::temp_dir().join("fracsinc-cli-test-mlf");
    let _ = std::fs::remove_dir_all(&dir);
    let cfg = std::env::temp_dir().join("fracsinc-mlf.cfg");
    std::fs::write(&cfg, "[mlf]\npairs = 0.75 0.75\nsamples = 60\nradius_max = 10\n").unwrap();
    let out = bin()
        .args([
            "mlf-check",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("mlf-check.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("gamma,mu,samples,max_rel_err"));
    let row = lines.next().unwrap();
    let max_rel: f64 = row.split(',').next_back().unwrap().parse().unwrap();
    assert!(max_rel < 1e-10, "oracle disagreement {max_rel:e}");
    let manifest = std::fs::read_to_string(dir.join("mlf-check-manifest.txt")).unwrap();
    assert!(manifest.contains("config_hash"));
    assert!(manifest.contains("library_version"));
}

#[test]
fn empty_sweep_yields_empty_table() {
    let dir = std::env::temp_dir().join("fracsinc-cli-test-empty");
    let _ = std::fs::remove_dir_all(&dir);
    let cfg = std::env::temp_dir().join("fracsinc-empty.cfg");
    std::fs::write(&cfg, "[sweep]\np =\n").unwrap();
    let out = bin()
        .args([
            "convergence",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("convergence.csv")).unwrap();
    assert_eq!(
        csv.trim(),
        "p,n_q,n_hp,ndof,t,err_L2,err_Hbeta,err_spacetime,wall_ms,factorizations"
    );
}

#[test]
fn small_convergence_run_is_deterministic() {
    let cfg = std::env::temp_dir().join("fracsinc-conv.cfg");
    std::fs::write(&cfg, "[sweep]\np = 2 3\ntimes = 0.5\n").unwrap();
    let run = |dir: &std::path::Path| -> String {
        let out = bin()
            .args([
                "convergence",
                "--config",
                cfg.to_str().unwrap(),
                "--preset",
                "example71-1d-hom",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(dir.join("convergence.csv")).unwrap()
    };
    let a = run(&std::env::temp_dir().join("fracsinc-det-a"));
    let b = run(&std::env::temp_dir().join("fracsinc-det-b"));
    // identical apart from the wall_ms column
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                let cols: Vec<&str> = l.split(',').collect();
                if cols.len() == 10 {
                    format!("{}|{}", cols[..8].join(","), cols[9])
                } else {
                    l.to_string()
                }
            })
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
    // rows carry the resolved parameter set
    let row = a.lines().nth(1).unwrap();
    assert!(row.starts_with("2,24,2,9,"), "row: {row}");
}

#[test]
fn solve_prints_samples() {
    let cfg = std::env::temp_dir().join("fracsinc-solve.cfg");
    std::fs::write(&cfg, "[sweep]\np = 7\ntimes = 1.0\n").unwrap();
    let out = bin()
        .args(["solve", "--config", cfg.to_str().unwrap(), "--preset", "example71-1d-inhom"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("t,x,u"));
    // u(1, 0.5) = sin(pi/2) = 1 for the manufactured preset
    let mid = text
        .lines()
        .find(|l| l.starts_with("1.000000e0,5.000000e-1"))
        .expect("midpoint sample");
    let u: f64 = mid.split(',').next_back().unwrap().parse().unwrap();
    assert!((u - 1.0).abs() < 2e-3, "u(1, 0.5) = {u}");
}
