//! Integration tests of the `photon-stats` binary: subcommand behavior,
//! exit codes, and output file formats.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_photon-stats"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn photon-stats")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Lines of a file with the '#' preamble stripped.
fn body_of(path: &Path) -> String {
    let raw = std::fs::read_to_string(path).unwrap();
    raw.lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn gen_ball_writes_loadable_annotated_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.json");
    let out = run(&[
        "gen", "ball", "--n", "100", "--diameter", "18.8495559", "--seed", "7", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("N = 100"));

    let raw = std::fs::read_to_string(&path).unwrap();
    assert!(raw.starts_with("# tool: photon-stats"));
    assert!(raw.contains("# master_seed: 7"));

    let config = photon_stats::geometry::load_config(&path).unwrap();
    assert_eq!(config.len(), 100);
    assert_eq!(config.seed, Some(7));
    for p in &config.positions {
        assert!(photon_stats::vec3::norm(*p) <= 18.8495559 / 2.0 + 1e-12);
    }
}

#[test]
fn gen_chain_and_invalid_axis_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    let out = run(&[
        "gen", "chain", "--n", "100", "--spacing", "1.0", "--axis", "x", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(photon_stats::geometry::load_config(&path).unwrap().len(), 100);

    // Invalid axis: exit 2 with a message naming the flag.
    let out = run(&[
        "gen", "chain", "--n", "3", "--axis", "q", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--axis"), "stderr: {}", stderr(&out));
}

#[test]
fn gen_lattice_and_missing_required_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lattice.json");
    let out = run(&[
        "gen", "lattice2d", "--counts", "3,4", "--spacings", "0.9,1.3", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let config = photon_stats::geometry::load_config(&path).unwrap();
    assert_eq!(config.len(), 12);

    // Required flag absent: exit 2 naming it.
    let out = run(&["gen", "ball", "--diameter", "4.0", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--n"));
}

#[test]
fn map_row_count_and_missing_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = dir.path().join("cloud.json");
    let out = run(&[
        "gen", "ball", "--n", "100", "--diameter", "18.8495559", "--seed", "3", "--out",
        geometry.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let map = dir.path().join("map.csv");
    let out = run(&[
        "map", "--geometry", geometry.to_str().unwrap(), "--s", "1e-6", "--res", "360x180",
        "--out", map.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let body = body_of(&map);
    let mut lines = body.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "theta,phi,S_re,S_im,S_abs2,g1_norm,g2,one_minus_exp_neg_g2");
    assert_eq!(lines.filter(|l| !l.is_empty()).count(), 64_800);

    // Missing geometry file: exit 1 (I/O).
    let out = run(&["map", "--geometry", "nope.json", "--s", "1e-6", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn map_single_emitter_g2_column_is_zero_and_orders_add_columns() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = dir.path().join("one.json");
    run(&["gen", "ball", "--n", "1", "--diameter", "1.0", "--out", geometry.to_str().unwrap()]);

    let map = dir.path().join("map.csv");
    let out = run(&[
        "map", "--geometry", geometry.to_str().unwrap(), "--s", "0.5", "--res", "36x18",
        "--orders", "2,3", "--out", map.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let body = body_of(&map);
    let mut lines = body.lines();
    let header = lines.next().unwrap();
    assert!(header.ends_with("one_minus_exp_neg_g2,gm_2,gm_3"), "header: {header}");
    for line in lines.filter(|l| !l.is_empty()) {
        let g2: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
        assert!(g2.abs() < 1e-12, "nonzero g2 in single-emitter map: {line}");
    }
}

#[test]
fn scan_runs_and_reports_points() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = dir.path().join("chain.json");
    run(&[
        "gen", "chain", "--n", "40", "--spacing", "0.3", "--axis", "x", "--out",
        geometry.to_str().unwrap(),
    ]);
    let scan = dir.path().join("scan.csv");
    let out = run(&[
        "scan", "--geometry", geometry.to_str().unwrap(), "--s", "1e-3", "--normal", "y",
        "--points", "200", "--out", scan.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let body = body_of(&scan);
    assert_eq!(body.lines().skip(1).filter(|l| !l.is_empty()).count(), 200);
}

#[test]
fn extrema_writes_annotated_json() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = dir.path().join("cloud.json");
    run(&[
        "gen", "ball", "--n", "20", "--diameter", "10.0", "--seed", "2", "--out",
        geometry.to_str().unwrap(),
    ]);
    let out_path = dir.path().join("extrema.json");
    let out = run(&[
        "extrema", "--geometry", geometry.to_str().unwrap(), "--s", "1e-4", "--which", "both",
        "--res", "90x45", "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let body = body_of(&out_path);
    let value: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(value["m"], 2);
    let results = value["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    let max = results[0]["value"].as_f64().unwrap();
    let min = results[1]["value"].as_f64().unwrap();
    assert!(max >= min);
}

#[test]
fn sweep_rejects_empty_lists_and_writes_table_with_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("table.csv");

    let out = run(&["sweep", "--s-list", "", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["sweep", "--n-list", "", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let fit_path = dir.path().join("fit.json");
    let out = run(&[
        "sweep", "--statistic", "max-g2", "--s-list", "1e-6,1e-5,1e-4", "--n-list", "10",
        "--realizations", "2", "--res", "60x30", "--seed", "5", "--fit-out",
        fit_path.to_str().unwrap(), "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let table = photon_stats::cli::read_scaling_csv(&out_path).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert_eq!(table.rows[0].n_realizations, 2);
    assert!(table.rows[0].std_error.is_some());

    let fit: serde_json::Value = serde_json::from_str(&body_of(&fit_path)).unwrap();
    let b = fit["b"].as_f64().unwrap();
    assert!(b < -1.0, "superbunching slope should be steeply negative, got {b}");
}

#[test]
fn sweep_statistic_control_axis_mismatch_is_usage_error() {
    let out = run(&[
        "sweep", "--statistic", "s2k-at-dest", "--s-list", "1e-6,1e-5", "--out", "t.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("drive-independent"));
}

#[test]
fn fit_command_reads_table_and_applies_window() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.csv");
    // y = 3 x^-2 exactly, plus one off-model point outside the fit window.
    std::fs::write(
        &table,
        "# preamble\ncontrol,mean,stderr,n_realizations\n1,3,,1\n2,0.75,,1\n4,0.1875,,1\n100,999,,1\n",
    )
    .unwrap();
    let fit_path = dir.path().join("fit.json");
    let out = run(&[
        "fit", "--input", table.to_str().unwrap(), "--window", "1,10", "--out",
        fit_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let fit: serde_json::Value = serde_json::from_str(&body_of(&fit_path)).unwrap();
    assert!((fit["a"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((fit["b"].as_f64().unwrap() + 2.0).abs() < 1e-9);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = dir.path().join("cloud.json");
    run(&[
        "gen", "ball", "--n", "8", "--diameter", "5.0", "--seed", "1", "--out",
        geometry.to_str().unwrap(),
    ]);

    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        format!(
            "geometry = {}\ns = 1e-3\nres = 36x18\nout = {}\n",
            geometry.display(),
            dir.path().join("from_config.csv").display()
        ),
    )
    .unwrap();

    // All parameters from the config file.
    let out = run(&["map", "--config", conf.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(dir.path().join("from_config.csv").exists());

    // The --out flag overrides the file value; the echoed config reflects it.
    let override_path = dir.path().join("override.csv");
    let out = run(&[
        "map", "--config", conf.to_str().unwrap(), "--out", override_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let raw = std::fs::read_to_string(&override_path).unwrap();
    assert!(raw.lines().any(|l| l.starts_with("# config:") && l.contains("override.csv")));
    assert!(raw.contains("s=1e-3"), "resolved config echoes the file-provided s");
}

#[test]
fn verify_fast_passes_and_dumps_partitions() {
    let out = run(&["verify", "--level", "fast"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("[PASS] oracle-g2"));
    assert!(text.contains("[PASS] partition-sm"));
    assert!(text.contains("[PASS] stirling"));
    assert!(text.contains("[PASS] limits"));

    let out = run(&["verify", "--dump-partitions", "4"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value.as_array().unwrap().len(), 5, "p(4) = 5 partition terms");
}

#[test]
fn rerunning_map_reproduces_the_file_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = dir.path().join("cloud.json");
    run(&[
        "gen", "ball", "--n", "12", "--diameter", "6.0", "--seed", "9", "--out",
        geometry.to_str().unwrap(),
    ]);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "2"), (&b, "1")] {
        let out = run(&[
            "map", "--geometry", geometry.to_str().unwrap(), "--s", "1e-4", "--res", "60x30",
            "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    // Same bytes apart from nothing: the version, seed, and config lines are
    // identical here, so the whole files match.
    assert_eq!(body_of(&a), body_of(&b));
}
