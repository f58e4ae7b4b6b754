//! End-to-end checks of the `slicemux` binary: exit codes, emitted files,
//! reproduction metadata, and determinism across the process boundary.
//!
//! Every run works inside a fresh temp directory with a small two-slice
//! scenario, so the whole file stays fast enough for the default test
//! pass. In-process coverage of the subcommand drivers lives next to the
//! CLI module; these tests only assert what a shell user would observe.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use slicemux::cli::read_trace_csv;
use slicemux::provision::full_isolation_baseline;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicemux"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("terminated by exit, not signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Two ergodic Markov slices, small enough that every subcommand
/// (including the stationary oracle) finishes in well under a second.
fn write_pair_config(dir: &Path) -> PathBuf {
    let path = dir.join("pair.json");
    fs::write(
        &path,
        r#"{
            "slices": [
                {"model": {"kind": "markov", "states": [0, 4, 8],
                           "transition": [[0.6, 0.3, 0.1],
                                          [0.3, 0.4, 0.3],
                                          [0.2, 0.3, 0.5]]},
                 "p_h": 0.9, "p_l": 0.5},
                {"model": {"kind": "markov", "states": [2, 6],
                           "transition": [[0.7, 0.3], [0.4, 0.6]]},
                 "p_h": 0.8, "p_l": 0.25}
            ],
            "horizon": 4000,
            "seed": 11
        }"#,
    )
    .expect("config written");
    path
}

fn meta_json(out: &Path) -> serde_json::Value {
    let mut name = out.file_name().unwrap().to_os_string();
    name.push(".meta.json");
    let text = fs::read_to_string(out.with_file_name(name)).expect("meta file exists");
    serde_json::from_str(&text).expect("meta parses")
}

#[test]
fn help_and_version_exit_clean() {
    let help = run(&["--help"]);
    assert_eq!(exit_code(&help), 0);
    let text = stdout(&help);
    for sub in ["trace", "stats", "provision", "sweep", "oracle", "bench", "validate"] {
        assert!(text.contains(sub), "help is missing `{sub}`");
    }
    assert_eq!(exit_code(&run(&["--version"])), 0);
}

#[test]
fn unknown_subcommand_exits_three() {
    let out = run(&["frobnicate"]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn missing_config_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("trace.csv");
    let out = run(&[
        "trace",
        "--config",
        "/no/such/config.json",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr(&out).contains("cannot access"));
    assert!(!out_csv.exists());
}

#[test]
fn out_of_range_target_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(
        &config,
        r#"{
            "slices": [
                {"model": {"kind": "markov", "states": [0, 4],
                           "transition": [[0.5, 0.5], [0.5, 0.5]]},
                 "p_h": 1.5, "p_l": 0.5}
            ],
            "horizon": 100,
            "seed": 1
        }"#,
    )
    .unwrap();
    let out = run(&[
        "stats",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("stats.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("outside [0, 1]"));
}

#[test]
fn traces_are_reproducible_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_pair_config(dir.path());
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let reseeded = dir.path().join("c.csv");

    for (out, seed) in [(&first, None), (&second, None), (&reseeded, Some("99"))] {
        let mut args = vec![
            "trace",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        if let Some(seed) = seed {
            args.extend(["--seed", seed]);
        }
        assert_eq!(exit_code(&run(&args)), 0);
    }

    let bytes = fs::read(&first).unwrap();
    assert_eq!(bytes, fs::read(&second).unwrap(), "same seed, same trace");
    assert_ne!(bytes, fs::read(&reseeded).unwrap(), "new seed, new trace");

    let meta = meta_json(&first);
    assert_eq!(meta["command"], "trace");
    assert_eq!(meta["seed"], 11, "scenario seed is the default");
    let digest = meta["config_sha256"].as_str().expect("digest recorded");
    assert_eq!(digest.len(), 64);
    assert_eq!(meta_json(&reseeded)["seed"], 99);
}

#[test]
fn stats_on_a_saved_trace_matches_the_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_pair_config(dir.path());
    let trace = dir.path().join("trace.csv");
    let from_file = dir.path().join("from_file.csv");
    let direct = dir.path().join("direct.csv");

    assert_eq!(
        exit_code(&run(&[
            "trace",
            "--config",
            config.to_str().unwrap(),
            "--out",
            trace.to_str().unwrap(),
        ])),
        0
    );
    assert_eq!(
        exit_code(&run(&[
            "stats",
            "--config",
            config.to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
            "--out",
            from_file.to_str().unwrap(),
        ])),
        0
    );
    assert_eq!(
        exit_code(&run(&[
            "stats",
            "--config",
            config.to_str().unwrap(),
            "--out",
            direct.to_str().unwrap(),
        ])),
        0
    );

    let text = fs::read_to_string(&from_file).unwrap();
    assert_eq!(text, fs::read_to_string(&direct).unwrap());
    assert!(text.starts_with("slice,w_l,p_m\n"));
    assert_eq!(text.lines().count(), 3, "header plus one row per slice");
    // The saved trace's digest only appears on the pass-through run.
    assert!(meta_json(&from_file)["trace_sha256"].is_string());
    assert!(meta_json(&direct)["trace_sha256"].is_null());
}

#[test]
fn provision_meets_its_targets_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_pair_config(dir.path());
    let out = dir.path().join("plan.json");
    let rerun = dir.path().join("plan2.json");

    for path in [&out, &rerun] {
        let run_out = run(&[
            "provision",
            "--config",
            config.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
            "--slack",
            "0.01",
        ]);
        assert_eq!(exit_code(&run_out), 0);
        assert!(stdout(&run_out).contains("targets met"));
    }
    assert_eq!(fs::read(&out).unwrap(), fs::read(&rerun).unwrap());

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let floors: u64 = json["plan"]["w_l"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .sum();
    let pool = json["plan"]["w_c"].as_u64().unwrap();
    assert_eq!(json["plan"]["total"].as_u64().unwrap(), floors + pool);
    for pass in json["report"]["pass"].as_array().unwrap() {
        assert_eq!(pass, &serde_json::Value::Bool(true));
    }
    assert_eq!(meta_json(&out)["slack"], 0.01);

    let negative = run(&[
        "provision",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("never.json").to_str().unwrap(),
        "--slack",
        "-0.5",
    ]);
    assert_eq!(exit_code(&negative), 3);
}

#[test]
fn sweep_endpoint_agrees_with_the_library_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_pair_config(dir.path());
    let trace_path = dir.path().join("trace.csv");
    let out = dir.path().join("surface.csv");

    assert_eq!(
        exit_code(&run(&[
            "trace",
            "--config",
            config.to_str().unwrap(),
            "--out",
            trace_path.to_str().unwrap(),
        ])),
        0
    );
    assert_eq!(
        exit_code(&run(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--trace",
            trace_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--step",
            "0.5",
        ])),
        0
    );

    // Grid per slice: 0, 0.5, then the target itself. Both axes have
    // three levels, so nine rows follow the header.
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("pl_0,pl_1,wl_0,wl_1,wc,total"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);

    // The fully isolated corner must cost exactly the dedicated floors
    // computed straight from the same trace file.
    let trace = read_trace_csv(&trace_path).expect("trace reads back");
    let dedicated = full_isolation_baseline(&trace, &[0.9, 0.8]).expect("floors exist");
    let corner: Vec<&str> = rows
        .iter()
        .filter(|row| row.starts_with("0.9,0.8,"))
        .copied()
        .collect();
    assert_eq!(corner.len(), 1);
    let total: u64 = corner[0].rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(total, dedicated);

    let svg = fs::read_to_string(out.with_extension("svg")).expect("plot written");
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<polyline"));
    assert_eq!(meta_json(&out)["step"], 0.5);
}

#[test]
fn oracle_marks_each_baseline_pool_once() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_pair_config(dir.path());
    let out = dir.path().join("oracle.csv");
    let run_out = run(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&run_out), 0);
    assert!(stdout(&run_out).contains("static threshold"));

    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("w_c,epsilon_star,is_static_threshold,is_offline_wc,is_mw_wc")
    );
    let mut marks = [0u32; 3];
    let mut last_eps = f64::NEG_INFINITY;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        let eps: f64 = fields[1].parse().unwrap();
        assert!(eps >= last_eps, "stationary slack grows with the pool");
        last_eps = eps;
        for (mark, field) in marks.iter_mut().zip(&fields[2..]) {
            *mark += field.parse::<u32>().unwrap();
        }
    }
    assert_eq!(marks, [1, 1, 1], "each baseline lands on exactly one row");
}

#[test]
fn oracle_rejects_non_markov_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("onoff.json");
    fs::write(
        &config,
        r#"{
            "slices": [
                {"model": {"kind": "onoff", "user_count": 4,
                           "active_mean_s": 2.0, "idle_mean_s": 5.0,
                           "pareto_shape": 1.5, "rate_bps": 16000.0,
                           "packet_bytes": 40, "bits_per_prb": 1000},
                 "p_h": 0.9, "p_l": 0.5}
            ],
            "horizon": 100,
            "seed": 1
        }"#,
    )
    .unwrap();
    let out = run(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("oracle.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr(&out).contains("Markov"));
}

#[test]
fn bench_writes_one_row_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    assert_eq!(
        exit_code(&run(&["bench", "--out", out.to_str().unwrap(), "--seed", "7"])),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,solves,mean_us,median_of_means_us"));
    let sizes: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(sizes, ["2", "4", "8", "16", "32", "64"]);
    let meta = meta_json(&out);
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["solves_per_point"], 10_000);
}

#[test]
fn validate_reports_all_green() {
    let out = run(&["validate", "--seed", "1"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains(", 0 failed"), "got: {text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn shipped_configs_pass_stats() {
    let dir = tempfile::tempdir().unwrap();
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["burst_pair.json", "three_slice_markov.json", "four_slice_mixed.json"] {
        let out = dir.path().join(format!("{name}.csv"));
        let run_out = run(&[
            "stats",
            "--config",
            configs.join(name).to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&run_out), 0, "{name}: {}", stderr(&run_out));
        assert!(fs::read_to_string(&out).unwrap().starts_with("slice,w_l,p_m\n"));
    }
}
