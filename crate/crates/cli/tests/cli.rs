//! Command-line surface tests: flag validation, config precedence, error
//! shapes, and report-file behaviour.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perfslice"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn demo_csv(dir: &Path) -> String {
    let path = dir.join("demo.csv");
    let mut rows = String::from("grp,age,y,yhat\n");
    // 60 rows, two attributes, labels tied to age with noise-free scores.
    for i in 0..60 {
        let grp = ["a", "b", "c"][i % 3];
        let age = 20 + (i * 7) % 40;
        let y = u8::from(age >= 40);
        let yhat = age as f64 / 100.0 + if i % 10 == 0 { -0.3 } else { 0.0 };
        rows.push_str(&format!("{grp},{age},{y},{yhat}\n"));
    }
    std::fs::write(&path, rows).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn missing_label_col_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = demo_csv(tmp.path());
    let out = run(&[
        "mine",
        "--input",
        &csv,
        "--score-col",
        "yhat",
        "--out-dir",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("label-col"), "stderr: {stderr}");
}

#[test]
fn json_errors_flag_emits_machine_readable_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "mine",
        "--json-errors",
        "--input",
        "/nonexistent.csv",
        "--label-col",
        "y",
        "--score-col",
        "yhat",
        "--out-dir",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value =
        serde_json::from_str(stderr.trim()).expect("stderr is one JSON object");
    assert!(parsed["error"].as_str().unwrap().contains("nonexistent"));
}

#[test]
fn config_file_supplies_schema_and_cli_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = demo_csv(tmp.path());
    let config = tmp.path().join("run.conf");
    std::fs::write(
        &config,
        "label_col = y\nscore_col = yhat\nbins = 3\nmeasure = arl\nmin_size = 5\ndepth = 2\n",
    )
    .unwrap();

    // Config alone drives the run.
    let out_dir = tmp.path().join("from_config");
    let out = run(&[
        "mine",
        "--input",
        &csv,
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["params"]["measure"], "arl");
    assert_eq!(manifest["params"]["min_size"], "5");

    // An explicit flag wins over the config value.
    let out_dir2 = tmp.path().join("override");
    let out = run(&[
        "mine",
        "--input",
        &csv,
        "--config",
        config.to_str().unwrap(),
        "--measure",
        "pr_auc",
        "--out-dir",
        out_dir2.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir2.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["params"]["measure"], "pr_auc");
}

#[test]
fn label_mapping_from_config() {
    let tmp = tempfile::tempdir().unwrap();
    let csv_path = tmp.path().join("mapped.csv");
    std::fs::write(
        &csv_path,
        "x,status,score\n1,sick,0.9\n2,healthy,0.1\n3,sick,0.8\n4,healthy,0.3\n\
         5,sick,0.7\n6,healthy,0.2\n7,sick,0.6\n8,healthy,0.4\n",
    )
    .unwrap();
    let config = tmp.path().join("map.conf");
    std::fs::write(
        &config,
        "label_col = status\nscore_col = score\nlabel_positive = sick\nmin_size = 2\ndepth = 1\n",
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "mine",
        "--input",
        csv_path.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn unpruned_run_matches_pruned_result_file() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = demo_csv(tmp.path());
    let common = [
        "--input",
        &csv,
        "--label-col",
        "y",
        "--score-col",
        "yhat",
        "--measure",
        "arl",
        "--alpha",
        "0",
        "--beta",
        "0",
        "--min-size",
        "5",
        "--depth",
        "2",
        "--top-k",
        "5",
    ];
    let pruned_dir = tmp.path().join("pruned");
    let unpruned_dir = tmp.path().join("unpruned");
    let mut args: Vec<&str> = vec!["mine"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--out-dir", pruned_dir.to_str().unwrap()]);
    assert!(run(&args).status.success());

    let mut args: Vec<&str> = vec!["mine"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--no-pruning", "--out-dir", unpruned_dir.to_str().unwrap()]);
    assert!(run(&args).status.success());

    let pruned = std::fs::read(pruned_dir.join("results.csv")).unwrap();
    let unpruned = std::fs::read(unpruned_dir.join("results.csv")).unwrap();
    assert_eq!(pruned, unpruned);
}

#[test]
fn empty_result_exits_zero_with_empty_report() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = demo_csv(tmp.path());
    let out_dir = tmp.path().join("out");
    // min-size larger than the dataset: nothing qualifies.
    let out = run(&[
        "mine",
        "--input",
        &csv,
        "--label-col",
        "y",
        "--score-col",
        "yhat",
        "--min-size",
        "1000",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1, "only the header row: {results}");
}

#[test]
fn invalid_measure_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = demo_csv(tmp.path());
    let out = run(&[
        "mine",
        "--input",
        &csv,
        "--label-col",
        "y",
        "--score-col",
        "yhat",
        "--measure",
        "brier",
        "--out-dir",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("brier"));
}

#[test]
fn dfs_order_matches_best_first() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = demo_csv(tmp.path());
    let mut outputs = Vec::new();
    for order in ["best_first", "dfs"] {
        let out_dir = tmp.path().join(order);
        let out = run(&[
            "mine",
            "--input",
            &csv,
            "--label-col",
            "y",
            "--score-col",
            "yhat",
            "--min-size",
            "5",
            "--depth",
            "2",
            "--order",
            order,
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
        outputs.push(std::fs::read(out_dir.join("results.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
