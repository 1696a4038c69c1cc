//! End-to-end checks of the command-line surface.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qaoa-landscape"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed: stdout={} stderr={}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn gen_graph_writes_valid_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("graph.json");
    run_ok(bin().args([
        "gen-graph",
        "--ensemble",
        "rrg3",
        "--n",
        "8",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&path).unwrap();
    let graph = qaoa_landscape::problem::ProblemGraph::from_json(&text).unwrap();
    assert_eq!(graph.n, 8);
    assert_eq!(graph.edge_count(), 12);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["schema_version"], "1");
}

#[test]
fn gen_graph_rejects_infeasible_regular() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("graph.json");
    let out = bin()
        .args([
            "gen-graph",
            "--ensemble",
            "rrg3",
            "--n",
            "7",
            "--seed",
            "1",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn run_on_graph_file_emits_results_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("graph.json");
    run_ok(bin().args([
        "gen-graph",
        "--ensemble",
        "rrg3",
        "--n",
        "6",
        "--seed",
        "3",
        "--out",
        graph_path.to_str().unwrap(),
    ]));
    let results = dir.path().join("results.json");
    let csv = dir.path().join("summary.csv");
    run_ok(bin().args([
        "run",
        "--graph",
        graph_path.to_str().unwrap(),
        "--strategy",
        "greedy,tqa",
        "--p-max",
        "3",
        "--grid-resolution",
        "12",
        "--out",
        results.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]));

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("strategy,p,mean_ratio,std_ratio,n_instances"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);

    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&results).unwrap()).unwrap();
    assert_eq!(value["schema_version"], "1");
    let depths = value["instances"][0]["runs"][0]["per_depth"].as_array().unwrap();
    assert_eq!(depths.len(), 3);
    for record in depths {
        assert!(record["energy"].is_f64());
        assert!(record["ratio"].as_f64().unwrap() > 0.0);
        assert!(record["angles"].is_array());
        assert!(record["grad_norm"].is_f64());
        assert!(record["inertia"].is_object());
        assert!(record["wall_ms"].is_f64());
    }
}

#[test]
fn reruns_of_the_same_config_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("experiment.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "ensemble": {"kind": "rrg3", "n": 6, "count": 2},
            "strategies": ["greedy"],
            "p_max": 2,
            "optimizer": {"tol_grad": 1e-8, "max_iter": 1000, "grid_resolution": 12},
            "global_seed": 11
        })
        .to_string(),
    )
    .unwrap();
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    run_ok(bin().args([
        "run",
        "--config",
        config.to_str().unwrap(),
        "--csv",
        csv_a.to_str().unwrap(),
    ]));
    run_ok(
        bin()
            .args([
                "run",
                "--config",
                config.to_str().unwrap(),
                "--csv",
                csv_b.to_str().unwrap(),
            ])
            .env("RAYON_NUM_THREADS", "1"),
    );
    assert_eq!(
        std::fs::read(&csv_a).unwrap(),
        std::fs::read(&csv_b).unwrap(),
        "CSV differs between reruns / thread counts"
    );
}

#[test]
fn initgraph_exports_json_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("graph.json");
    run_ok(bin().args([
        "gen-graph",
        "--ensemble",
        "rrg3",
        "--n",
        "6",
        "--seed",
        "5",
        "--out",
        graph_path.to_str().unwrap(),
    ]));
    let json_path = dir.path().join("init.json");
    let dot_path = dir.path().join("init.dot");
    let out = run_ok(bin().args([
        "initgraph",
        "--graph",
        graph_path.to_str().unwrap(),
        "--p-max",
        "3",
        "--grid-resolution",
        "12",
        "--out",
        json_path.to_str().unwrap(),
        "--dot",
        dot_path.to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("level 1: 1 unique minima"));

    let bytes = std::fs::read(&json_path).unwrap();
    let graph = qaoa_landscape::initgraph::import_graph_json(&bytes).unwrap();
    assert!(graph.levels.contains_key(&3));
    let dot = std::fs::read_to_string(&dot_path).unwrap();
    assert!(dot.starts_with("digraph"));
}

#[test]
fn verify_passes_on_small_sizes() {
    let out = run_ok(bin().args(["verify", "--sizes", "4,6", "--cases", "6"]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS  gradient-vs-fd"));
    assert!(!stdout.contains("FAIL"));
    assert!(stdout.contains("singular transition states encountered: 0"));
}
