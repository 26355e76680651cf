use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn shadowmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowmatch"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn run_prints_weight_and_edges() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "graph.txt", "1 2 1\n2 3 10\n3 4 1\n");
    let o = shadowmatch(&["run", "--algo", "shadow", "--k", "1.717", &g]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "weight 10\nedges 1\n2 3 10\n");
}

#[test]
fn k_at_most_one_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "graph.txt", "1 2 1\n");
    let o = shadowmatch(&["run", "--algo", "shadow", "--k", "0.9", &g]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k"));
}

#[test]
fn baseline_run() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "graph.txt", "1 2 3\n2 3 6\n");
    let o = shadowmatch(&["run", "--algo", "baseline", "--gamma", "1.0", &g]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "weight 3\nedges 1\n1 2 3\n");
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let loop_edge = file(&dir, "loop.txt", "1 2 1\n4 4 1.0\n");
    let o = shadowmatch(&["run", &loop_edge]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let dup = file(&dir, "dup.txt", "1 2 5\n2 1 6\n");
    assert_eq!(shadowmatch(&["run", &dup]).status.code(), Some(2));
    let skipped = shadowmatch(&["run", "--skip-duplicates", &dup]);
    assert_eq!(skipped.status.code(), Some(0));
    assert_eq!(stdout(&skipped), "weight 5\nedges 1\n1 2 5\n");

    let missing = dir.path().join("missing.txt");
    assert_eq!(shadowmatch(&["run", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_and_help_exit_codes() {
    assert_eq!(shadowmatch(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(shadowmatch(&["run", "--algo", "greedy"]).status.code(), Some(1));
    assert_eq!(shadowmatch(&["--help"]).status.code(), Some(0));
    assert_eq!(shadowmatch(&["--version"]).status.code(), Some(0));
}

#[test]
fn trace_and_verify() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "graph.txt", "1 2 1\n2 3 10\n3 4 1\n");
    let trace = dir.path().join("trace.jsonl");
    let o = shadowmatch(&["run", "--verify", "--trace", trace.to_str().unwrap(), &g]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("verified 2 insertions, 0 failures\n"));
    let text = std::fs::read_to_string(&trace).unwrap();
    let records = shadow_matching::trace::read_trace(&text).unwrap();
    assert_eq!(records.len(), 3);
    assert!(records[2].verifier.is_none());
    assert!(records[1].verifier.as_ref().unwrap().feasible);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["index", "input", "S", "candidates", "decision"] {
        assert!(first.get(key).is_some(), "{key}");
    }
    assert!(first["decision"].get("A").is_some());
}

#[test]
fn baseline_rejects_trace() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "graph.txt", "1 2 1\n");
    assert_eq!(
        shadowmatch(&["run", "--algo", "baseline", "--verify", &g])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn compare_reports_the_optimum() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "path.txt", "p 4 3\n1 2 1\n2 3 5\n3 4 1\n");
    let o = shadowmatch(&["compare", "--format", "csv", &g]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[5], "5");
    }
}

#[test]
fn compare_per_order_rows() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "four.txt", "1 2 1\n2 3 3\n3 4 1\n4 5 2\n");
    let o = shadowmatch(&["compare", "--orders", "24", "--format", "csv", &g]);
    assert_eq!(stdout(&o).lines().count(), 1 + 24 * 3);
    let all = shadowmatch(&["compare", "--all-orders", "--format", "csv", &g]);
    let text = stdout(&all);
    assert_eq!(text.lines().count(), 1 + 24 * 3);
    let seeds: std::collections::BTreeSet<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(seeds.len(), 24);
}

#[test]
fn compare_on_empty_graph() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "empty.txt", "");
    let o = shadowmatch(&["compare", "--format", "json", &g]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(r["final_weight"], 0.0);
        assert_eq!(r["ratio"], 1.0);
    }
    assert_eq!(v["aggregates"].as_array().unwrap().len(), 3);
}

#[test]
fn compare_without_oracle_leaves_ratio_empty() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "path.txt", "1 2 1\n2 3 5\n");
    let o = shadowmatch(&["compare", "--no-oracle", "--format", "csv", &g]);
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",,,"));
    let limited = shadowmatch(&["compare", "--oracle-limit", "1", "--format", "csv", &g]);
    assert_eq!(limited.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&limited.stderr).contains("oracle limit"));
}

#[test]
fn table_output_has_mean_ratios() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "path.txt", "1 2 1\n2 3 5\n3 4 1\n");
    let text = stdout(&shadowmatch(&["compare", "--orders", "3", &g]));
    assert!(text.contains("mean"));
    assert_eq!(text.matches("baseline").count(), 3 * 2 + 2);
}

#[test]
fn gen_writes_streams() {
    let text = stdout(&shadowmatch(&[
        "gen",
        "--kind",
        "path",
        "--n",
        "4",
        "--weights",
        "list:1,5,1",
    ]));
    assert!(text.starts_with("p 4 3\n"));
    assert_eq!(text.lines().count(), 4);

    let chain = stdout(&shadowmatch(&[
        "gen",
        "--kind",
        "geometric-chain",
        "--n",
        "6",
        "--q",
        "2",
    ]));
    let weights: Vec<&str> = chain.lines().skip(1).map(|l| l.split(' ').nth(2).unwrap()).collect();
    assert_eq!(weights, ["1", "2", "4", "8", "16"]);

    let a = shadowmatch(&["gen", "--kind", "gnp", "--n", "8", "--p", "0.5", "--seed", "7"]);
    let b = shadowmatch(&["gen", "--kind", "gnp", "--n", "8", "--p", "0.5", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);

    assert_eq!(
        shadowmatch(&["gen", "--kind", "cycle", "--n", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        shadowmatch(&["gen", "--kind", "gnp", "--weights", "zipf:2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn generated_file_feeds_run() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("gadget.txt");
    let g = out.to_str().unwrap();
    assert_eq!(
        shadowmatch(&["gen", "--kind", "shadow-gadget", "-o", g]).status.code(),
        Some(0)
    );
    let o = shadowmatch(&["run", "--k", "1.5", "--verify", g]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 failures"));
}

#[test]
fn bound_table_and_single_value() {
    let text = stdout(&shadowmatch(&["bound"]));
    assert!(text
        .lines()
        .any(|l| l.trim_start().starts_with("2.000") && l.contains("5.750000")));
    let min = text.lines().last().unwrap();
    assert!(min.contains("k* = 1.717"), "{min}");
    assert!(min.contains("bound* = 5.585"), "{min}");
    assert_eq!(
        stdout(&shadowmatch(&["bound", "--k", "1.5"])),
        "k = 1.500000  ratio = 5.777778\n"
    );
    assert_eq!(shadowmatch(&["bound", "--k", "1"]).status.code(), Some(1));
}
