use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_theta-torsion"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn summary(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    v["summary"].clone()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn counts_two_torsion_on_a_random_surface() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("count.csv");
    let out = run(&["count-torsion", "--g", "2", "--n", "2", "--seed", "7", "--x", "0", "--csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&out);
    assert_eq!(s["count"], 6);
    assert_eq!(s["bound"], 7);
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["p", "q", "magnitude", "margin", "hit", "indeterminate"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 16);
    assert_eq!(rows.iter().filter(|r| &r[4] == "true").count(), 6);
}

#[test]
fn expected_count_mismatch_exits_one() {
    let out = run(&["count-torsion", "--g", "2", "--n", "2", "--seed", "7", "--expect", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn equality_case_reaches_the_bound() {
    let out = run(&["verify-bound", "--product", "i,2i", "--n", "3", "--equality"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&out);
    assert_eq!(s["count"], 17);
    assert_eq!(s["bound"], 17);
}

#[test]
fn equality_needs_a_product() {
    let out = run(&["verify-bound", "--g", "2", "--seed", "1", "--n", "3", "--equality"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chow_report_passes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chow.csv");
    let out = run(&["chow-report", "--amax", "5", "--gmax", "6", "--csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["failed"], 0);
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["identity", "params", "expected", "computed", "pass"]
    );
    assert!(reader.records().all(|r| &r.unwrap()[4] == "true"));
}

#[test]
fn saved_job_replays_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let job = dir.path().join("job.json");
    let out = run(&[
        "count-torsion", "--product", "0.5+1.5i,i", "--n", "3", "--x", "0.1+0.2i,0.3",
        "--csv", path_str(&first), "--save-job", path_str(&job), "--rel-tol", "1e-7",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // The saved job names the first artifact; rewrite it to a fresh path.
    let mut saved: Value = serde_json::from_slice(&std::fs::read(&job).unwrap()).unwrap();
    assert_eq!(saved["command"], "count-torsion");
    assert_eq!(saved["config"]["rel_tol"], 1e-7);
    saved["parameters"]["csv"] = Value::String(path_str(&second).into());
    std::fs::write(&job, serde_json::to_vec(&saved).unwrap()).unwrap();

    let replay = run(&["run", "--config", path_str(&job)]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(replay.stdout, out.stdout);
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("sweep{i}.csv"))).collect();
    for (i, p) in paths.iter().enumerate() {
        let workers = if i == 0 { "1" } else { "3" };
        let out = bin()
            .args(["sweep", "--seeds", "4", "--n", "2,3", "--csv", path_str(p)])
            .env("THETA_TORSION_WORKERS", workers)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 9);
}

#[test]
fn configuration_errors_exit_two_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"command": "count-torsion", "parameters": {"n": "two"}}"#).unwrap();
    assert_eq!(run(&["run", "--config", path_str(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["run", "--config", path_str(&dir.path().join("missing.json"))]).status.code(), Some(2));

    let csv = dir.path().join("never.csv");
    let out = run(&["count-torsion", "--g", "2", "--seed", "1", "--n", "2", "--rel-tol", "-1", "--csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!csv.exists());

    let out = run(&["kempf-corank", "--g", "3", "--seed", "1", "--csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!csv.exists());

    assert_eq!(run(&["count-torsion", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn kempf_batch_writes_one_row_per_job() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("batch.json");
    let csv = dir.path().join("kempf.csv");
    let curve = r#"{"g": 1, "omega": [[{"re": 0.5, "im": 1.5}]]}"#;
    let surface = r#"{"g": 2, "omega": [[{"re": 0, "im": 1}, {"re": 0, "im": 0}], [{"re": 0, "im": 0}, {"re": 0, "im": 2}]]}"#;
    let jobs = format!(
        r#"[
        {{"a": 1, "b": 2, "x": {{"p": ["0"]}}, "y": {{"extra": [{{"re": 0.3, "im": 0.2}}]}}, "omega": {curve}}},
        {{"a": 2, "b": 1, "x": {{"p": ["0"]}}, "y": {{"p": ["1/2"], "q": ["1/2"]}}, "omega": {curve}}},
        {{"a": 1, "b": 1, "x": {{"p": ["0", "0"]}}, "y": {{"p": ["1/2", "0"], "q": ["1/2", "1/2"]}}, "omega": {surface}}}
    ]"#
    );
    std::fs::write(&batch, jobs).unwrap();
    let out = run(&["kempf-corank", "--batch", path_str(&batch), "--csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "job");
    let corank_col = headers.iter().position(|h| h == "corank").unwrap();
    let count_col = headers.iter().position(|h| h == "torsion_count").unwrap();
    let match_col = headers.iter().position(|h| h == "match").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(&r[corank_col], &r[count_col]);
        assert_eq!(&r[match_col], "true");
    }
    assert_eq!(&rows[0][corank_col], "0");
}

#[test]
fn scan_reports_the_predicted_locus() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let out = run(&["scan-singular", "--a", "1", "--b", "2", "--grid", "2", "--csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["points"], 13);
    assert_eq!(s["singular"], 9);
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["y_re", "y_im", "predicted", "corank", "torsion_count"]
    );
}
