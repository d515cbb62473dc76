use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_strichartz"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn constants_example_prints_the_closed_form_row() {
    let o = run(&["constants", "--d", "3", "--k", "2", "--family", "wave"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row = out.lines().find(|l| l.contains("W(3,2) vs (2pi)^-7")).expect("closed-form row");
    assert!(row.starts_with("[PASS]"), "{row}");
    assert!(row.contains("2.58666937638"), "{row}");
}

#[test]
fn shells_example_prints_three_methods() {
    let o = run(&["shells", "--d", "3", "--k", "2", "--point", "1,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("closed form") && out.contains("recursion") && out.contains("monte carlo"), "{out}");
    assert!(out.contains("6.28318530717959"), "{out}");
    assert!(out.contains("shells: 2 of 2 checks passed"), "{out}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["bogus-cmd"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--d", "three"]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--family", "klein-gordon"]).status.code(), Some(2));
    assert_eq!(run(&["shells", "--point", "1,2,0"]).status.code(), Some(2));
    assert_eq!(run(&["search", "--d", "7", "--k", "5"]).status.code(), Some(2));
    assert_eq!(run(&["all", "--d", "3"]).status.code(), Some(2));
    assert_eq!(run_env(&["constants"], &[("STRICHARTZ_THREADS", "many")]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(run(&["constants", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--config", "/nonexistent/run.cfg"]).status.code(), Some(2));
}

#[test]
fn perturbed_tolerance_fails_with_one() {
    let o = run(&["constants", "--tol-scale", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL]"));
    let o = run(&["schrodinger-identity", "--tol-scale", "1e-12"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_reports_follow_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let o = run(&["shells", "--d", "2", "--k", "3", "--samples", "20000", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 10);
    for r in &rows {
        let o = r.as_object().unwrap();
        let mut keys: Vec<&str> = o.keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["case_id", "constant", "deficit", "lhs", "pass", "ratio", "rhs", "seed", "stderr", "suite"]);
        assert_eq!(o["suite"], "shells");
        assert_eq!(o["pass"], true);
    }
    assert!(rows.iter().any(|r| r["seed"].is_u64()));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# shells at a fixed point\nd = 4\nk = 3\npoint = 2, 0.3, -0.4, 0.1, 0.5\nseeds = 7, 8\nsamples = 50000\n",
    )
    .unwrap();
    let mut reports = Vec::new();
    for threads in ["1", "3", "3"] {
        let out = dir.path().join(format!("r{}.jsonl", reports.len()));
        let o = run_env(
            &["shells", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
            &[("STRICHARTZ_THREADS", threads)],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        reports.push(fs::read(&out).unwrap());
    }
    assert!(reports.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(reports.pop().unwrap()).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("I(4,3) at (2, 0.3, -0.4, 0.1, 0.5)"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "d = 5\nk = 4\nfamily = schrodinger\ncsv = true\n").unwrap();
    let o = run(&["constants", "--config", cfg.to_str().unwrap(), "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("suite,case_id,lhs,rhs,constant,ratio,deficit,stderr,seed,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2, "{out}");
    assert!(rows[0].starts_with("constants,\"S(5,2) log-gamma vs product\","), "{out}");
    assert!(rows.iter().all(|r| r.ends_with(",,true")));
}

#[test]
fn csv_report_file_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let trace = dir.path().join("trace.csv");
    let o = run(&[
        "search",
        "--restarts",
        "2",
        "--budget",
        "40",
        "--seeds",
        "3",
        "--csv",
        "--out",
        out.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{o:?}");
    let report = fs::read_to_string(&out).unwrap();
    assert!(report.starts_with("suite,case_id,"));
    assert_eq!(report.lines().count(), 1 + 2 + 2);
    assert!(report.contains("search,\"S(4,2) restart 0\","), "{report}");
    let t = fs::read_to_string(&trace).unwrap();
    assert!(t.starts_with("iterate,quotient,theta1,"), "{t}");
}
