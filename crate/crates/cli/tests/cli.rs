use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hptree::export::json::from_json_value;
use hptree::synthetic::depth_family;
use hptree::{Activity, HierLog, HierTrace, Tree};
use hptree_cli::bench::{self, BenchConfig, Suite};

const EXPECTED_MODEL: &str = r#"sub:"Main.main()"(seq("Main.input()", sub:"B.process()"(xor("A.process()", seq("B.stepPre()", rec:"B.process()", "B.stepPost()"))), "Main.output()"))"#;

fn running_example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/running_example.xes")
}

fn hptree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hptree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn discover(extra: &[&str]) -> Output {
    let input = running_example();
    let mut args = vec![
        "discover",
        "--in",
        input.to_str().unwrap(),
        "--heuristic",
        "nested-calls",
    ];
    args.extend_from_slice(extra);
    hptree(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn discovers_the_running_example() {
    let out = discover(&["--mode", "rad", "--paths", "1.0", "--format", "tree"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        String::from_utf8(out.stdout.clone()).unwrap(),
        format!("{EXPECTED_MODEL}\n")
    );
    let err = stderr(&out);
    assert!(err.contains("1 traces, 5 events, depth 4"), "{err}");
    assert!(err.contains("11 nodes"), "{err}");
    assert_eq!(discover(&["--format", "tree"]).stdout, out.stdout);
}

#[test]
fn recursive_model_cannot_become_pnml() {
    let out = discover(&["--format", "pnml"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("rec:B.process()"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());

    let cut = discover(&["--format", "pnml", "--max-depth", "1"]);
    assert!(cut.status.success(), "{}", stderr(&cut));
    assert!(String::from_utf8(cut.stdout).unwrap().contains("<pnml>"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.xes");
    std::fs::write(&broken, "<log><trace><event>").unwrap();
    let broken = broken.to_str().unwrap();
    for args in [
        vec!["discover", "--in", "/nonexistent/log.xes"],
        vec!["discover", "--in", broken],
    ] {
        let out = hptree(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr(&out).trim().lines().count(), 1, "{}", stderr(&out));
    }
    for extra in [
        &["--paths", "1.5"][..],
        &["--min-depth", "3", "--max-depth", "1"],
        &["--heuristic", "structured-names", "--separator", ""],
    ] {
        let out = discover(extra);
        assert_eq!(out.status.code(), Some(2), "{extra:?}: {}", stderr(&out));
    }
    assert_eq!(discover(&["--format", "svg"]).status.code(), Some(2));
}

#[test]
fn json_and_dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("model.json");
    let out = discover(&["--format", "json", "--out", json.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(from_json_value(&v).unwrap(), EXPECTED_MODEL.parse::<Tree>().unwrap());
    assert_eq!(v["children"][0]["children"][0]["freq"], 1);

    let dot = String::from_utf8(discover(&["--format", "dot"]).stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("subgraph cluster_r_0_1"));
    assert!(dot.contains("class=back"));
}

#[test]
fn flat_and_rad_on_a_deep_log() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("deep.xes");
    let log = depth_family(8, 100, 42);
    // the file stores flat names joined by '/'; structured names restores depth 8
    let flat: HierLog = log
        .traces
        .iter()
        .map(|t| {
            HierTrace::from_paths(t.events.iter().map(|e| {
                let name = e.path.iter().map(Activity::as_str).collect::<Vec<_>>().join("/");
                vec![Activity::new(name).unwrap()]
            }))
        })
        .collect();
    hptree::xes::write_xes(&flat, std::fs::File::create(&path).unwrap()).unwrap();
    for mode in ["flat", "rad"] {
        let out = hptree(&[
            "discover",
            "--in",
            path.to_str().unwrap(),
            "--heuristic",
            "structured-names",
            "--separator",
            "/",
            "--mode",
            mode,
        ]);
        assert!(out.status.success(), "{mode}: {}", stderr(&out));
        let err = stderr(&out);
        assert!(err.contains("depth 8") && err.contains(" ms"), "{err}");
    }
}

#[test]
fn bench_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = hptree(&[
        "bench",
        "--suite",
        "depth-scaling",
        "--repetitions",
        "1",
        "--warmup",
        "0",
        "--traces",
        "20",
        "--max-param",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "suite,mode,param,mean_ms,ci95_ms");
    assert_eq!(lines.len(), 1 + 2 * 3);
    for l in &lines[1..] {
        assert!(l.starts_with("depth-scaling,") && l.ends_with(','), "{l}");
    }
    assert_eq!(hptree(&["bench", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn bench_rows_with_intervals() {
    let config = BenchConfig {
        repetitions: 3,
        warmup: 1,
        traces: 20,
        max_param: Some(2),
        ..BenchConfig::new(Suite::TraceLengthScaling)
    };
    let rows = bench::run(&config, |_| {});
    assert_eq!(rows.len(), 6);
    assert!(rows
        .iter()
        .all(|r| r.ci95_ms.is_some_and(|c| c >= 0.0) && r.mean_ms > 0.0));
    let mut buf = Vec::new();
    bench::write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("trace-length-scaling,naive,1,"));
    assert_eq!(Suite::DepthScaling.log(3, 30, 9), Suite::DepthScaling.log(3, 30, 9));
}
