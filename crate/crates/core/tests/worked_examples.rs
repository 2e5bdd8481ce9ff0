use hptree::discovery::{naive_discover, rad_discover, rad_discover_traced, DiscoveryConfig, Mode, RadOptions};
use hptree::heuristics::nested_calls;
use hptree::tree::{accepts, parse_tree};
use hptree::xes::parse_xes;
use hptree::{Activity, HierLog, HierTrace, Tree};

const EXPECTED_MODEL: &str = r#"sub:"Main.main()"(seq("Main.input()", sub:"B.process()"(xor("A.process()", seq("B.stepPre()", rec:"B.process()", "B.stepPost()"))), "Main.output()"))"#;

fn running_example() -> HierLog {
    let raw = parse_xes(include_bytes!("fixtures/running_example.xes")).unwrap();
    nested_calls(&raw).unwrap()
}

fn path(p: &[&str]) -> Vec<Activity> {
    p.iter().map(|a| Activity::new(a).unwrap()).collect()
}

fn lifted_trace() -> HierTrace {
    HierTrace::from_paths([
        path(&["Main.main()", "Main.input()"]),
        path(&["Main.main()", "B.process()", "B.stepPre()"]),
        path(&["Main.main()", "B.process()", "B.process()", "A.process()"]),
        path(&["Main.main()", "B.process()", "B.stepPost()"]),
        path(&["Main.main()", "Main.output()"]),
    ])
}

fn assert_same(got: &Tree, want: &str) {
    let want = parse_tree(want).unwrap();
    assert!(got.structurally_eq(&want), "got {got}\nwant {want}");
}

#[test]
fn fixture_lifts_to_call_paths() {
    let log = running_example();
    assert_eq!(log.len(), 1);
    assert_eq!(log.traces[0].paths(), lifted_trace().paths());
    let stats = log.stats();
    assert_eq!(stats.depth, 4);
    assert_eq!(stats.alphabet.len(), 7);
}

#[test]
fn rad_rediscovers_the_running_example() {
    let tree = rad_discover(&running_example(), &DiscoveryConfig::default());
    assert_same(&tree, EXPECTED_MODEL);
    assert!(accepts(&tree, &lifted_trace()).unwrap());
}

#[test]
fn naive_nests_the_recursive_call() {
    let tree = naive_discover(&running_example(), &DiscoveryConfig::new(Mode::Naive, 1.0));
    assert_same(
        &tree,
        r#"sub:"Main.main()"(seq("Main.input()", sub:"B.process()"(seq("B.stepPre()", sub:"B.process()"("A.process()"), "B.stepPost()")), "Main.output()"))"#,
    );
}

#[test]
fn rad_store_dump_lists_every_context() {
    let out = rad_discover_traced(&running_example(), &DiscoveryConfig::default(), RadOptions::default());
    let json = out.store.to_json();
    let contexts: Vec<String> = json
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["context"].to_string())
        .collect();
    assert_eq!(
        contexts,
        [r#"[]"#, r#"["Main.main()"]"#, r#"["Main.main()","B.process()"]"#]
    );
}
