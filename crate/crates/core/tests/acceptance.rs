//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use hptree::conformance::{
    fitness, gen_complete_log, gen_model, precision_estimate, random_log, random_tree, RandomTreeOptions,
};
use hptree::discovery::{
    discover, naive_discover_traced, rad_discover, rad_discover_traced, DiscoveryConfig, Mode, RadOptions,
};
use hptree::error::HeuristicError;
use hptree::export::pnml::{from_pnml, to_pnml};
use hptree::export::to_petri_net;
use hptree::heuristics::nested_calls;
use hptree::synthetic::{depth_family, summarize, TRACES};
use hptree::tree::{depth_filter, language, language_within, parse_tree, reduce, Depth, LangBound};
use hptree::xes::parse_xes;
use hptree::{Activity, HierLog, HierTrace, Tree};

type Outcome = Result<String, String>;

const EXPECTED_MODEL: &str = r#"sub:"Main.main()"(seq("Main.input()", sub:"B.process()"(xor("A.process()", seq("B.stepPre()", rec:"B.process()", "B.stepPost()"))), "Main.output()"))"#;

fn t(s: &str) -> Tree {
    parse_tree(s).unwrap()
}

fn log(traces: &[&[&str]]) -> HierLog {
    traces
        .iter()
        .map(|tr| {
            HierTrace::from_paths(
                tr.iter()
                    .map(|e| e.split('.').map(|a| Activity::new(a).unwrap()).collect::<Vec<_>>()),
            )
        })
        .collect()
}

fn path(p: &[&str]) -> Vec<Activity> {
    p.iter().map(|a| Activity::new(a).unwrap()).collect()
}

fn running_example() -> HierLog {
    nested_calls(&parse_xes(include_bytes!("fixtures/running_example.xes")).unwrap()).unwrap()
}

fn lifted_trace() -> Vec<Vec<Activity>> {
    vec![
        path(&["Main.main()", "Main.input()"]),
        path(&["Main.main()", "B.process()", "B.stepPre()"]),
        path(&["Main.main()", "B.process()", "B.process()", "A.process()"]),
        path(&["Main.main()", "B.process()", "B.stepPost()"]),
        path(&["Main.main()", "Main.output()"]),
    ]
}

fn within(limit: Duration, started: Instant, detail: String) -> Outcome {
    let took = started.elapsed();
    if took <= limit {
        Ok(format!("{detail} in {took:.2?}"))
    } else {
        Err(format!("{detail}, but took {took:.2?} (limit {limit:?})"))
    }
}

fn random_logs() -> Vec<HierLog> {
    (0..200)
        .map(|seed| random_log(seed, &RandomTreeOptions::default(), LangBound::new(8, 2), 50).1)
        .collect()
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let naive = |l: &HierLog| naive_discover_traced(l, &DiscoveryConfig::new(Mode::Naive, 1.0)).0;
    let rad = |l: &HierLog| rad_discover_traced(l, &DiscoveryConfig::default(), RadOptions::default());
    let mut checks = vec![
        (naive(&log(&[&["f.a", "f.b"], &["f.c"]])), "sub:f(xor(seq(a, b), c))"),
        (naive(&log(&[&["f.a", "f.g.f.b"]])), "sub:f(seq(a, sub:g(sub:f(b))))"),
        (naive(&log(&[&["f.a"], &["f"]])), "sub:f(xor(a, tau))"),
    ];
    let r1 = rad(&log(&[&["f.a", "f.g.f.b"]]));
    let r2 = rad(&log(&[&["f.g.g.a"], &["f.g.f.g.a"]]));
    let r3 = rad(&log(&[&["f.f"]]));
    checks.push((r1.tree.clone(), "sub:f(xor(b, seq(a, sub:g(rec:f))))"));
    checks.push((r2.tree.clone(), "sub:f(sub:g(xor(a, rec:f, rec:g)))"));
    checks.push((r3.tree.clone(), "sub:f(xor(rec:f, tau))"));
    checks.push((
        rad_discover(&running_example(), &DiscoveryConfig::default()),
        EXPECTED_MODEL,
    ));
    for (got, want) in &checks {
        if !got.structurally_eq(&t(want)) {
            return Err(format!("got {got}, expected {want}"));
        }
    }
    let stores = [
        (&r1, vec!["f"], log(&[&["b"], &["a", "g.f.b"]])),
        (&r1, vec!["f", "g"], log(&[&["f.b"]])),
        (&r3, vec!["f"], log(&[&["f"], &[]])),
    ];
    for (run, ctx, want) in &stores {
        let got = &run.store.get(ctx).ok_or(format!("no sublog for {ctx:?}"))?.sublog;
        if !got.multiset_eq(want) {
            return Err(format!("sublog {ctx:?} is {got:?}"));
        }
    }
    if running_example().traces[0].paths() != lifted_trace() {
        return Err("running example fixture does not lift to the expected call paths".into());
    }
    within(
        Duration::from_secs(1),
        started,
        format!("{} trees and {} sublog stores exact", checks.len(), stores.len()),
    )
}

fn criterion_2(logs: &[HierLog]) -> Outcome {
    let started = Instant::now();
    for (seed, l) in logs.iter().enumerate() {
        for mode in [Mode::Naive, Mode::Rad, Mode::Flat] {
            let model = discover(l, &DiscoveryConfig::new(mode, 1.0));
            // the flat model speaks the flattened names
            let target = if mode == Mode::Flat { l.flatten() } else { l.clone() };
            let f = fitness(&model, &target).map_err(|e| e.to_string())?;
            if f.trace_fitness < 1.0 {
                return Err(format!("seed {seed}, {mode:?}: fitness {}", f.trace_fitness));
            }
        }
    }
    within(
        Duration::from_secs(60),
        started,
        format!("{} logs x 3 modes at fitness 1.0", logs.len()),
    )
}

fn criterion_3() -> Outcome {
    let started = Instant::now();
    let b = LangBound::new(8, 3);
    for seed in 0..100 {
        let model = gen_model(seed, 6);
        let l = gen_complete_log(&model, b).map_err(|e| format!("seed {seed}: {e}"))?;
        let found = rad_discover(&l, &DiscoveryConfig::default());
        if language(&found, b).unwrap() != language(&model, b).unwrap() {
            return Err(format!("seed {seed}: {model} rediscovered as {found}"));
        }
    }
    within(
        Duration::from_secs(120),
        started,
        "100 models rediscovered at (8, 3)".into(),
    )
}

fn criterion_4(logs: &[HierLog]) -> Outcome {
    let mut all: Vec<HierLog> = logs.to_vec();
    all.push(running_example());
    all.extend((0..100).map(|s| gen_complete_log(&gen_model(s, 6), LangBound::new(8, 3)).unwrap()));
    let mut worst_changes = 0.0f64;
    for (i, l) in all.iter().enumerate() {
        let depth = l.depth();
        let bound = depth + l.alphabet().len();
        let r = rad_discover_traced(l, &DiscoveryConfig::default(), RadOptions::default());
        if let Some((ctx, &c)) = r.stats.changes.iter().find(|(_, &c)| c > depth) {
            return Err(format!("log {i}: L({ctx:?}) changed {c} times, depth {depth}"));
        }
        if r.stats.max_cut_recursions > bound {
            return Err(format!(
                "log {i}: rad recursion {} > {bound}",
                r.stats.max_cut_recursions
            ));
        }
        let (_, n) = naive_discover_traced(l, &DiscoveryConfig::new(Mode::Naive, 1.0));
        if n.max_nesting > bound {
            return Err(format!("log {i}: naive recursion depth {} > {bound}", n.max_nesting));
        }
        if depth > 0 {
            let c = r.stats.changes.values().copied().max().unwrap_or(0);
            worst_changes = worst_changes.max(c as f64 / depth as f64);
        }
    }
    Ok(format!(
        "{} logs within bounds (largest changes/depth ratio {worst_changes:.2})",
        all.len()
    ))
}

fn time_ms(l: &HierLog, mode: Mode, runs: usize) -> Vec<f64> {
    let cfg = DiscoveryConfig::new(mode, 1.0);
    for _ in 0..3 {
        discover(l, &cfg);
    }
    (0..runs)
        .map(|_| {
            let s = Instant::now();
            std::hint::black_box(discover(l, &cfg));
            s.elapsed().as_secs_f64() * 1e3
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let l = depth_family(8, TRACES, 42);
    let flat = l.flatten();
    let stats = l.stats();
    if stats.depth != 8 || stats.alphabet.len() < 40 {
        return Err(format!(
            "family has depth {} and {} activities",
            stats.depth,
            stats.alphabet.len()
        ));
    }
    let f = summarize(&time_ms(&flat, Mode::Flat, 30));
    let r = summarize(&time_ms(&l, Mode::Rad, 30));
    let n = summarize(&time_ms(&l, Mode::Naive, 30));
    let ci = |s: hptree::synthetic::Summary| format!("{:.2} ± {:.2} ms", s.mean, s.ci95.unwrap_or(0.0));
    let (fr, fnv) = (f.mean / r.mean, f.mean / n.mean);
    let detail = format!(
        "flat {}, rad {} ({fr:.2}x), naive {} ({fnv:.2}x); target 2x {}",
        ci(f),
        ci(r),
        ci(n),
        if fr >= 2.0 && fnv >= 2.0 { "met" } else { "not met" }
    );
    if fr > 1.0 && fnv > 1.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Outcome {
    let b = LangBound::new(6, 2);
    let mut checked = 0;
    let mut seed = 0;
    while checked < 300 {
        let tree = random_tree(seed, &RandomTreeOptions::default());
        seed += 1;
        let Some(lang) = language_within(&tree, b, 200_000).unwrap() else {
            continue;
        };
        let r = reduce(&tree);
        if language(&r, b).unwrap() != lang {
            return Err(format!("{tree} reduces to {r} with a different language"));
        }
        if reduce(&r) != r {
            return Err(format!("reduce is not idempotent on {tree}"));
        }
        checked += 1;
    }
    Ok(format!("300 trees, language kept and idempotent ({} drawn)", seed))
}

fn criterion_7() -> Outcome {
    let got = depth_filter(&t("seq(a, sub:x(seq(b, sub:y(c))))"), 1, Depth::Finite(1)).unwrap();
    if got != t("seq(b, y)") {
        return Err(format!("window filter gave {got}"));
    }
    for seed in 0..100 {
        let tree = reduce(&random_tree(seed, &RandomTreeOptions::default()));
        let got = depth_filter(&tree, 0, Depth::Infinite).unwrap();
        if got != tree {
            return Err(format!("full range changed {tree} into {got}"));
        }
    }
    Ok("window example exact; full range is identity on 100 reduced trees".into())
}

fn criterion_8() -> Outcome {
    if running_example().traces[0].paths() != lifted_trace() {
        return Err("interval fixture does not lift to the expected call paths".into());
    }
    for (name, xes) in [
        ("overlap", &include_bytes!("fixtures/overlap.xes")[..]),
        ("unclosed", &include_bytes!("fixtures/unclosed.xes")[..]),
    ] {
        match nested_calls(&parse_xes(xes).unwrap()) {
            Err(HeuristicError::UnbalancedLifecycle { .. }) => {}
            other => return Err(format!("{name} fixture gave {other:?}")),
        }
    }
    Ok("call paths exact; 2 overlap fixtures rejected".into())
}

fn criterion_9() -> Outcome {
    let started = Instant::now();
    let b = LangBound::new(6, 0);
    let opts = RandomTreeOptions {
        recursion: false,
        ..Default::default()
    };
    for seed in 0..50 {
        let tree = random_tree(seed, &opts);
        let net = to_petri_net(&tree).map_err(|e| e.to_string())?;
        let read = from_pnml(&to_pnml(&net)).map_err(|e| e.to_string())?;
        if !read.is_workflow_net() {
            return Err(format!("{tree}: {:?}", read.workflow_violations()));
        }
        if read.fused_language(b.max_trace_len) != language(&tree, b).unwrap() {
            return Err(format!("seed {seed}: net language differs for {tree}"));
        }
    }
    within(Duration::from_secs(60), started, "50 nets match at (6, 0)".into())
}

fn criterion_10() -> Outcome {
    let l = running_example();
    let b = LangBound::new(8, 3);
    let rad = rad_discover(&l, &DiscoveryConfig::default());
    let flat = l.flatten();
    let flower = Tree::flower(flat.alphabet().iter().map(Tree::activity).collect());
    let p_rad = precision_estimate(&rad, &l, b).map_err(|e| e.to_string())?;
    let p_flower = precision_estimate(&flower, &flat, b).map_err(|e| e.to_string())?;
    let detail = format!("rad {:.3} vs flat flower {:.3}", p_rad.precision, p_flower.precision);
    if p_rad.precision > p_flower.precision {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    // `cargo test` passes filter arguments through; this target ignores them
    let logs = random_logs();
    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("worked examples", Box::new(criterion_1)),
        ("perfect fitness", Box::new(|| criterion_2(&logs))),
        ("rediscoverability", Box::new(criterion_3)),
        ("termination bounds", Box::new(|| criterion_4(&logs))),
        ("hierarchy speedup", Box::new(criterion_5)),
        ("reduction soundness", Box::new(criterion_6)),
        ("depth filtering", Box::new(criterion_7)),
        ("nested calls", Box::new(criterion_8)),
        ("PNML semantics", Box::new(criterion_9)),
        ("precision direction", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
