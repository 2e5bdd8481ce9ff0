use criterion::{criterion_group, criterion_main, Criterion};
use hptree::discovery::{rad_discover, DiscoveryConfig};
use hptree::export::{dot, json, pnml, to_petri_net};
use hptree::heuristics::nested_calls;
use hptree::tree::{depth_filter, language, Depth, LangBound};
use hptree_bench::{deep_log, running_example, RUNNING_EXAMPLE_XES};

fn small_log(c: &mut Criterion) {
    c.bench_function("parse+lift running_example", |b| {
        b.iter(|| nested_calls(&hptree::xes::parse_xes(RUNNING_EXAMPLE_XES).unwrap()).unwrap())
    });
    let log = running_example();
    c.bench_function("rad running_example", |b| {
        b.iter(|| rad_discover(&log, &DiscoveryConfig::default()))
    });
    let tree = rad_discover(&log, &DiscoveryConfig::default());
    c.bench_function("language running_example (8,2)", |b| {
        b.iter(|| language(&tree, LangBound::new(8, 2)).unwrap())
    });
}

fn exporters(c: &mut Criterion) {
    let tree = rad_discover(&deep_log(4, 500), &DiscoveryConfig::default());
    // cut below the recursive levels so the net exists
    let cut = depth_filter(&tree, 0, Depth::Finite(3)).unwrap();
    c.bench_function("dot depth 4", |b| b.iter(|| dot::to_dot(&tree, None)));
    c.bench_function("json depth 4", |b| b.iter(|| json::to_json(&tree)));
    c.bench_function("pnml depth 4 cut at 3", |b| {
        b.iter(|| to_petri_net(&cut).map(|n| pnml::to_pnml(&n)))
    });
}

criterion_group!(benches, small_log, exporters);
criterion_main!(benches);
