use std::collections::BTreeMap;

use proptest::prelude::*;

use hptree::conformance::{random_log, random_tree, RandomTreeOptions};
use hptree::discovery::{
    flat_discover, naive_discover, rad_discover, rad_discover_traced, DiscoveryConfig, Mode, RadOptions,
};
use hptree::export::json::{from_json, to_json};
use hptree::export::{dot::to_dot, pnml::to_pnml, to_petri_net};
use hptree::tree::{language_within, reduce, Acceptor, LangBound, Language, PathTrace};
use hptree::{HierLog, Operator, Tree};

const LIMIT: usize = 50_000;

fn bounded(tree: &Tree, b: LangBound) -> Option<Language> {
    language_within(tree, b, LIMIT).unwrap()
}

fn counts(log: &HierLog) -> BTreeMap<PathTrace, usize> {
    let mut m = BTreeMap::new();
    for t in &log.traces {
        *m.entry(t.paths()).or_default() += 1;
    }
    m
}

/// Near misses of a language: every trace with one event dropped or two
/// neighbors swapped.
fn mutations(lang: &Language) -> Vec<PathTrace> {
    let mut out = Vec::new();
    for t in lang {
        for i in 0..t.len() {
            let mut d = t.clone();
            d.remove(i);
            out.push(d);
            if i + 1 < t.len() {
                let mut s = t.clone();
                s.swap(i, i + 1);
                out.push(s);
            }
        }
    }
    out
}

fn depth1_opts() -> RandomTreeOptions {
    RandomTreeOptions {
        named: false,
        recursion: false,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn language_and_acceptor_agree(seed in any::<u64>(), other in any::<u64>()) {
        let b = LangBound::new(5, 2);
        let tree = random_tree(seed, &RandomTreeOptions::default());
        let Some(lang) = bounded(&tree, b) else { return Ok(()) };
        let acc = Acceptor::new(&tree).unwrap();
        for t in &lang {
            prop_assert!(acc.accepts(t), "{tree} rejects its own trace {t:?}");
        }
        let foreign = bounded(&random_tree(other, &RandomTreeOptions::default()), b).unwrap_or_default();
        for t in mutations(&lang).into_iter().chain(foreign) {
            if t.len() <= b.max_trace_len && acc.accepts_bounded(&t, b.max_recursion_depth) {
                prop_assert!(lang.contains(&t), "{tree} accepts {t:?} outside its language");
            }
        }
        prop_assert_eq!(lang.contains(&Vec::new()), acc.accepts(&[]));
    }

    #[test]
    fn reduce_keeps_language_and_is_idempotent(seed in any::<u64>()) {
        let b = LangBound::new(6, 2);
        let tree = random_tree(seed, &RandomTreeOptions::default());
        let r = reduce(&tree);
        prop_assert_eq!(reduce(&r), r.clone());
        if let Some(lang) = bounded(&tree, b) {
            prop_assert_eq!(bounded(&r, b), Some(lang));
        }
    }

    #[test]
    fn parallel_composition_is_symmetric(a in any::<u64>(), c in any::<u64>()) {
        let opts = RandomTreeOptions { max_leaves: 3, ..Default::default() };
        let (x, y) = (random_tree(a, &opts), random_tree(c, &opts));
        let b = LangBound::new(5, 1);
        let xy = bounded(&Tree::Op(Operator::Par, vec![x.clone(), y.clone()]), b);
        let yx = bounded(&Tree::Op(Operator::Par, vec![y, x]), b);
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn rad_is_schedule_independent(seed in 0u64..500, shuffle in any::<u64>()) {
        let (_, log) = random_log(seed, &RandomTreeOptions::default(), LangBound::new(8, 2), 50);
        let cfg = DiscoveryConfig::default();
        let base = rad_discover_traced(&log, &cfg, RadOptions::default());
        for options in [
            RadOptions { parallel: true, ..Default::default() },
            RadOptions { shuffle_seed: Some(shuffle), ..Default::default() },
            RadOptions { parallel: true, shuffle_seed: Some(shuffle), ..Default::default() },
        ] {
            let other = rad_discover_traced(&log, &cfg, options);
            prop_assert_eq!(&other.tree, &base.tree);
            prop_assert_eq!(other.store.entries.keys().collect::<Vec<_>>(), base.store.entries.keys().collect::<Vec<_>>());
            for (ctx, e) in &base.store.entries {
                prop_assert!(other.store.entries[ctx].sublog.multiset_eq(&e.sublog));
            }
        }
    }

    #[test]
    fn sublogs_only_grow(seed in 0u64..500, paths in prop_oneof![Just(1.0), 0.0f64..1.0]) {
        let (_, log) = random_log(seed, &RandomTreeOptions::default(), LangBound::new(8, 2), 50);
        let cfg = DiscoveryConfig::new(Mode::Rad, paths);
        let out = rad_discover_traced(&log, &cfg, RadOptions { record_rounds: true, ..Default::default() });
        prop_assert_eq!(out.rounds.len(), out.stats.rounds);
        for w in out.rounds.windows(2) {
            for (ctx, before) in &w[0] {
                let after = w[1].get(ctx).map(counts).unwrap_or_default();
                for (t, n) in counts(before) {
                    prop_assert!(after.get(&t).copied().unwrap_or(0) >= n, "L({ctx:?}) lost {t:?}");
                }
            }
        }
    }

    #[test]
    fn modes_agree_on_flat_logs(seed in 0u64..1000) {
        let (_, log) = random_log(seed, &depth1_opts(), LangBound::new(6, 0), 30);
        prop_assert!(log.depth() <= 1);
        let naive = naive_discover(&log, &DiscoveryConfig::new(Mode::Naive, 1.0));
        let rad = rad_discover(&log, &DiscoveryConfig::default());
        let flat = flat_discover(&log, &DiscoveryConfig::new(Mode::Flat, 1.0));
        prop_assert!(naive.structurally_eq(&rad), "{naive} vs {rad}");
        prop_assert!(naive.structurally_eq(&flat), "{naive} vs {flat}");
    }

    #[test]
    fn exporters_are_deterministic_and_json_round_trips(seed in any::<u64>()) {
        let tree = random_tree(seed, &RandomTreeOptions::default());
        prop_assert_eq!(from_json(&to_json(&tree)).unwrap(), tree.clone());
        prop_assert_eq!(to_json(&tree), to_json(&tree.clone()));
        prop_assert_eq!(to_dot(&tree, None), to_dot(&tree.clone(), None));
        if let Ok(net) = to_petri_net(&tree) {
            prop_assert_eq!(to_pnml(&net), to_pnml(&to_petri_net(&tree).unwrap()));
        }
    }
}

#[test]
fn gen_model_json_round_trip() {
    for seed in 0..100 {
        let tree = hptree::conformance::gen_model(seed, 7);
        assert!(from_json(&to_json(&tree)).unwrap().structurally_eq(&tree));
    }
}
