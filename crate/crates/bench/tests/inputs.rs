use hptree::discovery::{discover, DiscoveryConfig, Mode};
use hptree_bench::{deep_log, long_log, running_example, DEPTHS, ROUNDS};

#[test]
fn inputs_are_deterministic_and_shaped() {
    for d in DEPTHS {
        let log = deep_log(d, 40);
        assert_eq!(log.depth(), d);
        assert_eq!(log, deep_log(d, 40));
    }
    let lens: Vec<usize> = ROUNDS.iter().map(|&r| long_log(r, 40).events().count()).collect();
    assert!(lens.windows(2).all(|w| w[0] < w[1]), "{lens:?}");
    assert_eq!(running_example().stats().events, 5);
}

#[test]
fn every_mode_runs_on_every_input() {
    let log = deep_log(4, 40);
    for mode in [Mode::Naive, Mode::Rad, Mode::Flat] {
        assert!(discover(&log, &DiscoveryConfig::new(mode, 1.0)).size() > 1);
    }
}
