//! Timing suites over the synthetic log families: every discovery mode on
//! every family member, warmup runs first, mean and 95% CI per cell.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use hptree::discovery::{discover, DiscoveryConfig, Mode};
use hptree::synthetic::{depth_family, summarize, trace_length_family, TRACES};
use hptree::HierLog;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Depths 1..=8.
    DepthScaling,
    /// Depth 3, main body repeated 1..=8 times.
    TraceLengthScaling,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "depth-scaling" => Ok(Suite::DepthScaling),
            "trace-length-scaling" => Ok(Suite::TraceLengthScaling),
            _ => Err(format!(
                "unknown suite {s:?} (expected depth-scaling or trace-length-scaling)"
            )),
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::DepthScaling => "depth-scaling",
            Suite::TraceLengthScaling => "trace-length-scaling",
        }
    }

    pub fn params(self) -> std::ops::RangeInclusive<usize> {
        1..=8
    }

    pub fn log(self, param: usize, traces: usize, seed: u64) -> HierLog {
        match self {
            Suite::DepthScaling => depth_family(param, traces, seed),
            Suite::TraceLengthScaling => trace_length_family(param, traces, seed),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub suite: Suite,
    pub repetitions: usize,
    pub warmup: usize,
    pub traces: usize,
    pub seed: u64,
    /// Largest family parameter to run; `None` runs the whole suite.
    pub max_param: Option<usize>,
}

impl BenchConfig {
    pub fn new(suite: Suite) -> Self {
        BenchConfig {
            suite,
            repetitions: 30,
            warmup: 3,
            traces: TRACES,
            seed: 42,
            max_param: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub suite: &'static str,
    pub mode: &'static str,
    pub param: usize,
    pub mean_ms: f64,
    /// Omitted with fewer than two repetitions.
    pub ci95_ms: Option<f64>,
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Naive => "naive",
        Mode::Rad => "rad",
        Mode::Flat => "flat",
    }
}

pub fn run(config: &BenchConfig, mut progress: impl FnMut(&Row)) -> Vec<Row> {
    let mut rows = Vec::new();
    for param in config.suite.params() {
        if config.max_param.is_some_and(|m| param > m) {
            break;
        }
        let log = config.suite.log(param, config.traces, config.seed);
        for mode in [Mode::Naive, Mode::Rad, Mode::Flat] {
            let cfg = DiscoveryConfig::new(mode, 1.0);
            for _ in 0..config.warmup {
                std::hint::black_box(discover(&log, &cfg));
            }
            let samples: Vec<f64> = (0..config.repetitions.max(1))
                .map(|_| {
                    let t = Instant::now();
                    std::hint::black_box(discover(&log, &cfg));
                    t.elapsed().as_secs_f64() * 1e3
                })
                .collect();
            let s = summarize(&samples);
            let row = Row {
                suite: config.suite.name(),
                mode: mode_name(mode),
                param,
                mean_ms: s.mean,
                ci95_ms: s.ci95,
            };
            progress(&row);
            rows.push(row);
        }
    }
    rows
}

pub fn write_csv(rows: &[Row], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["suite", "mode", "param", "mean_ms", "ci95_ms"])?;
    }
    w.flush()?;
    Ok(())
}
