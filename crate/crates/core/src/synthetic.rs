//! Seeded synthetic logs that look like traced programs: classes whose
//! methods call into the next layer, with branches and loops.
//!
//! The depth family varies the call depth at a fixed trace count; the
//! trace-length family fixes the depth and repeats the main loop.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::log::{Activity, HierLog, HierTrace};

#[derive(Clone, Debug)]
enum Step {
    Leaf(Activity),
    Call(usize),
    Choice(Box<Step>, Box<Step>),
    Repeat(Box<Step>),
}

#[derive(Clone, Debug)]
struct Method {
    name: Activity,
    body: Vec<Step>,
}

/// A layered program; methods of layer `l` only call methods of layer `l + 1`.
#[derive(Clone, Debug)]
pub struct Program {
    top: Vec<Step>,
    layers: Vec<Vec<Method>>,
}

const METHODS_PER_LAYER: usize = 6;
const STEPS: usize = 3;
/// Longest trace a sample may have before it is redrawn.
const MAX_EVENTS: usize = 400;

fn act(s: String) -> Activity {
    Activity::new(s).expect("generated names are valid")
}

impl Program {
    /// A program whose logs have event paths of length up to `depth`.
    pub fn generate(depth: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let depth = depth.max(1);
        let layers = (0..depth - 1)
            .map(|l| {
                (0..METHODS_PER_LAYER)
                    .map(|i| {
                        let class = format!("C{l}_{i}");
                        let next = (l + 2 < depth).then_some(METHODS_PER_LAYER);
                        Method {
                            name: act(format!("{class}.run()")),
                            body: body(&mut rng, &class, next),
                        }
                    })
                    .collect()
            })
            .collect();
        let next = (depth > 1).then_some(METHODS_PER_LAYER);
        let mut top = body(&mut rng, "Main", next);
        // every layer-0 method is reachable from the main loop
        if depth > 1 {
            let calls = (0..METHODS_PER_LAYER)
                .map(Step::Call)
                .reduce(|a, b| Step::Choice(Box::new(a), Box::new(b)));
            top.push(Step::Repeat(Box::new(calls.expect("non-empty layer"))));
        }
        Program { top, layers }
    }

    /// Distinct activity names the program can emit.
    pub fn alphabet_size(&self) -> usize {
        let mut names = BTreeSet::new();
        for s in self
            .top
            .iter()
            .chain(self.layers.iter().flatten().flat_map(|m| &m.body))
        {
            leaves(s, &mut names);
        }
        names.len() + self.layers.iter().map(Vec::len).sum::<usize>()
    }

    /// One trace; the main body runs `rounds` times.
    fn trace(&self, rng: &mut ChaCha8Rng, rounds: usize) -> Option<HierTrace> {
        let mut out = Vec::new();
        for _ in 0..rounds {
            for s in &self.top {
                self.run(s, 0, &mut Vec::new(), rng, &mut out)?;
            }
        }
        Some(HierTrace::from_paths(out))
    }

    fn run(
        &self,
        step: &Step,
        layer: usize,
        ctx: &mut Vec<Activity>,
        rng: &mut ChaCha8Rng,
        out: &mut Vec<Vec<Activity>>,
    ) -> Option<()> {
        match step {
            Step::Leaf(a) => {
                if out.len() == MAX_EVENTS {
                    return None;
                }
                let mut p = ctx.clone();
                p.push(a.clone());
                out.push(p);
            }
            Step::Call(i) => {
                let m = &self.layers[layer][*i];
                ctx.push(m.name.clone());
                for s in &m.body {
                    self.run(s, layer + 1, ctx, rng, out)?;
                }
                ctx.pop();
            }
            Step::Choice(a, b) => {
                let s = if rng.gen_bool(0.5) { a } else { b };
                self.run(s, layer, ctx, rng, out)?;
            }
            Step::Repeat(a) => {
                let n = 1 + (0..2).take_while(|_| rng.gen_bool(0.5)).count();
                for _ in 0..n {
                    self.run(a, layer, ctx, rng, out)?;
                }
            }
        }
        Some(())
    }

    /// `traces` sampled traces; over-long samples are redrawn.
    pub fn sample(&self, traces: usize, rounds: usize, seed: u64) -> HierLog {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(traces);
        while out.len() < traces {
            if let Some(t) = self.trace(&mut rng, rounds) {
                out.push(t);
            }
        }
        HierLog::new(out)
    }
}

fn leaves<'a>(s: &'a Step, out: &mut BTreeSet<&'a str>) {
    match s {
        Step::Leaf(a) => {
            out.insert(a.as_str());
        }
        Step::Call(_) => {}
        Step::Choice(a, b) => {
            leaves(a, out);
            leaves(b, out);
        }
        Step::Repeat(a) => leaves(a, out),
    }
}

fn body(rng: &mut ChaCha8Rng, class: &str, next: Option<usize>) -> Vec<Step> {
    let mut ops = 0;
    let mut leaf = || {
        ops += 1;
        Step::Leaf(act(format!("{class}.op{}()", ops - 1)))
    };
    let mut out = Vec::with_capacity(STEPS);
    for _ in 0..STEPS {
        let roll: f64 = rng.gen();
        out.push(match next {
            Some(n) if roll < 0.4 => Step::Call(rng.gen_range(0..n)),
            _ if roll < 0.7 => leaf(),
            _ if roll < 0.85 => {
                let a = leaf();
                let b = match next {
                    Some(n) if rng.gen_bool(0.5) => Step::Call(rng.gen_range(0..n)),
                    _ => leaf(),
                };
                Step::Choice(Box::new(a), Box::new(b))
            }
            _ => Step::Repeat(Box::new(leaf())),
        });
    }
    out
}

/// Default trace count of both families.
pub const TRACES: usize = 500;

/// A log of `traces` traces whose deepest events have path length `depth`.
pub fn depth_family(depth: usize, traces: usize, seed: u64) -> HierLog {
    Program::generate(depth, seed).sample(traces, 1, seed.wrapping_add(1))
}

/// A depth-3 log whose traces repeat the main body `rounds` times.
pub fn trace_length_family(rounds: usize, traces: usize, seed: u64) -> HierLog {
    Program::generate(3, seed).sample(traces, rounds.max(1), seed.wrapping_add(1))
}

/// Mean of a timing sample with the half-width of its 95% confidence
/// interval (Student t); no interval for fewer than two samples.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Summary {
    pub mean: f64,
    pub ci95: Option<f64>,
}

pub fn summarize(samples: &[f64]) -> Summary {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n.max(1) as f64;
    if n < 2 {
        return Summary { mean, ci95: None };
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    Summary {
        mean,
        ci95: Some(t * (var / n as f64).sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_samples() {
        assert_eq!(summarize(&[4.0]), Summary { mean: 4.0, ci95: None });
        let s = summarize(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        // t(0.975, 2) = 4.3027, sd = 1
        assert!((s.ci95.unwrap() - 4.3027 / 3f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn depth_family_shape() {
        let log = depth_family(8, TRACES, 7);
        let stats = log.stats();
        assert_eq!(log.len(), TRACES);
        assert_eq!(stats.depth, 8);
        assert!(stats.alphabet.len() >= 40, "{}", stats.alphabet.len());
        assert!(Program::generate(8, 7).alphabet_size() >= stats.alphabet.len());
        assert_eq!(log, depth_family(8, TRACES, 7));
    }

    #[test]
    fn depth_one_is_flat() {
        let log = depth_family(1, 20, 3);
        assert_eq!(log.depth(), 1);
    }

    #[test]
    fn longer_rounds_give_longer_traces() {
        let events = |r| trace_length_family(r, 50, 1).events().count();
        assert!(events(1) < events(4));
        assert_eq!(trace_length_family(2, 50, 1).depth(), 3);
    }
}
