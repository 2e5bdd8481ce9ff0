//! parse -> heuristic -> discover -> depth_filter -> reduce -> export.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use hptree::discovery::{discover, DiscoveryConfig};
use hptree::export::{dot, json, node_frequencies, pnml, to_petri_net};
use hptree::heuristics::HeuristicConfig;
use hptree::tree::{depth_filter, reduce, Depth};
use hptree::{HierLog, Tree};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Tree,
    Dot,
    Pnml,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tree" => Ok(Format::Tree),
            "dot" => Ok(Format::Dot),
            "pnml" => Ok(Format::Pnml),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected tree, dot, pnml or json)")),
        }
    }
}

/// Depth window applied after discovery; the default keeps every level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Window {
    pub min_depth: usize,
    pub max_depth: Depth,
}

impl Window {
    pub fn check(&self) -> Result<(), Failure> {
        match self.max_depth {
            Depth::Finite(max) if self.min_depth > max => Err(Failure::Input(format!(
                "min depth {} exceeds max depth {max}",
                self.min_depth
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub heuristic: HeuristicConfig,
    pub discovery: DiscoveryConfig,
    pub window: Window,
    pub format: Format,
}

/// Failure classes of the pipeline; each maps to a process exit status.
#[derive(Debug, PartialEq, Eq)]
pub enum Failure {
    /// Unreadable or malformed input, or an invalid configuration.
    Input(String),
    Export(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Export(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Export(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Failure {}

fn input(e: impl fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

/// Reads an XES or CSV log (by extension, XES otherwise) and lifts it.
pub fn load_log(path: &Path, heuristic: &HeuristicConfig) -> Result<HierLog, Failure> {
    let bytes = std::fs::read(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let flat = if csv {
        hptree::csvlog::parse_csv(&bytes)
    } else {
        hptree::xes::parse_xes(&bytes)
    }
    .map_err(|e| input(format!("{}: {e}", path.display())))?;
    heuristic.validate().map_err(input)?;
    heuristic.apply(&flat).map_err(input)
}

/// Discovery followed by the depth window.
pub fn model(log: &HierLog, discovery: &DiscoveryConfig, window: Window) -> Result<Tree, Failure> {
    discovery.validate().map_err(input)?;
    window.check()?;
    let tree = discover(log, discovery);
    let filtered = depth_filter(&tree, window.min_depth, window.max_depth).map_err(input)?;
    Ok(reduce(&filtered))
}

/// Renders `tree`; DOT and JSON carry per-node event counts from `log`.
pub fn render(tree: &Tree, log: &HierLog, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Tree => format!("{tree}\n"),
        Format::Dot => dot::to_dot(tree, Some(&node_frequencies(tree, log))),
        Format::Json => {
            let v = json::to_json_annotated(tree, &node_frequencies(tree, log));
            serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n"
        }
        Format::Pnml => {
            let net = to_petri_net(tree).map_err(|e| Failure::Export(e.to_string()))?;
            pnml::to_pnml(&net)
        }
    })
}

pub fn run(log: &HierLog, config: &RunConfig) -> Result<(Tree, String), Failure> {
    let tree = model(log, &config.discovery, config.window)?;
    let out = render(&tree, log, config.format)?;
    Ok((tree, out))
}
