//! Command-line front end over the blocked-layout toolkit.
//!
//! Every command is a plain function over parsed argument structs, so test
//! suites drive the same code paths the binary does. Exit codes: 0 success,
//! 1 domain failure (bad input graph, unsatisfied bound, incompatible
//! workload), 2 usage errors (the argument parser's, plus flag combinations
//! only a command can check).

pub mod commands;
pub mod format;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hba_core::model::SizeModel;
use hba_core::{Footprints, GraphModel, LayoutAlgo, MemoryHierarchy, NodeId, PAPER_PRESET};

#[derive(Parser)]
#[command(
    name = "hba",
    about = "Copy graphs into layouts blocked for every level of a memory hierarchy",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic graph into a binary container
    Generate(commands::generate::GenerateArgs),
    /// Reorder a graph file with a layout algorithm
    Layout(commands::layout::LayoutArgs),
    /// Run a workload over one or more layouts and simulate the hierarchy
    Bench(commands::bench::BenchArgs),
    /// Check the per-level transfer bounds of a blocked layout
    Verify(commands::verify::VerifyArgs),
    /// Convert a text edge list into the binary container
    Import(commands::import::ImportArgs),
}

/// Runs a parsed invocation and reports the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Layout(args) => commands::layout::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::Import(args) => commands::import::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<commands::UsageError>() {
                2
            } else {
                1
            }
        }
    }
}

/// Hierarchy selection shared by layout, bench, and verify. Priority:
/// `--levels`, then `--preset`, then the HBA_PRESET environment variable,
/// then the four-level benchmark preset.
#[derive(Args, Debug, Clone)]
pub struct HierarchyArgs {
    /// Comma-separated block sizes, smallest first (e.g. 64,1024,4096)
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<u64>,
    /// Named preset; "paper" is 64,1024,4096,2097152
    #[arg(long)]
    pub preset: Option<String>,
    /// Comma-separated simulated capacities in blocks, parallel to the levels
    #[arg(long, value_delimiter = ',')]
    pub capacities: Vec<u64>,
}

impl HierarchyArgs {
    pub fn resolve(&self) -> Result<MemoryHierarchy> {
        let sizes: Vec<u64> = if !self.levels.is_empty() {
            self.levels.clone()
        } else if let Some(name) = &self.preset {
            preset_sizes(name)?
        } else if let Ok(name) = std::env::var("HBA_PRESET") {
            preset_sizes(&name)?
        } else {
            PAPER_PRESET.to_vec()
        };
        let capacities = (!self.capacities.is_empty()).then_some(self.capacities.as_slice());
        MemoryHierarchy::with_capacities(&sizes, capacities).map_err(|e| anyhow!("{e}"))
    }
}

fn preset_sizes(name: &str) -> Result<Vec<u64>> {
    match name {
        "paper" => Ok(PAPER_PRESET.to_vec()),
        other => Err(commands::usage(format!(
            "unknown hierarchy preset '{other}' (available: paper)"
        ))),
    }
}

/// Node footprint selection shared by layout, bench, and verify.
#[derive(Args, Debug, Clone)]
pub struct SizeModelArgs {
    /// How node bytes are derived
    #[arg(long, value_enum, default_value_t = SizeModelKind::Adjacency)]
    pub size_model: SizeModelKind,
    /// Reference width in bytes for the model-based footprints
    #[arg(long, default_value_t = 8)]
    pub ref_bytes: u64,
    /// Node bytes for the fixed model
    #[arg(long, default_value_t = 16)]
    pub node_bytes: u64,
    /// Charge each node one extra reference for a reorganization link field
    #[arg(long)]
    pub reorg_link: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeModelKind {
    /// Search-tree node: key plus two inline child references
    Bst,
    /// Header plus one inline reference per neighbor
    Adjacency,
    /// Library-style list with five references per out-edge
    Boost,
    /// Every node occupies --node-bytes
    Fixed,
}

impl SizeModelArgs {
    pub fn footprints(&self) -> Footprints {
        let mut model = match self.size_model {
            SizeModelKind::Bst => SizeModel::bst_node(self.ref_bytes, false),
            SizeModelKind::Adjacency => SizeModel::undirected_node(self.ref_bytes),
            SizeModelKind::Boost => SizeModel::boost_adjacency(self.ref_bytes),
            SizeModelKind::Fixed => SizeModel::fixed(self.node_bytes),
        };
        model.include_reorg_link = self.reorg_link;
        Footprints::Model(model)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoKind {
    /// Blocked copy of a tree
    Hbtree,
    /// Blocked copy of an arbitrary graph, forwarding pass plus copy pass
    #[value(alias = "hba")]
    Twopass,
    /// Blocked copy of an arbitrary graph in a single pass
    Onepass,
    Bfs,
    Dfs,
    Pseudorandom,
    Veb,
    Identity,
}

impl AlgoKind {
    pub fn to_algo(self, seed: u64) -> LayoutAlgo {
        match self {
            AlgoKind::Hbtree => LayoutAlgo::HbTree,
            AlgoKind::Twopass => LayoutAlgo::HbaTwoPass,
            AlgoKind::Onepass => LayoutAlgo::HbOnePass,
            AlgoKind::Bfs => LayoutAlgo::Bfs,
            AlgoKind::Dfs => LayoutAlgo::Dfs,
            AlgoKind::Pseudorandom => LayoutAlgo::Pseudorandom(seed),
            AlgoKind::Veb => LayoutAlgo::Veb,
            AlgoKind::Identity => LayoutAlgo::Identity,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgoKind::Hbtree => "hbtree",
            AlgoKind::Twopass => "twopass",
            AlgoKind::Onepass => "onepass",
            AlgoKind::Bfs => "bfs",
            AlgoKind::Dfs => "dfs",
            AlgoKind::Pseudorandom => "pseudorandom",
            AlgoKind::Veb => "veb",
            AlgoKind::Identity => "identity",
        }
    }
}

/// Root slots when none are given: every node without an incoming edge, in id
/// order, or node 0 for graphs where everything has a predecessor.
pub fn default_roots(graph: &GraphModel) -> Vec<NodeId> {
    let mut indegree = vec![0usize; graph.node_count()];
    for row in &graph.adjacency {
        for &v in row {
            indegree[v] += 1;
        }
    }
    let roots: Vec<NodeId> =
        (0..graph.node_count()).filter(|&v| indegree[v] == 0).collect();
    if roots.is_empty() {
        vec![0]
    } else {
        roots
    }
}
