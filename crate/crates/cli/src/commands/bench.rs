use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Result};
use clap::{Args, ValueEnum};
use hba_core::layout::{self, LayoutOptions};
use hba_core::sim::{self, SimLevelConfig};
use hba_core::workloads::{self, Answers, WorkloadOptions};
use hba_core::{Footprints, GraphKind, GraphModel, MemoryHierarchy, NodeId};

use crate::format;
use crate::{default_roots, AlgoKind, HierarchyArgs, SizeModelArgs};

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub workload: WorkloadKind,
    /// Comma-separated layouts to compare
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub layouts: Vec<AlgoKind>,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    #[command(flatten)]
    pub size: SizeModelArgs,
    /// Key lookups to run (bstquery)
    #[arg(long, default_value_t = 100_000)]
    pub queries: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Start node for bfs and sssp, in the input file's id space
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    /// Also trace a 4-bytes-per-node side array indexed by emission rank
    #[arg(long)]
    pub side_array: bool,
    /// Worker threads over the per-layout cells; the report order is the
    /// --layouts order either way
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write the report to a file as well as stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub base_offset: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkloadKind {
    /// Seeded uniform key lookups on a search tree
    Bstquery,
    /// Breadth-first search over the symmetrized graph
    Bfs,
    /// Dijkstra shortest paths (needs edge weights)
    Sssp,
}

impl WorkloadKind {
    fn name(self) -> &'static str {
        match self {
            WorkloadKind::Bstquery => "bstquery",
            WorkloadKind::Bfs => "bfs",
            WorkloadKind::Sssp => "sssp",
        }
    }
}

/// One layout's share of the report: its section text and the workload
/// answers for the invariance cross-check.
struct Cell {
    section: String,
    answers: Answers,
}

pub fn run(args: &BenchArgs) -> Result<i32> {
    let mut graph = format::read_graph(&args.input)?;
    match args.workload {
        WorkloadKind::Bstquery => {
            if graph.keys.is_none() {
                format::recompute_bst_keys(&mut graph)?;
            }
        }
        WorkloadKind::Bfs => {
            if graph.kind == GraphKind::Directed {
                graph = graph.symmetrize();
            }
        }
        WorkloadKind::Sssp => {
            if graph.weights.is_none() {
                bail!("shortest paths need a weighted graph (generate with --weights)");
            }
        }
    }
    if args.source >= graph.node_count() {
        bail!("--source {} is out of range for {} nodes", args.source, graph.node_count());
    }
    let hierarchy = args.hierarchy.resolve()?;
    let footprints = args.size.footprints();
    let configs = sim::configs_from_hierarchy(&hierarchy);
    let roots: Vec<NodeId> = match args.workload {
        WorkloadKind::Bstquery => default_roots(&graph),
        WorkloadKind::Bfs | WorkloadKind::Sssp => vec![args.source],
    };

    let cells = run_cells(args, &graph, &hierarchy, &footprints, &configs, &roots)?;
    for (i, cell) in cells.iter().enumerate() {
        if cell.answers != cells[0].answers {
            bail!(
                "workload answers changed between layouts {} and {}",
                args.layouts[0].name(),
                args.layouts[i].name()
            );
        }
    }

    let mut report = String::new();
    for cell in &cells {
        report.push_str(&cell.section);
    }
    println!(
        "workload={} nodes={} layouts={}",
        args.workload.name(),
        graph.node_count(),
        args.layouts.len()
    );
    print!("{report}");
    if let Some(path) = &args.out {
        std::fs::write(path, &report)
            .map_err(|e| anyhow!("writing {}: {e}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

/// Runs every (layout, workload) cell, on worker threads when --jobs asks for
/// them. Results land in --layouts order no matter which thread ran them.
fn run_cells(
    args: &BenchArgs,
    graph: &GraphModel,
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    configs: &[SimLevelConfig],
    roots: &[NodeId],
) -> Result<Vec<Cell>> {
    let jobs = args.jobs.max(1).min(args.layouts.len().max(1));
    if jobs <= 1 {
        return args.layouts.iter().map(|&l| run_cell(args, l, graph, hierarchy, footprints, configs, roots)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<Cell>>>> =
        Mutex::new((0..args.layouts.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= args.layouts.len() {
                    break;
                }
                let cell =
                    run_cell(args, args.layouts[i], graph, hierarchy, footprints, configs, roots);
                slots.lock().unwrap()[i] = Some(cell);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|c| c.expect("every cell ran")).collect()
}

fn run_cell(
    args: &BenchArgs,
    algo: AlgoKind,
    graph: &GraphModel,
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    configs: &[SimLevelConfig],
    roots: &[NodeId],
) -> Result<Cell> {
    let opts = LayoutOptions { base_offset: args.base_offset };
    let laid = layout::run(algo.to_algo(args.seed), graph, roots, hierarchy, footprints, &opts)
        .map_err(|e| anyhow!("layout {}: {e}", algo.name()))?;
    let wopts = WorkloadOptions { side_array: args.side_array };
    let result = match args.workload {
        WorkloadKind::Bstquery => {
            workloads::run_bst_queries(graph, &laid, args.queries, args.seed, &wopts)
        }
        WorkloadKind::Bfs => workloads::run_bfs(graph, &laid, args.source, &wopts),
        WorkloadKind::Sssp => workloads::run_sssp(graph, &laid, args.source, &wopts),
    }
    .map_err(|e| anyhow!("workload on layout {}: {e}", algo.name()))?;
    let report = sim::simulate_hierarchy(&result.trace, configs).map_err(|e| anyhow!("{e}"))?;
    let mut section = format!("# layout={}\n", algo.name());
    section.push_str(&report.to_csv());
    for c in configs {
        section.push_str(&format!(
            "distinct,{},{}\n",
            c.block_size,
            sim::distinct_blocks(&result.trace, c.block_size)
        ));
    }
    section.push('\n');
    Ok(Cell { section, answers: result.answers })
}
