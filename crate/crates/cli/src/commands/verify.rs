use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::Args;
use hba_core::bounds;
use hba_core::generators;
use hba_core::layout::{self, LayoutOptions, LayoutResult};
use hba_core::{Footprints, GraphModel, MemoryHierarchy, NodeId};

use super::usage;
use crate::format;
use crate::{default_roots, AlgoKind, HierarchyArgs, SizeModelArgs};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Graph container to check (alternative: --bst-depth)
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Check a generated complete binary search tree of this depth instead
    /// of a file
    #[arg(long)]
    pub bst_depth: Option<u32>,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    #[command(flatten)]
    pub size: SizeModelArgs,
    /// Blocked layout to verify: hbtree, twopass, or onepass
    #[arg(long, value_enum, default_value_t = AlgoKind::Hbtree)]
    pub algo: AlgoKind,
    /// Comma-separated root slots; defaults to the nodes without incoming
    /// edges
    #[arg(long, value_delimiter = ',')]
    pub roots: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report to a file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Measure a shuffled control layout of the same graph against the
    /// blocked layout's per-level path bounds; exit 0 when the control
    /// breaks at least one of them
    #[arg(long)]
    pub expect_violation: bool,
    #[arg(long, default_value_t = 0)]
    pub base_offset: u64,
}

pub fn run(args: &VerifyArgs) -> Result<i32> {
    let graph = match (&args.input, args.bst_depth) {
        (Some(path), None) => format::read_graph(path)?,
        (None, Some(depth)) => generators::gen_bst(depth).map_err(|e| anyhow!("{e}"))?,
        _ => return Err(usage("pass exactly one of --in and --bst-depth")),
    };
    if !matches!(args.algo, AlgoKind::Hbtree | AlgoKind::Twopass | AlgoKind::Onepass) {
        return Err(usage("--algo must be a blocked layout (hbtree, twopass, onepass)"));
    }
    let hierarchy = args.hierarchy.resolve()?;
    let footprints = args.size.footprints();
    let roots =
        if args.roots.is_empty() { default_roots(&graph) } else { args.roots.clone() };
    let opts = LayoutOptions { base_offset: args.base_offset };
    let laid = layout::run(
        args.algo.to_algo(args.seed),
        &graph,
        &roots,
        &hierarchy,
        &footprints,
        &opts,
    )
    .map_err(|e| anyhow!("{e}"))?;

    if args.expect_violation {
        return control_check(args, &graph, &laid, &hierarchy, &footprints, &roots, &opts);
    }

    let report =
        bounds::verify_all(&laid, &graph, &hierarchy, args.seed).map_err(|e| anyhow!("{e}"))?;
    let mut text = String::new();
    if !report.growth_ok {
        text.push_str("# warning: hierarchy violates the 4x growth condition\n");
    }
    if !report.base_ok {
        text.push_str("# warning: sample layout violates the base condition\n");
    }
    text.push_str(&report.to_csv());
    emit(&text, args.out.as_deref())?;
    let ok = report.all_satisfied();
    println!("{}", if ok { "bounds satisfied" } else { "bounds violated" });
    Ok(if ok { 0 } else { 1 })
}

/// The bounds are worth something only if unblocked layouts actually break
/// them. Lays the same graph out pseudorandomly and measures it against the
/// blocked layout's per-level path bounds.
fn control_check(
    args: &VerifyArgs,
    graph: &GraphModel,
    laid: &LayoutResult,
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    roots: &[NodeId],
    opts: &LayoutOptions,
) -> Result<i32> {
    let rows = bounds::verify_path_bound(laid, graph, hierarchy, args.seed)
        .map_err(|e| anyhow!("{e}"))?;
    let root = graph
        .sole_root()
        .ok_or_else(|| anyhow!("the control check needs a unique root"))?;
    let control = layout::pseudorandom(graph, roots, args.seed, footprints, opts)
        .map_err(|e| anyhow!("{e}"))?;
    let sizes = hierarchy.sizes();
    let mut text = String::from("level,control_max_blocks,path_bound,violated\n");
    let mut any = false;
    for row in &rows {
        let control_max =
            bounds::max_path_blocks(&control, graph, root, sizes[row.level - 1], args.seed);
        let violated = control_max as f64 > row.path_bound + 1e-9;
        any |= violated;
        text.push_str(&format!(
            "{},{},{:.2},{}\n",
            row.level, control_max, row.path_bound, violated
        ));
    }
    emit(&text, args.out.as_deref())?;
    println!(
        "{}",
        if any {
            "control layout breaks a bound the blocked layout satisfies"
        } else {
            "control layout stayed within every bound"
        }
    );
    Ok(if any { 0 } else { 1 })
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| anyhow!("writing {}: {e}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}
