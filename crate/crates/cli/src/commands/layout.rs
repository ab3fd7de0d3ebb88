use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::Args;
use hba_core::layout::{self, LayoutOptions};

use super::sidecar;
use crate::format;
use crate::{default_roots, AlgoKind, HierarchyArgs, SizeModelArgs};

#[derive(Args, Debug)]
pub struct LayoutArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub algo: AlgoKind,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    #[command(flatten)]
    pub size: SizeModelArgs,
    /// Comma-separated root slots in the input file's id space; defaults to
    /// the nodes without incoming edges
    #[arg(long, value_delimiter = ',')]
    pub roots: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// First byte of the copied space, for alignment experiments
    #[arg(long, default_value_t = 0)]
    pub base_offset: u64,
}

pub fn run(args: &LayoutArgs) -> Result<i32> {
    let graph = format::read_graph(&args.input)?;
    let hierarchy = args.hierarchy.resolve()?;
    let footprints = args.size.footprints();
    let roots =
        if args.roots.is_empty() { default_roots(&graph) } else { args.roots.clone() };
    let opts = LayoutOptions { base_offset: args.base_offset };
    let result = layout::run(
        args.algo.to_algo(args.seed),
        &graph,
        &roots,
        &hierarchy,
        &footprints,
        &opts,
    )
    .map_err(|e| anyhow!("{e}"))?;

    let (remapped, new_id) = layout::remap_graph(&graph, &result);
    format::write_graph(&args.out, &remapped)?;
    // The sidecar maps each output id back to the input id it came from.
    let mut old_by_new = vec![0u64; new_id.len()];
    for (old, &new) in new_id.iter().enumerate() {
        old_by_new[new] = old as u64;
    }
    format::write_remap_csv(&sidecar(&args.out, "remap.csv"), &old_by_new)?;
    format::write_regions_csv(&sidecar(&args.out, "regions.csv"), &result.regions, &new_id)?;

    println!(
        "algo={} placed={}/{} tospace_end={} regions={}",
        args.algo.name(),
        result.placed_count(),
        graph.node_count(),
        result.tospace_end,
        result.regions.iter().map(Vec::len).sum::<usize>()
    );
    println!("wrote {}", args.out.display());
    Ok(0)
}
