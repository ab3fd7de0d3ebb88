use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use super::sidecar;
use crate::format;

#[derive(Args, Debug)]
pub struct ImportArgs {
    /// Text edge list: one `u v` or `u v w` per line, `#` starts a comment
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Store each listed edge in both directions
    #[arg(long)]
    pub undirected: bool,
    /// Read a third column of edge weights
    #[arg(long)]
    pub weighted: bool,
}

pub fn run(args: &ImportArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let (graph, originals) = format::parse_edge_list(&text, args.undirected, args.weighted)?;
    format::write_graph(&args.out, &graph)?;
    format::write_remap_csv(&sidecar(&args.out, "remap.csv"), &originals)?;
    println!("nodes={} edges={}", graph.node_count(), graph.edge_count());
    println!("wrote {}", args.out.display());
    Ok(0)
}
