use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::{Args, ValueEnum};
use hba_core::generators::{self, GenKind, GenSpec};

use super::usage;
use crate::format;

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Node count (kary, ws, ba)
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Tree arity (kary) or ring degree (ws)
    #[arg(long)]
    pub k: Option<usize>,
    /// Rewiring probability (ws)
    #[arg(long)]
    pub p: Option<f64>,
    /// Attachment edges per node (ba)
    #[arg(long)]
    pub m: Option<usize>,
    /// Grid rows (mesh2d)
    #[arg(long)]
    pub rows: Option<usize>,
    /// Grid columns (mesh2d)
    #[arg(long)]
    pub cols: Option<usize>,
    /// Tree depth (bst)
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Attach uniform integer edge weights
    #[arg(long)]
    pub weights: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum ModelKind {
    /// Complete k-ary tree in level order
    Kary,
    /// Complete binary search tree keyed by in-order rank
    Bst,
    /// Watts-Strogatz small world
    Ws,
    /// Barabasi-Albert preferential attachment
    Ba,
    /// Four-connected grid
    Mesh2d,
}

pub fn run(args: &GenerateArgs) -> Result<i32> {
    let need = |value: Option<usize>, flag: &str| {
        value.ok_or_else(|| usage(format!("--model {:?} needs {flag}", args.model)))
    };
    let kind = match args.model {
        ModelKind::Kary => GenKind::KaryTree {
            nodes: need(args.nodes, "--nodes")?,
            k: need(args.k, "--k")?,
        },
        ModelKind::Bst => GenKind::Bst {
            depth: args.depth.ok_or_else(|| usage("--model bst needs --depth"))?,
        },
        ModelKind::Ws => GenKind::WattsStrogatz {
            n: need(args.nodes, "--nodes")?,
            k: need(args.k, "--k")?,
            p: args.p.ok_or_else(|| usage("--model ws needs --p"))?,
        },
        ModelKind::Ba => GenKind::BarabasiAlbert {
            n: need(args.nodes, "--nodes")?,
            m: need(args.m, "--m")?,
        },
        ModelKind::Mesh2d => GenKind::Mesh2d {
            rows: need(args.rows, "--rows")?,
            cols: need(args.cols, "--cols")?,
        },
    };
    let mut graph = generators::generate(&GenSpec { kind, seed: args.seed })
        .map_err(|e| anyhow!("{e}"))?;
    if args.weights {
        generators::assign_weights(&mut graph, args.seed);
    }
    format::write_graph(&args.out, &graph)?;
    println!("nodes={} edges={}", graph.node_count(), graph.edge_count());
    println!("wrote {}", args.out.display());
    Ok(0)
}
