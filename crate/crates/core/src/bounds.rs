//! Empirical checks of the transfer bounds a blocked layout is supposed to
//! guarantee.
//!
//! All checks walk root-to-leaf paths of the copied tree (following
//! adjacency, i.e. parent-to-child descents) and count the distinct aligned
//! blocks the path's node spans touch. The per-region check bounds that
//! count inside every recorded region; the whole-tree check compares it
//! against 4(D+1)/(d+1) where D is the tree depth and d the smallest
//! recorded region depth at that level.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::layout::LayoutResult;
use crate::model::{GraphModel, NodeId, OpCounters};
use crate::{Error, MemoryHierarchy};

/// Exhaustively enumerate paths when the tree has at most this many leaves.
const EXHAUSTIVE_LEAF_LIMIT: u64 = 100_000;
/// Random root-to-leaf walks otherwise.
const SAMPLED_PATHS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionBound {
    pub level: usize,
    /// Largest distinct-block count over all in-region root-to-leaf paths.
    pub max_blocks: u64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathBound {
    pub level: usize,
    /// Smallest subtree depth recorded across this level's regions.
    pub min_depth: u32,
    pub path_bound: f64,
    /// Largest distinct-block count over sampled whole-tree paths.
    pub max_blocks: u64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub level: usize,
    /// Empirical per-region maximum.
    pub max_blocks: u64,
    /// The constant per-region bound.
    pub bound: u64,
    /// Region and whole-path checks both hold.
    pub satisfied: bool,
    pub min_depth: u32,
    pub path_bound: f64,
    /// Empirical whole-path maximum (not part of the CSV).
    pub path_max: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    pub growth_ok: bool,
    pub base_ok: bool,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,max_blocks,bound,satisfied,min_depth,path_bound\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{:.2}\n",
                r.level, r.max_blocks, r.bound, r.satisfied, r.min_depth, r.path_bound
            ));
        }
        out
    }
}

/// One layout run's size and work, for the linear-work check.
#[derive(Debug, Clone, Copy)]
pub struct ComplexityRun {
    pub nodes: u64,
    pub edges: u64,
    /// Queue-list count, hierarchy levels plus one.
    pub levels: u64,
    pub counters: OpCounters,
}

/// Every run's total operations stay within c·(levels·nodes + edges).
pub fn verify_complexity(runs: &[ComplexityRun], c: f64) -> bool {
    runs.iter().all(|r| {
        r.counters.total() as f64 <= c * (r.levels as f64 * r.nodes as f64 + r.edges as f64)
    })
}

/// Each level is at least four times the previous one.
pub fn growth_condition(hierarchy: &MemoryHierarchy) -> bool {
    hierarchy.sizes().windows(2).all(|w| 4 * w[0] <= w[1])
}

/// Growth condition plus the base condition on the sample layout: the widest
/// level-1 region spans fewer level-1 blocks than the level-2 size. The base
/// condition deliberately compares a block count against a byte count; the
/// per-level bounds assume it in exactly that slack form, so it is kept
/// literal. Layouts without recorded regions (unblocked baselines) pass
/// vacuously.
pub fn check_hierarchy_conditions(hierarchy: &MemoryHierarchy, layout: &LayoutResult) -> bool {
    if !growth_condition(hierarchy) {
        return false;
    }
    let sizes = hierarchy.sizes();
    if sizes.len() < 2 || layout.regions.is_empty() {
        return true;
    }
    let s1 = sizes[0];
    let max_span = layout.regions[0]
        .iter()
        .map(|r| (r.end - 1) / s1 - r.start / s1 + 1)
        .max()
        .unwrap_or(0);
    max_span < sizes[1]
}

/// Walks every root-to-leaf path of the subtree `in_scope` carves out of the
/// graph below `root`, tracking the distinct blocks the current path touches
/// at each block size; `at_leaf` sees the per-size counts at every maximal
/// path. Nodes already on the current path are never re-entered, so cyclic
/// inputs terminate.
fn for_each_leaf_path<S, F>(
    graph: &GraphModel,
    layout: &LayoutResult,
    root: NodeId,
    sizes: &[u64],
    in_scope: S,
    mut at_leaf: F,
) where
    S: Fn(NodeId) -> bool,
    F: FnMut(&[usize]),
{
    struct Frame {
        node: NodeId,
        cursor: usize,
        advanced: bool,
        /// Block-stack lengths before this node's spans were pushed.
        bases: Vec<usize>,
    }

    debug_assert!(in_scope(root));
    let mut on_path = vec![false; graph.node_count()];
    let mut stacks: Vec<Vec<u64>> = sizes.iter().map(|_| Vec::new()).collect();
    let mut counts = vec![0usize; sizes.len()];

    let push_node = |node: NodeId, stacks: &mut Vec<Vec<u64>>| -> Vec<usize> {
        let bases: Vec<usize> = stacks.iter().map(Vec::len).collect();
        let start = layout.placement[node];
        let last = start + layout.node_bytes[node] - 1;
        for (i, &s) in sizes.iter().enumerate() {
            for b in start / s..=last / s {
                if !stacks[i].contains(&b) {
                    stacks[i].push(b);
                }
            }
        }
        bases
    };

    let mut frames = Vec::new();
    on_path[root] = true;
    let bases = push_node(root, &mut stacks);
    frames.push(Frame { node: root, cursor: 0, advanced: false, bases });

    while let Some(top) = frames.last_mut() {
        let row = graph.neighbors(top.node);
        let mut child = None;
        while top.cursor < row.len() {
            let c = row[top.cursor];
            top.cursor += 1;
            if in_scope(c) && !on_path[c] {
                child = Some(c);
                break;
            }
        }
        match child {
            Some(c) => {
                top.advanced = true;
                on_path[c] = true;
                let bases = push_node(c, &mut stacks);
                frames.push(Frame { node: c, cursor: 0, advanced: false, bases });
            }
            None => {
                if !top.advanced {
                    for (i, s) in stacks.iter().enumerate() {
                        counts[i] = s.len();
                    }
                    at_leaf(&counts);
                }
                let frame = frames.pop().unwrap();
                on_path[frame.node] = false;
                for (i, base) in frame.bases.into_iter().enumerate() {
                    stacks[i].truncate(base);
                }
            }
        }
    }
}

/// Seeded random root-to-leaf walks, same accounting as the exhaustive walk.
fn sample_leaf_paths<S, F>(
    graph: &GraphModel,
    layout: &LayoutResult,
    root: NodeId,
    sizes: &[u64],
    in_scope: S,
    samples: u64,
    seed: u64,
    mut at_leaf: F,
) where
    S: Fn(NodeId) -> bool,
    F: FnMut(&[usize]),
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; sizes.len()];
    for _ in 0..samples {
        let mut stacks: Vec<Vec<u64>> = sizes.iter().map(|_| Vec::new()).collect();
        let mut path = vec![root];
        let mut node = root;
        loop {
            let start = layout.placement[node];
            let last = start + layout.node_bytes[node] - 1;
            for (i, &s) in sizes.iter().enumerate() {
                for b in start / s..=last / s {
                    if !stacks[i].contains(&b) {
                        stacks[i].push(b);
                    }
                }
            }
            let viable: Vec<NodeId> = graph
                .neighbors(node)
                .iter()
                .copied()
                .filter(|&c| in_scope(c) && !path.contains(&c))
                .collect();
            if viable.is_empty() {
                break;
            }
            node = viable[rng.gen_range(0..viable.len())];
            path.push(node);
        }
        for (i, s) in stacks.iter().enumerate() {
            counts[i] = s.len();
        }
        at_leaf(&counts);
    }
}

/// Leaves reachable from `root` through `in_scope` nodes, entering each node
/// once.
fn count_leaves<S: Fn(NodeId) -> bool>(graph: &GraphModel, root: NodeId, in_scope: S) -> u64 {
    let mut visited = vec![false; graph.node_count()];
    let mut stack = vec![root];
    visited[root] = true;
    let mut leaves = 0;
    while let Some(v) = stack.pop() {
        let mut any = false;
        for &c in graph.neighbors(v) {
            if in_scope(c) {
                any = true;
                if !visited[c] {
                    visited[c] = true;
                    stack.push(c);
                }
            }
        }
        if !any {
            leaves += 1;
        }
    }
    leaves
}

fn max_depth(graph: &GraphModel, root: NodeId) -> u32 {
    let mut visited = vec![false; graph.node_count()];
    let mut stack = vec![(root, 0u32)];
    visited[root] = true;
    let mut deepest = 0;
    while let Some((v, d)) = stack.pop() {
        deepest = deepest.max(d);
        for &c in graph.neighbors(v) {
            if !visited[c] {
                visited[c] = true;
                stack.push((c, d + 1));
            }
        }
    }
    deepest
}

fn require_regions(layout: &LayoutResult, hierarchy: &MemoryHierarchy) -> Result<(), Error> {
    if layout.regions.is_empty() {
        return Err(Error::MissingRegions);
    }
    if layout.regions.len() != hierarchy.levels() {
        return Err(Error::BadParameter(format!(
            "layout records {} region levels but the hierarchy declares {}",
            layout.regions.len(),
            hierarchy.levels()
        )));
    }
    Ok(())
}

/// Checks that within every recorded level-`level` region, no root-to-leaf
/// path of the in-region subtree touches more than four blocks of that
/// level's size.
pub fn verify_region_bound(
    layout: &LayoutResult,
    graph: &GraphModel,
    hierarchy: &MemoryHierarchy,
    level: usize,
) -> Result<RegionBound, Error> {
    require_regions(layout, hierarchy)?;
    if level == 0 || level > hierarchy.levels() {
        return Err(Error::BadParameter(format!("no level {level} in the hierarchy")));
    }
    let block = hierarchy.sizes()[level - 1];
    let mut max_blocks = 0u64;
    for region in &layout.regions[level - 1] {
        let in_scope =
            |v: NodeId| layout.is_placed(v) && region.contains(layout.placement[v]);
        for_each_leaf_path(graph, layout, region.root, &[block], in_scope, |counts| {
            max_blocks = max_blocks.max(counts[0] as u64);
        });
    }
    Ok(RegionBound { level, max_blocks, satisfied: max_blocks <= 4 })
}

/// Walks whole-tree root-to-leaf paths (exhaustively up to
/// `EXHAUSTIVE_LEAF_LIMIT` leaves, sampled beyond) and checks the per-level
/// distinct-block counts against 4(D+1)/(d_i+1).
pub fn verify_path_bound(
    layout: &LayoutResult,
    graph: &GraphModel,
    hierarchy: &MemoryHierarchy,
    seed: u64,
) -> Result<Vec<PathBound>, Error> {
    require_regions(layout, hierarchy)?;
    let root = graph
        .sole_root()
        .ok_or_else(|| Error::BadParameter("whole-tree path check needs a unique root".into()))?;
    let sizes = hierarchy.sizes();
    let in_scope = |v: NodeId| layout.is_placed(v);
    let mut max_blocks = vec![0u64; sizes.len()];
    let record = |counts: &[usize], max_blocks: &mut Vec<u64>| {
        for (m, &c) in max_blocks.iter_mut().zip(counts) {
            *m = (*m).max(c as u64);
        }
    };
    if count_leaves(graph, root, in_scope) <= EXHAUSTIVE_LEAF_LIMIT {
        for_each_leaf_path(graph, layout, root, &sizes, in_scope, |c| {
            record(c, &mut max_blocks)
        });
    } else {
        sample_leaf_paths(graph, layout, root, &sizes, in_scope, SAMPLED_PATHS, seed, |c| {
            record(c, &mut max_blocks)
        });
    }
    let depth = max_depth(graph, root);
    let rows = max_blocks
        .iter()
        .enumerate()
        .map(|(i, &max)| {
            let min_depth = layout.regions[i]
                .iter()
                .map(|r| r.min_subtree_depth)
                .min()
                .unwrap_or(0);
            let path_bound = 4.0 * (depth as f64 + 1.0) / (min_depth as f64 + 1.0);
            PathBound {
                level: i + 1,
                min_depth,
                path_bound,
                max_blocks: max,
                satisfied: max as f64 <= path_bound + 1e-9,
            }
        })
        .collect();
    Ok(rows)
}

/// Largest distinct-block count at one block size over whole-tree
/// root-to-leaf paths, with the same exhaustive-or-sampled rule as
/// [`verify_path_bound`]. Lets a control layout without regions (for example
/// a shuffled one) be measured against a blocked layout's bound.
pub fn max_path_blocks(
    layout: &LayoutResult,
    graph: &GraphModel,
    root: NodeId,
    block_size: u64,
    seed: u64,
) -> u64 {
    let in_scope = |v: NodeId| layout.is_placed(v);
    let mut max = 0u64;
    if count_leaves(graph, root, in_scope) <= EXHAUSTIVE_LEAF_LIMIT {
        for_each_leaf_path(graph, layout, root, &[block_size], in_scope, |c| {
            max = max.max(c[0] as u64)
        });
    } else {
        sample_leaf_paths(graph, layout, root, &[block_size], in_scope, SAMPLED_PATHS, seed, |c| {
            max = max.max(c[0] as u64)
        });
    }
    max
}

/// Per-region consistency of the two-block recurrence: the blocks a path
/// touches at level i+1 inside a level-(i+1) region exceed by at most two
/// the blocks it touches inside any of the nested level-i regions.
pub fn verify_nesting_consistency(
    layout: &LayoutResult,
    graph: &GraphModel,
    hierarchy: &MemoryHierarchy,
) -> Result<bool, Error> {
    require_regions(layout, hierarchy)?;
    let sizes = hierarchy.sizes();
    for upper in 1..hierarchy.levels() {
        let block = sizes[upper];
        for region in &layout.regions[upper] {
            let in_scope =
                |v: NodeId| layout.is_placed(v) && region.contains(layout.placement[v]);
            let mut outer_max = 0u64;
            for_each_leaf_path(graph, layout, region.root, &[block], in_scope, |c| {
                outer_max = outer_max.max(c[0] as u64)
            });
            let mut inner_max = 0u64;
            let mut any_inner = false;
            for inner in &layout.regions[upper - 1] {
                if inner.start < region.start || inner.end > region.end {
                    continue;
                }
                any_inner = true;
                let scope =
                    |v: NodeId| layout.is_placed(v) && inner.contains(layout.placement[v]);
                for_each_leaf_path(graph, layout, inner.root, &[block], scope, |c| {
                    inner_max = inner_max.max(c[0] as u64)
                });
            }
            if any_inner && outer_max > 2 + inner_max {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Region and path bounds at every level, plus the hierarchy conditions.
pub fn verify_all(
    layout: &LayoutResult,
    graph: &GraphModel,
    hierarchy: &MemoryHierarchy,
    seed: u64,
) -> Result<BoundReport, Error> {
    let paths = verify_path_bound(layout, graph, hierarchy, seed)?;
    let mut rows = Vec::with_capacity(paths.len());
    for p in paths {
        let region = verify_region_bound(layout, graph, hierarchy, p.level)?;
        rows.push(BoundRow {
            level: p.level,
            max_blocks: region.max_blocks,
            bound: 4,
            satisfied: region.satisfied && p.satisfied,
            min_depth: p.min_depth,
            path_bound: p.path_bound,
            path_max: p.max_blocks,
        });
    }
    Ok(BoundReport {
        rows,
        growth_ok: growth_condition(hierarchy),
        base_ok: check_hierarchy_conditions(hierarchy, layout),
    })
}
