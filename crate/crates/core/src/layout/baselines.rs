//! Comparison layouts: the orders a collector, an allocator, or a
//! cache-oblivious scheme would produce.

use std::collections::VecDeque;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{LayoutOptions, LayoutResult, UNPLACED};
use crate::model::{align_up, Footprints, GraphModel, NodeId, OpCounters};
use crate::Error;

/// Assigns consecutive offsets to `order` and wraps up the result.
fn pack(
    graph: &GraphModel,
    footprints: &Footprints,
    opts: &LayoutOptions,
    order: Vec<NodeId>,
    mut counters: OpCounters,
) -> LayoutResult {
    let count = graph.node_count();
    let node_bytes: Vec<u64> = (0..count).map(|v| footprints.bytes(graph, v)).collect();
    let align = footprints.align();
    let mut placement = vec![UNPLACED; count];
    let mut tospace = opts.base_offset;
    for &v in &order {
        let offset = align_up(tospace, align);
        placement[v] = offset;
        tospace = offset + node_bytes[v];
    }
    counters.copies = order.len() as u64;
    LayoutResult {
        placement,
        order,
        node_bytes,
        tospace_end: tospace,
        base_offset: opts.base_offset,
        regions: Vec::new(),
        counters,
    }
}

pub(super) fn bfs(
    graph: &GraphModel,
    root_slots: &[NodeId],
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> LayoutResult {
    let mut counters = OpCounters::default();
    let mut visited = vec![false; graph.node_count()];
    let mut queue = VecDeque::new();
    for &r in root_slots {
        if !visited[r] {
            visited[r] = true;
            queue.push_back(r);
            counters.queue_pushes += 1;
        }
    }
    let mut order = Vec::new();
    while let Some(v) = queue.pop_front() {
        counters.queue_pops += 1;
        order.push(v);
        for &c in graph.neighbors(v) {
            if !visited[c] {
                visited[c] = true;
                queue.push_back(c);
                counters.queue_pushes += 1;
            }
        }
    }
    pack(graph, footprints, opts, order, counters)
}

pub(super) fn dfs(
    graph: &GraphModel,
    root_slots: &[NodeId],
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> LayoutResult {
    let mut counters = OpCounters::default();
    let mut visited = vec![false; graph.node_count()];
    let mut stack = Vec::new();
    let mut order = Vec::new();
    for &r in root_slots {
        stack.push(r);
        counters.queue_pushes += 1;
        while let Some(v) = stack.pop() {
            counters.queue_pops += 1;
            if visited[v] {
                continue;
            }
            visited[v] = true;
            order.push(v);
            // First child on top of the stack so preorder visits it next.
            for &c in graph.neighbors(v).iter().rev() {
                if !visited[c] {
                    stack.push(c);
                    counters.queue_pushes += 1;
                }
            }
        }
    }
    pack(graph, footprints, opts, order, counters)
}

pub(super) fn pseudorandom(
    graph: &GraphModel,
    root_slots: &[NodeId],
    seed: u64,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> LayoutResult {
    let mut reachable = vec![false; graph.node_count()];
    let mut queue: VecDeque<NodeId> = VecDeque::new();
    for &r in root_slots {
        if !reachable[r] {
            reachable[r] = true;
            queue.push_back(r);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &c in graph.neighbors(v) {
            if !reachable[c] {
                reachable[c] = true;
                queue.push_back(c);
            }
        }
    }
    let mut order: Vec<NodeId> =
        (0..graph.node_count()).filter(|&v| reachable[v]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    pack(graph, footprints, opts, order, OpCounters::default())
}

pub(super) fn veb(
    graph: &GraphModel,
    root: NodeId,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    let n = graph.node_count();
    // Heap-shaped complete binary tree rooted at 0: children of i at 2i+1
    // and 2i+2, every level full.
    if root != 0 || n == 0 || !(n + 1).is_power_of_two() {
        return Err(Error::NotCompleteBinary);
    }
    for i in 0..n {
        let (l, r) = (2 * i + 1, 2 * i + 2);
        let row = graph.neighbors(i);
        let ok = if r < n { row.len() == 2 && row[0] == l && row[1] == r } else { row.is_empty() };
        if !ok {
            return Err(Error::NotCompleteBinary);
        }
    }
    let levels = (n + 1).trailing_zeros();
    let mut order = Vec::with_capacity(n);
    recurse(&mut order, 0, levels);
    Ok(pack(graph, footprints, opts, order, OpCounters::default()))
}

/// Emits the top floor(levels/2) levels under `root` (recursively), then each
/// subtree hanging off that top block, left to right.
fn recurse(out: &mut Vec<NodeId>, root: NodeId, levels: u32) {
    if levels == 1 {
        out.push(root);
        return;
    }
    let top = levels / 2;
    recurse(out, root, top);
    let first = ((root + 1) << top) - 1;
    for below in first..first + (1usize << top) {
        recurse(out, below, levels - top);
    }
}

pub(super) fn identity(
    graph: &GraphModel,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> LayoutResult {
    let order = (0..graph.node_count()).collect();
    pack(graph, footprints, opts, order, OpCounters::default())
}
