//! Traversal workloads over a laid-out graph.
//!
//! Each run produces the workload's logical answers plus an address trace of
//! its graph-node reads against the layout's placements. Answers depend only
//! on the graph, never on the layout, which is what lets the simulator
//! attribute miss-rate differences to the layout alone. Algorithm-internal
//! state (queues, distance arrays) is not traced; an optional flag adds the
//! accesses of a 4-bytes-per-node side array indexed by emission rank, the
//! pattern a remapped property array would show.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::layout::{LayoutResult, UNPLACED};
use crate::model::{align_up, Access, AccessTrace, GraphKind, GraphModel, NodeId};
use crate::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkloadOptions {
    /// Also trace a side array holding 4 bytes per node, indexed by the
    /// node's emission rank and starting at the first page boundary past the
    /// laid-out nodes.
    pub side_array: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answers {
    /// Comparisons below the root for each key lookup.
    QueryDepths(Vec<u32>),
    VisitOrder(Vec<NodeId>),
    /// Shortest-path weight per node; None when unreachable.
    Distances(Vec<Option<u64>>),
}

impl Answers {
    pub fn query_depths(&self) -> &[u32] {
        match self {
            Answers::QueryDepths(d) => d,
            other => panic!("expected query depths, got {other:?}"),
        }
    }

    pub fn visit_order(&self) -> &[NodeId] {
        match self {
            Answers::VisitOrder(v) => v,
            other => panic!("expected visit order, got {other:?}"),
        }
    }

    pub fn distances(&self) -> &[Option<u64>] {
        match self {
            Answers::Distances(d) => d,
            other => panic!("expected distances, got {other:?}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WorkloadResult {
    pub trace: AccessTrace,
    pub answers: Answers,
    /// Graph-node reads in the trace (side-array entries excluded).
    pub nodes_touched: usize,
}

/// Appends node reads (and optional side-array reads) to a trace.
struct Tracer<'a> {
    layout: &'a LayoutResult,
    trace: AccessTrace,
    nodes_touched: usize,
    /// Side-array base and per-node rank, when enabled.
    side: Option<(u64, Vec<u32>)>,
}

impl<'a> Tracer<'a> {
    fn new(layout: &'a LayoutResult, opts: &WorkloadOptions) -> Tracer<'a> {
        let side = opts.side_array.then(|| {
            let base = align_up(layout.tospace_end, 4096);
            let mut rank = vec![0u32; layout.placement.len()];
            for (i, &v) in layout.order.iter().enumerate() {
                rank[v] = i as u32;
            }
            (base, rank)
        });
        Tracer { layout, trace: Vec::new(), nodes_touched: 0, side }
    }

    fn touch(&mut self, node: NodeId) {
        let offset = self.layout.placement[node];
        debug_assert_ne!(offset, UNPLACED, "workload touched an unplaced node");
        self.trace.push(Access { offset, len: self.layout.node_bytes[node] });
        self.nodes_touched += 1;
        if let Some((base, rank)) = &self.side {
            self.trace.push(Access { offset: base + 4 * rank[node] as u64, len: 4 });
        }
    }

    fn finish(self, answers: Answers) -> WorkloadResult {
        WorkloadResult { trace: self.trace, answers, nodes_touched: self.nodes_touched }
    }
}

/// Runs seeded uniform key lookups against a search tree whose keys are the
/// in-order ranks 0..n-1. Every comparison reads one node; the reported depth
/// counts edges walked below the root.
pub fn run_bst_queries(
    graph: &GraphModel,
    layout: &LayoutResult,
    num_queries: usize,
    seed: u64,
    opts: &WorkloadOptions,
) -> Result<WorkloadResult, Error> {
    let keys = graph
        .keys
        .as_ref()
        .ok_or_else(|| Error::IncompatibleWorkload("key lookups need node keys".into()))?;
    let root = graph
        .sole_root()
        .ok_or_else(|| Error::IncompatibleWorkload("search tree needs a unique root".into()))?;
    if graph.adjacency.iter().any(|row| row.len() != 0 && row.len() != 2) {
        return Err(Error::IncompatibleWorkload(
            "search tree nodes need exactly zero or two children".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracer = Tracer::new(layout, opts);
    let keyspace = graph.node_count() as u64;
    let mut depths = Vec::with_capacity(num_queries);
    for _ in 0..num_queries {
        let target = rng.gen_range(0..keyspace);
        let mut node = root;
        let mut depth = 0u32;
        loop {
            tracer.touch(node);
            let key = keys[node];
            if target == key || graph.degree(node) == 0 {
                break;
            }
            node = if target < key { graph.neighbors(node)[0] } else { graph.neighbors(node)[1] };
            depth += 1;
        }
        depths.push(depth);
    }
    Ok(tracer.finish(Answers::QueryDepths(depths)))
}

/// FIFO breadth-first search from `source` over an undirected graph; one
/// node read per visit.
pub fn run_bfs(
    graph: &GraphModel,
    layout: &LayoutResult,
    source: NodeId,
    opts: &WorkloadOptions,
) -> Result<WorkloadResult, Error> {
    if graph.kind != GraphKind::Undirected {
        return Err(Error::IncompatibleWorkload(
            "breadth-first search runs on the symmetrized graph".into(),
        ));
    }
    let mut tracer = Tracer::new(layout, opts);
    let mut visited = vec![false; graph.node_count()];
    let mut queue = VecDeque::new();
    let mut order = Vec::new();
    visited[source] = true;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        tracer.touch(v);
        order.push(v);
        for &c in graph.neighbors(v) {
            if !visited[c] {
                visited[c] = true;
                queue.push_back(c);
            }
        }
    }
    Ok(tracer.finish(Answers::VisitOrder(order)))
}

/// Dijkstra from `source` with a binary heap; ties settle the smaller node
/// id first. Reads one node at each settle and one per relaxed neighbor.
pub fn run_sssp(
    graph: &GraphModel,
    layout: &LayoutResult,
    source: NodeId,
    opts: &WorkloadOptions,
) -> Result<WorkloadResult, Error> {
    let weights = graph
        .weights
        .as_ref()
        .ok_or_else(|| Error::IncompatibleWorkload("shortest paths need edge weights".into()))?;
    let mut tracer = Tracer::new(layout, opts);
    let n = graph.node_count();
    let mut dist: Vec<Option<u64>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        tracer.touch(u);
        for (j, &v) in graph.neighbors(u).iter().enumerate() {
            tracer.touch(v);
            let nd = d + weights[u][j];
            if dist[v].map_or(true, |cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    Ok(tracer.finish(Answers::Distances(dist)))
}
