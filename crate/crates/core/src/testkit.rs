//! Reference implementations and randomized fixtures for tests.
//!
//! Everything here trades speed for obviousness: the blocked-copy oracle is
//! the literal recursive definition (rounds of whole layers, then rounds of
//! whole lower-level applications), the LRU and shortest-path oracles are
//! linear scans. Production code must never depend on this module; it is
//! compiled only under the `testkit` feature, which the crate's own tests
//! enable through a dev-dependency on itself.

use rand::Rng;

use crate::layout::{LayoutOptions, UNPLACED};
use crate::model::{align_up, AccessTrace, Footprints, GraphKind, GraphModel, NodeId};
use crate::sim::SimLevelConfig;
use crate::MemoryHierarchy;

/// Layout computed by the recursive definition. Regions are (start, end,
/// root) byte spans per level, in completion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLayout {
    pub order: Vec<NodeId>,
    pub placement: Vec<u64>,
    pub tospace_end: u64,
    pub regions: Vec<Vec<(u64, u64, NodeId)>>,
}

struct OracleState<'a> {
    graph: &'a GraphModel,
    footprints: &'a Footprints,
    sizes: Vec<u64>,
    align: u64,
    tospace: u64,
    placement: Vec<u64>,
    order: Vec<NodeId>,
    regions: Vec<Vec<(u64, u64, NodeId)>>,
}

impl OracleState<'_> {
    fn place(&mut self, v: NodeId) {
        assert_eq!(self.placement[v], UNPLACED, "oracle copied {v} twice: not a tree");
        let at = align_up(self.tospace, self.align);
        self.placement[v] = at;
        self.order.push(v);
        self.tospace = at + self.footprints.bytes(self.graph, v);
    }

    /// One level-1 application: copy whole layers breadth-first from `o`
    /// until the bytes copied since entry reach the level-1 size; returns
    /// the first uncopied layer.
    fn level1(&mut self, o: NodeId) -> Vec<NodeId> {
        let entry = self.tospace;
        let mut frontier = vec![o];
        loop {
            let mut next = Vec::new();
            for v in frontier {
                self.place(v);
                next.extend_from_slice(self.graph.neighbors(v));
            }
            let done = self.tospace - entry >= self.sizes[0];
            if done || next.is_empty() {
                self.regions[0].push((self.placement[o], self.tospace, o));
                return if done { next } else { Vec::new() };
            }
            frontier = next;
        }
    }

    /// One level-`level` application: rounds of whole level-(level-1)
    /// applications over the current list until the byte budget is spent;
    /// returns the concatenated unconsumed output of the last round.
    fn apply(&mut self, level: usize, o: NodeId) -> Vec<NodeId> {
        if level == 1 {
            return self.level1(o);
        }
        let entry = self.tospace;
        let mut current = vec![o];
        loop {
            let mut out = Vec::new();
            for v in current {
                out.extend(self.apply(level - 1, v));
            }
            let done = self.tospace - entry >= self.sizes[level - 1];
            if done || out.is_empty() {
                self.regions[level - 1].push((self.placement[o], self.tospace, o));
                return if done { out } else { Vec::new() };
            }
            current = out;
        }
    }
}

/// Blocked copy of the tree under `root` by the recursive definition.
pub fn recursive_blocked(
    graph: &GraphModel,
    root: NodeId,
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> OracleLayout {
    let n = hierarchy.levels();
    let mut st = OracleState {
        graph,
        footprints,
        sizes: hierarchy.sizes(),
        align: footprints.align(),
        tospace: opts.base_offset,
        placement: vec![UNPLACED; graph.node_count()],
        order: Vec::new(),
        regions: vec![Vec::new(); n],
    };
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(o) = queue.pop_front() {
        queue.extend(st.apply(n, o));
    }
    OracleLayout {
        order: st.order,
        placement: st.placement,
        tospace_end: st.tospace,
        regions: st.regions,
    }
}

/// Uniform random tree: node i ≥ 1 hangs under a uniform parent in 0..i, so
/// children lists are ascending. 1..=max_nodes nodes.
pub fn random_tree<R: Rng>(rng: &mut R, max_nodes: usize) -> GraphModel {
    let n = rng.gen_range(1..=max_nodes);
    let mut adjacency = vec![Vec::new(); n];
    for i in 1..n {
        adjacency[rng.gen_range(0..i)].push(i);
    }
    GraphModel::new(adjacency, GraphKind::Directed)
}

/// Directed graph with duplicate edges, self loops, shared children, and
/// cycles all permitted; up to three edges per node on average.
pub fn random_general_graph<R: Rng>(rng: &mut R, max_nodes: usize) -> GraphModel {
    let n = rng.gen_range(1..=max_nodes);
    let mut adjacency = vec![Vec::new(); n];
    for _ in 0..rng.gen_range(0..=3 * n) {
        adjacency[rng.gen_range(0..n)].push(rng.gen_range(0..n));
    }
    GraphModel::new(adjacency, GraphKind::Directed)
}

/// Per-node byte sizes drawn uniformly from lo..=hi, alignment 1.
pub fn random_footprints<R: Rng>(rng: &mut R, nodes: usize, lo: u64, hi: u64) -> Footprints {
    Footprints::explicit((0..nodes).map(|_| rng.gen_range(lo..=hi)).collect())
}

/// One- to three-level hierarchy with each level 2..=5 times the previous.
pub fn random_hierarchy<R: Rng>(rng: &mut R) -> MemoryHierarchy {
    let mut sizes = vec![rng.gen_range(24..=96u64)];
    for _ in 1..rng.gen_range(1..=3usize) {
        let prev = *sizes.last().unwrap();
        sizes.push(prev * rng.gen_range(2..=5));
    }
    MemoryHierarchy::new(&sizes).unwrap()
}

/// LRU by linear recency list; front is most recent.
pub fn naive_lru(trace: &AccessTrace, config: &SimLevelConfig) -> (u64, u64) {
    let bs = config.block_size;
    let cap = config.capacity_blocks as usize;
    let mut recency: Vec<u64> = Vec::new();
    let (mut accesses, mut misses) = (0u64, 0u64);
    for a in trace {
        for b in a.offset / bs..=(a.offset + a.len - 1) / bs {
            accesses += 1;
            if let Some(pos) = recency.iter().position(|&x| x == b) {
                recency.remove(pos);
            } else {
                misses += 1;
                if recency.len() == cap {
                    recency.pop();
                }
            }
            recency.insert(0, b);
        }
    }
    (accesses, misses)
}

/// Distinct blocks by enumerating every byte of every access.
pub fn naive_distinct_blocks(trace: &AccessTrace, block_size: u64) -> u64 {
    let mut blocks = std::collections::BTreeSet::new();
    for a in trace {
        for byte in a.offset..a.offset + a.len {
            blocks.insert(byte / block_size);
        }
    }
    blocks.len() as u64
}

/// Shortest path weights by |V|-1 rounds of edge relaxation.
pub fn bellman_ford(graph: &GraphModel, source: NodeId) -> Vec<Option<u64>> {
    let weights = graph.weights.as_ref().expect("needs weights");
    let n = graph.node_count();
    let mut dist: Vec<Option<u64>> = vec![None; n];
    dist[source] = Some(0);
    for _ in 1..n.max(2) {
        let mut changed = false;
        for u in 0..n {
            let Some(du) = dist[u] else { continue };
            for (j, &v) in graph.neighbors(u).iter().enumerate() {
                let nd = du + weights[u][j];
                if dist[v].map_or(true, |cur| nd < cur) {
                    dist[v] = Some(nd);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Nodes reachable from `source` along adjacency.
pub fn reachable_from(graph: &GraphModel, source: NodeId) -> Vec<bool> {
    let mut seen = vec![false; graph.node_count()];
    let mut stack = vec![source];
    seen[source] = true;
    while let Some(v) = stack.pop() {
        for &c in graph.neighbors(v) {
            if !seen[c] {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    seen
}

/// Depth of each node below `root` along adjacency; None if unreachable.
pub fn bfs_depths(graph: &GraphModel, root: NodeId) -> Vec<Option<u32>> {
    let mut depth = vec![None; graph.node_count()];
    depth[root] = Some(0);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let d = depth[v].unwrap();
        for &c in graph.neighbors(v) {
            if depth[c].is_none() {
                depth[c] = Some(d + 1);
                queue.push_back(c);
            }
        }
    }
    depth
}
