//! Layout engines: copy a graph into a fresh address space in a chosen order.
//!
//! The three hierarchy-blocked engines (`hb_tree`, `hba_two_pass`,
//! `hb_one_pass`) emit nodes so that every declared block size gets locality
//! at once; the rest are comparison baselines. All engines share the
//! [`LayoutResult`] shape: per-node byte offsets, the emission order, and (for
//! the blocked engines) the per-level region structure that the transfer-bound
//! checkers consume.

mod baselines;
mod engine;
mod one_pass;

use crate::hierarchy::MemoryHierarchy;
use crate::model::{Footprints, GraphModel, NodeId, OpCounters};
use crate::Error;

/// Placement sentinel for nodes no root slot reaches.
pub const UNPLACED: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayoutAlgo {
    /// Blocked layout for trees, single root, unconditional copies.
    HbTree,
    /// Blocked layout for arbitrary graphs: forwarding pass plus a copy pass.
    HbaTwoPass,
    /// Blocked layout for arbitrary graphs in one pass over slot groups.
    HbOnePass,
    Bfs,
    Dfs,
    Pseudorandom(u64),
    Veb,
    /// Nodes stay in id order (the layout an allocator-order heap would have).
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutOptions {
    /// First byte of the target address space.
    pub base_offset: u64,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions { base_offset: 0 }
    }
}

/// One span of the output produced by a single application of the blocking
/// step at some level: the bytes `[start, end)` hold a subtree chunk grown
/// from `root`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub start: u64,
    pub end: u64,
    /// First node copied into the region.
    pub root: NodeId,
    /// Depth the region covers below `root`: the shallowest copied node with a
    /// child outside the region, or the deepest copied node when the whole
    /// remaining subtree fit.
    pub min_subtree_depth: u32,
}

impl Region {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, offset: u64) -> bool {
        offset >= self.start && offset < self.end
    }
}

#[derive(Debug, Clone)]
pub struct LayoutResult {
    /// Byte offset per node id; `UNPLACED` when unreached.
    pub placement: Vec<u64>,
    /// Node ids in emission order (reached nodes only, offsets increasing).
    pub order: Vec<NodeId>,
    /// Footprint per node id, placed or not.
    pub node_bytes: Vec<u64>,
    /// One past the last written byte.
    pub tospace_end: u64,
    pub base_offset: u64,
    /// `regions[i]` lists the level-`i+1` regions in address order; empty for
    /// layouts with no hierarchy.
    pub regions: Vec<Vec<Region>>,
    pub counters: OpCounters,
}

impl LayoutResult {
    pub fn is_placed(&self, node: NodeId) -> bool {
        self.placement[node] != UNPLACED
    }

    pub fn placed_count(&self) -> usize {
        self.order.len()
    }
}

/// Copies the graph with blocking for every level of `hierarchy`, treating it
/// as a tree rooted at `root`. Fails with `NotATree` when any node is reached
/// twice.
pub fn hb_tree(
    graph: &GraphModel,
    root: NodeId,
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    validate_inputs(graph, &[root], footprints)?;
    engine::run_tree(graph, root, hierarchy, footprints, opts)
}

/// Blocked copy of an arbitrary graph: a forwarding pass decides every
/// placement, then a completion pass re-walks the slots and moves the bytes.
pub fn hba_two_pass(
    graph: &GraphModel,
    root_slots: &[NodeId],
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    validate_inputs(graph, root_slots, footprints)?;
    engine::run_two_pass(graph, root_slots, hierarchy, footprints, opts)
}

/// Blocked copy of an arbitrary graph in a single pass: the work queues hold
/// already-copied parents standing in for their child slots, and each slot is
/// popped exactly once.
pub fn hb_one_pass(
    graph: &GraphModel,
    root_slots: &[NodeId],
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    validate_inputs(graph, root_slots, footprints)?;
    one_pass::run(graph, root_slots, hierarchy, footprints, opts)
}

/// Level-order copy from the root slots.
pub fn bfs(
    graph: &GraphModel,
    root_slots: &[NodeId],
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    validate_inputs(graph, root_slots, footprints)?;
    Ok(baselines::bfs(graph, root_slots, footprints, opts))
}

/// Preorder copy, first child first.
pub fn dfs(
    graph: &GraphModel,
    root_slots: &[NodeId],
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    validate_inputs(graph, root_slots, footprints)?;
    Ok(baselines::dfs(graph, root_slots, footprints, opts))
}

/// Uniformly shuffled copy order over the nodes reachable from the root
/// slots.
pub fn pseudorandom(
    graph: &GraphModel,
    root_slots: &[NodeId],
    seed: u64,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    validate_inputs(graph, root_slots, footprints)?;
    Ok(baselines::pseudorandom(graph, root_slots, seed, footprints, opts))
}

/// Recursive cache-oblivious layout for complete binary trees: a tree of l
/// levels emits its top floor(l/2) levels (recursively), then each subtree
/// hanging below, left to right.
pub fn veb(
    graph: &GraphModel,
    root: NodeId,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    validate_inputs(graph, &[root], footprints)?;
    baselines::veb(graph, root, footprints, opts)
}

/// Copies every node in id order.
pub fn identity(
    graph: &GraphModel,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    validate_inputs(graph, &[], footprints)?;
    Ok(baselines::identity(graph, footprints, opts))
}

pub fn run(
    algo: LayoutAlgo,
    graph: &GraphModel,
    root_slots: &[NodeId],
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    let single_root = || {
        root_slots
            .first()
            .copied()
            .ok_or_else(|| Error::BadParameter("layout needs a root".into()))
    };
    match algo {
        LayoutAlgo::HbTree => hb_tree(graph, single_root()?, hierarchy, footprints, opts),
        LayoutAlgo::HbaTwoPass => hba_two_pass(graph, root_slots, hierarchy, footprints, opts),
        LayoutAlgo::HbOnePass => hb_one_pass(graph, root_slots, hierarchy, footprints, opts),
        LayoutAlgo::Bfs => bfs(graph, root_slots, footprints, opts),
        LayoutAlgo::Dfs => dfs(graph, root_slots, footprints, opts),
        LayoutAlgo::Pseudorandom(seed) => {
            pseudorandom(graph, root_slots, seed, footprints, opts)
        }
        LayoutAlgo::Veb => veb(graph, single_root()?, footprints, opts),
        LayoutAlgo::Identity => identity(graph, footprints, opts),
    }
}

/// Renumbers nodes into emission order: placed nodes take their order rank,
/// unplaced nodes follow in id order. Returns the renumbered graph and the
/// old-id to new-id map.
pub fn remap_graph(graph: &GraphModel, result: &LayoutResult) -> (GraphModel, Vec<NodeId>) {
    let n = graph.node_count();
    let mut map = vec![usize::MAX; n];
    for (rank, &v) in result.order.iter().enumerate() {
        map[v] = rank;
    }
    let mut next = result.order.len();
    for old in 0..n {
        if map[old] == usize::MAX {
            map[old] = next;
            next += 1;
        }
    }
    let mut adjacency = vec![Vec::new(); n];
    let mut weights = graph.weights.as_ref().map(|_| vec![Vec::new(); n]);
    let mut keys = graph.keys.as_ref().map(|_| vec![0u64; n]);
    for old in 0..n {
        let new = map[old];
        adjacency[new] = graph.adjacency[old].iter().map(|&v| map[v]).collect();
        if let (Some(dst), Some(src)) = (&mut weights, &graph.weights) {
            dst[new] = src[old].clone();
        }
        if let (Some(dst), Some(src)) = (&mut keys, &graph.keys) {
            dst[new] = src[old];
        }
    }
    (GraphModel { adjacency, weights, kind: graph.kind, keys }, map)
}

fn validate_inputs(
    graph: &GraphModel,
    root_slots: &[NodeId],
    footprints: &Footprints,
) -> Result<(), Error> {
    for (index, &node) in root_slots.iter().enumerate() {
        if node >= graph.node_count() {
            return Err(Error::UnreachableRootSlot { index, node });
        }
    }
    if let Footprints::Explicit { sizes, align } = footprints {
        if sizes.len() != graph.node_count() {
            return Err(Error::BadParameter(format!(
                "{} explicit sizes for {} nodes",
                sizes.len(),
                graph.node_count()
            )));
        }
        if sizes.iter().any(|&s| s == 0) || *align == 0 {
            return Err(Error::BadParameter("footprints must be positive".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GraphKind, SizeModel};

    /// The seven-node example tree: 0 -> {1, 2}, 1 -> {3, 4}, 2 -> {5, 6}.
    fn example_tree() -> GraphModel {
        GraphModel::new(
            vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![], vec![], vec![], vec![]],
            GraphKind::Directed,
        )
    }

    fn fixed(bytes: u64) -> Footprints {
        Footprints::Model(SizeModel::fixed(bytes))
    }

    fn h(sizes: &[u64]) -> MemoryHierarchy {
        MemoryHierarchy::new(sizes).unwrap()
    }

    #[test]
    fn tree_blocked_order_and_boundary() {
        // One 48-byte level over 16-byte nodes: the first region holds the
        // root and its two children, then each grandchild starts a subtree
        // region of its own.
        let g = example_tree();
        let r = hb_tree(&g, 0, &h(&[48]), &fixed(16), &LayoutOptions::default()).unwrap();
        assert_eq!(r.order, vec![0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(r.tospace_end, 112);
        let l1 = &r.regions[0];
        assert_eq!(l1.len(), 5);
        assert_eq!((l1[0].start, l1[0].end, l1[0].root), (0, 48, 0));
        assert_eq!(l1[0].min_subtree_depth, 1);
        for (i, reg) in l1[1..].iter().enumerate() {
            assert_eq!(reg.root, 3 + i);
            assert_eq!(reg.len(), 16);
            assert_eq!(reg.min_subtree_depth, 0);
        }
    }

    #[test]
    fn tree_single_node() {
        let g = GraphModel::new(vec![vec![]], GraphKind::Directed);
        let r = hb_tree(&g, 0, &h(&[64]), &fixed(16), &LayoutOptions::default()).unwrap();
        assert_eq!(r.order, vec![0]);
        assert_eq!(r.regions[0].len(), 1);
        assert_eq!(r.regions[0][0].min_subtree_depth, 0);
        assert!(r.counters.queue_pushes <= 2);
    }

    #[test]
    fn tree_rejects_shared_child() {
        // Diamond: 3 is reachable through both 1 and 2.
        let g = GraphModel::new(
            vec![vec![1, 2], vec![3], vec![3], vec![]],
            GraphKind::Directed,
        );
        let err = hb_tree(&g, 0, &h(&[64]), &fixed(16), &LayoutOptions::default()).unwrap_err();
        assert_eq!(err, Error::NotATree { node: 3 });
    }

    #[test]
    fn two_pass_diamond_places_once() {
        let g = GraphModel::new(
            vec![vec![1, 2], vec![3], vec![3], vec![]],
            GraphKind::Directed,
        );
        let r =
            hba_two_pass(&g, &[0], &h(&[1000]), &fixed(16), &LayoutOptions::default()).unwrap();
        assert_eq!(r.order, vec![0, 1, 2, 3]);
        assert_eq!(r.placement[3], 48);
    }

    #[test]
    fn two_pass_cycle_terminates() {
        let g = GraphModel::new(vec![vec![1], vec![0]], GraphKind::Directed);
        let r =
            hba_two_pass(&g, &[0], &h(&[1000]), &fixed(16), &LayoutOptions::default()).unwrap();
        assert_eq!(r.order, vec![0, 1]);
    }

    #[test]
    fn one_pass_matches_tree_on_example() {
        let g = example_tree();
        let opts = LayoutOptions::default();
        let t = hb_tree(&g, 0, &h(&[48]), &fixed(16), &opts).unwrap();
        let o = hb_one_pass(&g, &[0], &h(&[48]), &fixed(16), &opts).unwrap();
        assert_eq!(t.order, o.order);
        assert_eq!(t.placement, o.placement);
        assert_eq!(
            t.regions[0].iter().map(|r| (r.start, r.end, r.root)).collect::<Vec<_>>(),
            o.regions[0].iter().map(|r| (r.start, r.end, r.root)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn one_pass_isolated_node() {
        let g = GraphModel::new(vec![vec![]], GraphKind::Directed);
        let r = hb_one_pass(&g, &[0], &h(&[64]), &fixed(16), &LayoutOptions::default()).unwrap();
        assert_eq!(r.order, vec![0]);
    }

    #[test]
    fn unreached_nodes_stay_unplaced() {
        let g = GraphModel::new(vec![vec![1], vec![], vec![]], GraphKind::Directed);
        let r =
            hba_two_pass(&g, &[0], &h(&[64]), &fixed(16), &LayoutOptions::default()).unwrap();
        assert!(r.is_placed(0) && r.is_placed(1));
        assert!(!r.is_placed(2));
        assert_eq!(r.placed_count(), 2);
    }

    #[test]
    fn second_root_slot_covers_other_component() {
        let g = GraphModel::new(vec![vec![1], vec![], vec![]], GraphKind::Directed);
        let r =
            hba_two_pass(&g, &[0, 2, 0], &h(&[64]), &fixed(16), &LayoutOptions::default())
                .unwrap();
        assert_eq!(r.order, vec![0, 1, 2]);
        let o = hb_one_pass(&g, &[0, 2, 0], &h(&[64]), &fixed(16), &LayoutOptions::default())
            .unwrap();
        assert_eq!(o.order, r.order);
        assert_eq!(o.placement, r.placement);
    }

    #[test]
    fn bfs_and_dfs_orders() {
        let g = example_tree();
        let opts = LayoutOptions::default();
        let b = bfs(&g, &[0], &fixed(16), &opts).unwrap();
        assert_eq!(b.order, vec![0, 1, 2, 3, 4, 5, 6]);
        let d = dfs(&g, &[0], &fixed(16), &opts).unwrap();
        assert_eq!(d.order, vec![0, 1, 3, 4, 2, 5, 6]);
        assert!(b.regions.is_empty() && d.regions.is_empty());
    }

    #[test]
    fn pseudorandom_is_seeded_permutation() {
        let g = example_tree();
        let opts = LayoutOptions::default();
        let a = pseudorandom(&g, &[0], 9, &fixed(16), &opts).unwrap();
        let b = pseudorandom(&g, &[0], 9, &fixed(16), &opts).unwrap();
        assert_eq!(a.order, b.order);
        let mut sorted = a.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..7).collect::<Vec<_>>());
        let single = GraphModel::new(vec![vec![]], GraphKind::Directed);
        let s = pseudorandom(&single, &[0], 1, &fixed(16), &opts).unwrap();
        assert_eq!(s.order, vec![0]);
    }

    #[test]
    fn veb_frozen_orders() {
        let opts = LayoutOptions::default();
        let g3 = crate::generators::gen_kary_tree(3, 2).unwrap();
        assert_eq!(veb(&g3, 0, &fixed(16), &opts).unwrap().order, vec![0, 1, 2]);
        let g7 = crate::generators::gen_kary_tree(7, 2).unwrap();
        assert_eq!(veb(&g7, 0, &fixed(16), &opts).unwrap().order, vec![0, 1, 3, 4, 2, 5, 6]);
        let g15 = crate::generators::gen_kary_tree(15, 2).unwrap();
        assert_eq!(
            veb(&g15, 0, &fixed(16), &opts).unwrap().order,
            vec![0, 1, 2, 3, 7, 8, 4, 9, 10, 5, 11, 12, 6, 13, 14]
        );
    }

    #[test]
    fn veb_rejects_incomplete_trees() {
        let opts = LayoutOptions::default();
        let g6 = crate::generators::gen_kary_tree(6, 2).unwrap();
        assert_eq!(veb(&g6, 0, &fixed(16), &opts).unwrap_err(), Error::NotCompleteBinary);
        let g = GraphModel::new(vec![vec![2, 1], vec![], vec![]], GraphKind::Directed);
        assert_eq!(veb(&g, 0, &fixed(16), &opts).unwrap_err(), Error::NotCompleteBinary);
    }

    #[test]
    fn identity_keeps_ids() {
        let g = example_tree();
        let r = identity(&g, &fixed(16), &LayoutOptions::default()).unwrap();
        assert_eq!(r.order, (0..7).collect::<Vec<_>>());
        assert_eq!(r.placement[4], 64);
    }

    #[test]
    fn base_offset_shifts_everything() {
        let g = example_tree();
        let opts = LayoutOptions { base_offset: 4096 };
        let r = hb_tree(&g, 0, &h(&[48]), &fixed(16), &opts).unwrap();
        assert_eq!(r.placement[0], 4096);
        assert_eq!(r.regions[0][0].start, 4096);
        assert_eq!(r.tospace_end, 4096 + 112);
        assert_eq!(r.base_offset, 4096);
    }

    #[test]
    fn rejects_bad_root_slot() {
        let g = example_tree();
        let err = hba_two_pass(&g, &[0, 99], &h(&[48]), &fixed(16), &LayoutOptions::default())
            .unwrap_err();
        assert_eq!(err, Error::UnreachableRootSlot { index: 1, node: 99 });
    }

    #[test]
    fn nested_levels_partition() {
        // Two levels: every level-1 region must sit inside one level-2 region.
        let g = crate::generators::gen_kary_tree(100, 3).unwrap();
        let r = hb_tree(&g, 0, &h(&[64, 256]), &fixed(24), &LayoutOptions::default()).unwrap();
        assert_eq!(r.regions.len(), 2);
        for r1 in &r.regions[0] {
            let holders = r.regions[1]
                .iter()
                .filter(|r2| r2.start <= r1.start && r1.end <= r2.end)
                .count();
            assert_eq!(holders, 1, "level-1 region {r1:?} not nested exactly once");
        }
        // Regions are address-ordered and disjoint at each level.
        for level in &r.regions {
            for pair in level.windows(2) {
                assert!(pair[0].end <= pair[1].start);
            }
        }
    }

    #[test]
    fn remap_orders_by_emission() {
        let g = example_tree();
        let r = dfs(&g, &[0], &fixed(16), &LayoutOptions::default()).unwrap();
        let (remapped, map) = remap_graph(&g, &r);
        assert_eq!(map, vec![0, 1, 4, 2, 3, 5, 6]);
        assert_eq!(remapped.adjacency[0], vec![1, 4]);
        assert_eq!(remapped.adjacency[1], vec![2, 3]);
        assert_eq!(remapped.adjacency[4], vec![5, 6]);
    }

    #[test]
    fn dispatcher_covers_all_variants() {
        let g = example_tree();
        let hier = h(&[48]);
        let f = fixed(16);
        let opts = LayoutOptions::default();
        for algo in [
            LayoutAlgo::HbTree,
            LayoutAlgo::HbaTwoPass,
            LayoutAlgo::HbOnePass,
            LayoutAlgo::Bfs,
            LayoutAlgo::Dfs,
            LayoutAlgo::Pseudorandom(5),
            LayoutAlgo::Veb,
            LayoutAlgo::Identity,
        ] {
            let r = run(algo, &g, &[0], &hier, &f, &opts).unwrap();
            assert_eq!(r.placed_count(), 7, "{algo:?} placed too few nodes");
        }
    }
}
