//! Shared blocking state plus the node-queue engine.
//!
//! The loop structure is the same at every level: when the current level's
//! root queue drains, refill it from the leaf queue; promote everything one
//! level up once the level's byte budget is spent; otherwise pop work and
//! either push it one level down or copy it. Level n+1 has an unlimited
//! budget, so reaching it with nothing queued means the traversal is done.
//!
//! Byte accounting rolls upward at promotes (`space[level+1] += space[level]`,
//! then zero the lower level). Zeroing at the roll instead of on push-down
//! keeps one invariant that the rest of this module leans on: every level
//! below the current one always reads zero, so budgets never double-count
//! bytes that already rolled up, and a fresh root slot always starts with
//! clean budgets.

use std::collections::VecDeque;

use super::{LayoutOptions, LayoutResult, Region, UNPLACED};
use crate::hierarchy::MemoryHierarchy;
use crate::model::{align_up, Footprints, GraphModel, NodeId, OpCounters};
use crate::Error;

/// Placement, byte budgets, region bookkeeping, and counters common to the
/// blocked engines. Levels are 1-based to match the queue discipline; index 0
/// is unused.
pub(super) struct Core<'a> {
    pub graph: &'a GraphModel,
    /// Hierarchy levels (the queue arrays run to n + 1).
    pub n: usize,
    /// sizes[1..=n] from the hierarchy; sizes[n+1] stands in for infinity.
    sizes: Vec<u64>,
    pub space: Vec<u64>,
    align: u64,
    pub placement: Vec<u64>,
    pub order: Vec<NodeId>,
    node_bytes: Vec<u64>,
    tospace: u64,
    base_offset: u64,
    pub counters: OpCounters,
    /// Node that discovered each copied node; None for root-slot copies.
    parent: Vec<Option<NodeId>>,
    /// Per level 1..=n: start offset and root of the region being filled.
    open: Vec<Option<(u64, NodeId)>>,
    regions: Vec<Vec<Region>>,
}

impl<'a> Core<'a> {
    pub fn new(
        graph: &'a GraphModel,
        hierarchy: &MemoryHierarchy,
        footprints: &Footprints,
        opts: &LayoutOptions,
    ) -> Core<'a> {
        let n = hierarchy.levels();
        let count = graph.node_count();
        let mut sizes = vec![0u64; n + 2];
        for i in 1..=n {
            sizes[i] = hierarchy.block_size(i);
        }
        sizes[n + 1] = u64::MAX;
        Core {
            graph,
            n,
            sizes,
            space: vec![0; n + 2],
            align: footprints.align(),
            placement: vec![UNPLACED; count],
            order: Vec::new(),
            node_bytes: (0..count).map(|v| footprints.bytes(graph, v)).collect(),
            tospace: opts.base_offset,
            base_offset: opts.base_offset,
            counters: OpCounters::default(),
            parent: vec![None; count],
            open: vec![None; n + 1],
            regions: vec![Vec::new(); n],
        }
    }

    pub fn size_limit(&self, level: usize) -> u64 {
        self.sizes[level]
    }

    pub fn is_placed(&self, node: NodeId) -> bool {
        self.placement[node] != UNPLACED
    }

    /// Forwards `node` to the next free offset. Opens a region at every level
    /// that has none in progress; alignment padding is charged to the copy.
    pub fn place(&mut self, node: NodeId, parent: Option<NodeId>) {
        assert_eq!(self.placement[node], UNPLACED, "node {node} forwarded twice");
        let offset = align_up(self.tospace, self.align);
        let pad = offset - self.tospace;
        let size = self.node_bytes[node];
        self.placement[node] = offset;
        self.tospace = offset + size;
        self.order.push(node);
        self.parent[node] = parent;
        self.counters.copies += 1;
        self.space[1] += pad + size;
        for level in 1..=self.n {
            if self.open[level].is_none() {
                self.open[level] = Some((offset, node));
            }
        }
    }

    /// Promotes `level`'s byte total to the level above and closes the region
    /// the level was filling.
    pub fn roll(&mut self, level: usize) {
        debug_assert!(level <= self.n);
        self.space[level + 1] += self.space[level];
        self.space[level] = 0;
        if let Some((start, root)) = self.open[level].take() {
            self.regions[level - 1].push(Region {
                start,
                end: self.tospace,
                root,
                min_subtree_depth: 0,
            });
        }
    }

    /// Depth computation plus the complexity-bound assertions, producing the
    /// final result. `root_count` is the number of root slots driven.
    pub fn finalize(mut self, root_count: usize) -> LayoutResult {
        debug_assert!(self.open.iter().all(Option::is_none), "unclosed region");
        let count = self.graph.node_count();
        for level in 1..=self.n {
            let regs = &mut self.regions[level - 1];
            if regs.is_empty() {
                continue;
            }
            // Emission order is offset order, so regions index into it as
            // consecutive runs.
            let mut depth = vec![0u32; count];
            let mut region_of = vec![usize::MAX; count];
            let mut r = 0;
            for &v in &self.order {
                let off = self.placement[v];
                while off >= regs[r].end {
                    r += 1;
                }
                debug_assert!(off >= regs[r].start);
                region_of[v] = r;
                depth[v] = if regs[r].root == v {
                    0
                } else {
                    // Every non-root copy was discovered from inside the same
                    // region: frontiers promoted out of a region root regions
                    // of their own.
                    let p = self.parent[v].expect("copy without discoverer");
                    debug_assert_eq!(region_of[p], r, "discoverer left region at level {level}");
                    depth[p] + 1
                };
            }
            let mut min_frontier = vec![u32::MAX; regs.len()];
            let mut max_depth = vec![0u32; regs.len()];
            for &v in &self.order {
                let r = region_of[v];
                max_depth[r] = max_depth[r].max(depth[v]);
                let exits = self.graph.neighbors(v).iter().any(|&c| {
                    let off = self.placement[c];
                    off == UNPLACED || !regs[r].contains(off)
                });
                if exits {
                    min_frontier[r] = min_frontier[r].min(depth[v]);
                }
            }
            for (k, reg) in regs.iter_mut().enumerate() {
                reg.min_subtree_depth =
                    if min_frontier[k] == u32::MAX { max_depth[k] } else { min_frontier[k] };
            }
        }
        let lists = (self.n + 1) as u64;
        assert_eq!(self.counters.copies as usize, self.order.len());
        assert!(self.counters.copies as usize <= count);
        assert!(
            self.counters.queue_pushes <= lists * count as u64,
            "queue pushes {} exceed {} lists x {} nodes",
            self.counters.queue_pushes,
            lists,
            count
        );
        assert!(
            self.counters.slot_visits
                <= (self.graph.total_entries() + root_count) as u64,
            "slot visits {} exceed slot population",
            self.counters.slot_visits
        );
        LayoutResult {
            placement: self.placement,
            order: self.order,
            node_bytes: self.node_bytes,
            tospace_end: self.tospace,
            base_offset: self.base_offset,
            regions: self.regions,
            counters: self.counters,
        }
    }
}

enum Mode {
    /// Copy unconditionally; reaching a node twice is an input error.
    Tree,
    /// Forward at most once; occurrences of an already-forwarded node are
    /// popped as dead entries at level 1.
    Conditional,
}

/// Queued occurrence of a node together with the node that discovered it.
/// A node can be queued once per discovery; whichever occurrence reaches
/// level 1 first performs the copy, so the discoverer must travel with the
/// occurrence rather than live in a per-node array.
type Entry = (NodeId, Option<NodeId>);

struct NodeEngine<'a> {
    core: Core<'a>,
    roots: Vec<VecDeque<Entry>>,
    leaves: Vec<VecDeque<Entry>>,
    /// First-discovery marks: they gate the push counter (repeat occurrences
    /// are already in flight, so only the first one counts as new work) and in
    /// Tree mode a second discovery is the error signal.
    enqueued: Vec<bool>,
    mode: Mode,
}

impl<'a> NodeEngine<'a> {
    fn new(core: Core<'a>, mode: Mode) -> Self {
        let lists = core.n + 2;
        let count = core.graph.node_count();
        NodeEngine {
            core,
            roots: vec![VecDeque::new(); lists],
            leaves: vec![VecDeque::new(); lists],
            enqueued: vec![false; count],
            mode,
        }
    }

    /// Runs the level loop until the top level drains.
    fn drive(&mut self, start_level: usize) -> Result<(), Error> {
        let top = self.core.n + 1;
        let mut level = start_level;
        loop {
            if self.roots[level].is_empty() {
                std::mem::swap(&mut self.roots[level], &mut self.leaves[level]);
                if level < top && self.core.space[level] >= self.core.size_limit(level) {
                    // Promotion splices the whole list and is not a re-push.
                    let mut promoted = std::mem::take(&mut self.roots[level]);
                    self.leaves[level + 1].append(&mut promoted);
                    self.core.roll(level);
                    level += 1;
                    continue;
                }
            }
            if self.roots[level].is_empty() {
                if level == top {
                    return Ok(());
                }
                self.core.roll(level);
                level += 1;
                continue;
            }
            let entry = self.roots[level].pop_front().expect("checked non-empty");
            self.core.counters.queue_pops += 1;
            if level > 1 {
                self.roots[level - 1].push_back(entry);
                level -= 1;
            } else if self.core.is_placed(entry.0) {
                // Dead occurrence: an earlier occurrence already copied the
                // node. It descended to level 1 contributing no bytes, so the
                // skip leaves budgets and regions untouched.
                debug_assert!(matches!(self.mode, Mode::Conditional));
            } else {
                self.copy_step(entry)?;
            }
        }
    }

    /// One unit of level-1 work: copy the node and queue its children.
    fn copy_step(&mut self, (node, parent): Entry) -> Result<(), Error> {
        self.core.place(node, parent);
        let graph = self.core.graph;
        for &child in graph.neighbors(node) {
            if self.enqueued[child] {
                if let Mode::Tree = self.mode {
                    return Err(Error::NotATree { node: child });
                }
            } else {
                self.enqueued[child] = true;
                self.core.counters.queue_pushes += 1;
            }
            self.leaves[1].push_back((child, Some(node)));
        }
        Ok(())
    }
}

/// Blocked tree copy: seed the root at the top level and let it sink to
/// level 1; everything else follows the level loop.
pub(super) fn run_tree(
    graph: &GraphModel,
    root: NodeId,
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    let core = Core::new(graph, hierarchy, footprints, opts);
    let top = core.n + 1;
    let mut eng = NodeEngine::new(core, Mode::Tree);
    eng.enqueued[root] = true;
    eng.roots[top].push_back((root, None));
    eng.core.counters.queue_pushes += 1;
    eng.drive(top)?;
    Ok(eng.core.finalize(1))
}

/// Blocked copy of an arbitrary graph. Pass 1 drives the level loop once per
/// root slot (copying the slot's target directly at level 1), persisting
/// forwarding and byte budgets across slots; pass 2 re-walks every reachable
/// slot the way a pointer-rewriting copier would.
pub(super) fn run_two_pass(
    graph: &GraphModel,
    root_slots: &[NodeId],
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    let core = Core::new(graph, hierarchy, footprints, opts);
    let mut eng = NodeEngine::new(core, Mode::Conditional);
    for &slot in root_slots {
        // The driver's own dequeue of the next root slot.
        eng.core.counters.queue_pops += 1;
        if eng.core.is_placed(slot) {
            // A forwarded target would make the whole run a no-op: nothing
            // would be queued and the wind-down would roll zero bytes.
            continue;
        }
        debug_assert!(!eng.enqueued[slot], "a discovered node is always forwarded by its own run");
        eng.enqueued[slot] = true;
        eng.core.counters.queue_pushes += 1;
        eng.copy_step((slot, None)).expect("conditional mode cannot fail");
        eng.drive(1)?;
    }
    complete_copy(&mut eng.core, graph, root_slots);
    Ok(eng.core.finalize(root_slots.len()))
}

/// Copy pass: revisit every slot reachable from the roots, moving each node's
/// bytes the first time a slot leads to it. Child slots are queued only on
/// that first visit, so every slot is visited once beyond root re-entry.
fn complete_copy(core: &mut Core, graph: &GraphModel, root_slots: &[NodeId]) {
    let mut copied = vec![false; graph.node_count()];
    let mut queue: VecDeque<NodeId> = root_slots.iter().copied().collect();
    while let Some(target) = queue.pop_front() {
        core.counters.slot_visits += 1;
        debug_assert!(core.is_placed(target), "forwarding pass covered every reachable node");
        if !copied[target] {
            copied[target] = true;
            for &child in graph.neighbors(target) {
                queue.push_back(child);
            }
        }
    }
    debug_assert!(core.order.iter().all(|&v| copied[v]), "copy pass missed a forwarded node");
}
