//! Single-pass blocked copy for arbitrary graphs.
//!
//! The queues hold nodes that are already copied; each stands in for the
//! group of child slots in its copy. Popping work means popping one slot off
//! the front group, copying its target if the target has not been forwarded,
//! and diving straight back to level 1. A per-node cursor remembers how far
//! the group has been scanned; a group only ever drains at one level because
//! refills cannot happen while the front group still has slots.

use std::collections::VecDeque;

use super::engine::Core;
use super::{LayoutOptions, LayoutResult};
use crate::hierarchy::MemoryHierarchy;
use crate::model::{Footprints, GraphModel, NodeId};
use crate::Error;

pub(super) fn run(
    graph: &GraphModel,
    root_slots: &[NodeId],
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    opts: &LayoutOptions,
) -> Result<LayoutResult, Error> {
    let core = Core::new(graph, hierarchy, footprints, opts);
    let lists = core.n + 2;
    let mut eng = SlotEngine {
        core,
        roots: vec![VecDeque::new(); lists],
        leaves: vec![VecDeque::new(); lists],
        cursor: vec![0; graph.node_count()],
    };
    for &slot in root_slots {
        // The driver's own dequeue, then the hoisted copy of the root slot's
        // target.
        eng.core.counters.queue_pops += 1;
        eng.core.counters.slot_visits += 1;
        if eng.core.is_placed(slot) {
            // Rewriting the slot is the only effect; queues and budgets are
            // untouched, so skipping the drive loses nothing.
            continue;
        }
        eng.core.place(slot, None);
        eng.leaves[1].push_back(slot);
        eng.core.counters.queue_pushes += 1;
        eng.drive();
    }
    Ok(eng.core.finalize(root_slots.len()))
}

struct SlotEngine<'a> {
    core: Core<'a>,
    roots: Vec<VecDeque<NodeId>>,
    leaves: Vec<VecDeque<NodeId>>,
    /// Next unpopped child slot per node. Each node's group is queued at most
    /// once, so the cursor never resets.
    cursor: Vec<usize>,
}

impl<'a> SlotEngine<'a> {
    /// Drops drained groups off the queue front (each drop is that group's
    /// dequeue) and reports whether any slot remains to pop. Never touches a
    /// group that still has slots, so refill boundaries cannot split one.
    fn has_slots(&mut self, level: usize) -> bool {
        while let Some(&front) = self.roots[level].front() {
            if self.cursor[front] < self.core.graph.degree(front) {
                return true;
            }
            self.roots[level].pop_front();
            self.core.counters.queue_pops += 1;
        }
        false
    }

    fn drive(&mut self) {
        let top = self.core.n + 1;
        let mut level = 1;
        loop {
            if !self.has_slots(level) {
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
            if !self.has_slots(level) {
                if level == top {
                    return;
                }
                self.core.roll(level);
                level += 1;
                continue;
            }
            let owner = *self.roots[level].front().expect("front group has slots");
            let j = self.cursor[owner];
            self.cursor[owner] += 1;
            self.core.counters.slot_visits += 1;
            let target = self.core.graph.neighbors(owner)[j];
            // Dive straight to level 1. The budgets this skips over already
            // read zero (each was zeroed when it rolled upward), so no reset
            // is needed on the way down.
            debug_assert!((1..level).all(|i| self.core.space[i] == 0));
            level = 1;
            if !self.core.is_placed(target) {
                self.core.place(target, Some(owner));
                self.leaves[1].push_back(target);
                self.core.counters.queue_pushes += 1;
            }
        }
    }
}
