//! Cross-engine agreement: the three blocked engines emit identical layouts
//! on trees, and the two general-graph engines agree on arbitrary directed
//! graphs, root sets, hierarchies, and footprints.

use hba_core::layout;
use hba_core::testkit;
use hba_core::{GraphModel, LayoutOptions, MemoryHierarchy, NodeId};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_root_slots<R: Rng>(rng: &mut R, graph: &GraphModel) -> Vec<NodeId> {
    let n = graph.node_count();
    (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..n)).collect()
}

#[test]
fn three_engines_agree_on_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..300 {
        let tree = testkit::random_tree(&mut rng, 400);
        let hierarchy = testkit::random_hierarchy(&mut rng);
        let footprints = testkit::random_footprints(&mut rng, tree.node_count(), 16, 128);
        let opts = LayoutOptions { base_offset: *[0, 8].choose(&mut rng).unwrap() };
        let a = layout::hb_tree(&tree, 0, &hierarchy, &footprints, &opts).unwrap();
        let b = layout::hba_two_pass(&tree, &[0], &hierarchy, &footprints, &opts).unwrap();
        let c = layout::hb_one_pass(&tree, &[0], &hierarchy, &footprints, &opts).unwrap();
        assert_eq!(a.order, b.order);
        assert_eq!(a.order, c.order);
        assert_eq!(a.placement, b.placement);
        assert_eq!(a.placement, c.placement);
        assert_eq!(a.tospace_end, b.tospace_end);
        assert_eq!(a.tospace_end, c.tospace_end);
        // Regions including the derived subtree depths.
        assert_eq!(a.regions, b.regions);
        assert_eq!(a.regions, c.regions);
        assert_eq!(b.counters.slot_visits, c.counters.slot_visits);
    }
}

#[test]
fn general_graph_engines_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..300 {
        let graph = testkit::random_general_graph(&mut rng, 250);
        let roots = random_root_slots(&mut rng, &graph);
        let hierarchy = testkit::random_hierarchy(&mut rng);
        let footprints = testkit::random_footprints(&mut rng, graph.node_count(), 16, 128);
        let opts = LayoutOptions { base_offset: *[0, 8].choose(&mut rng).unwrap() };
        let a = layout::hba_two_pass(&graph, &roots, &hierarchy, &footprints, &opts).unwrap();
        let b = layout::hb_one_pass(&graph, &roots, &hierarchy, &footprints, &opts).unwrap();
        assert_eq!(a.order, b.order);
        assert_eq!(a.placement, b.placement);
        assert_eq!(a.tospace_end, b.tospace_end);
        assert_eq!(a.regions, b.regions);
        assert_eq!(a.counters.copies, b.counters.copies);
        assert_eq!(a.counters.slot_visits, b.counters.slot_visits);
    }
}

#[test]
fn huge_first_level_degenerates_to_breadth_first() {
    // With the whole graph fitting in one level-1 budget the blocked engines
    // never promote, so a single-root copy is plain breadth-first order.
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100 {
        let graph = testkit::random_general_graph(&mut rng, 200);
        let hierarchy = MemoryHierarchy::new(&[1 << 40]).unwrap();
        let footprints = testkit::random_footprints(&mut rng, graph.node_count(), 16, 128);
        let opts = LayoutOptions::default();
        let blocked =
            layout::hba_two_pass(&graph, &[0], &hierarchy, &footprints, &opts).unwrap();
        let breadth = layout::bfs(&graph, &[0], &footprints, &opts).unwrap();
        assert_eq!(blocked.order, breadth.order);
        assert_eq!(blocked.placement, breadth.placement);
    }
}

#[test]
fn engines_cover_disconnected_components_via_extra_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..50 {
        let graph = testkit::random_general_graph(&mut rng, 120);
        // Every node a root slot: everything gets placed exactly once.
        let roots: Vec<NodeId> = (0..graph.node_count()).collect();
        let hierarchy = testkit::random_hierarchy(&mut rng);
        let footprints = testkit::random_footprints(&mut rng, graph.node_count(), 16, 128);
        let opts = LayoutOptions::default();
        let a = layout::hba_two_pass(&graph, &roots, &hierarchy, &footprints, &opts).unwrap();
        let b = layout::hb_one_pass(&graph, &roots, &hierarchy, &footprints, &opts).unwrap();
        assert_eq!(a.order, b.order);
        assert_eq!(a.placement, b.placement);
        assert_eq!(a.placed_count(), graph.node_count());
    }
}
