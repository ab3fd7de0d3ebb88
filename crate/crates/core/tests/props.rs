//! Randomized invariants: packing discipline, region structure, operation
//! budgets, simulator agreement with naive oracles, and workload answers
//! that ignore layout.

use hba_core::model::{align_up, Access};
use hba_core::sim::{self, SimLevelConfig};
use hba_core::workloads::{self, WorkloadOptions};
use hba_core::{bounds, layout, testkit};
use hba_core::{Footprints, GraphKind, GraphModel, LayoutOptions, LayoutResult, MemoryHierarchy};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blocked_layout(
    engine: u8,
    graph: &GraphModel,
    hierarchy: &MemoryHierarchy,
    footprints: &Footprints,
    opts: &LayoutOptions,
    tree: bool,
) -> LayoutResult {
    match engine % 3 {
        0 if tree => layout::hb_tree(graph, 0, hierarchy, footprints, opts).unwrap(),
        1 => layout::hba_two_pass(graph, &[0], hierarchy, footprints, opts).unwrap(),
        _ => layout::hb_one_pass(graph, &[0], hierarchy, footprints, opts).unwrap(),
    }
}

/// Placements must be a packed, aligned, first-touch-ordered assignment.
fn check_packing(graph: &GraphModel, l: &LayoutResult, footprints: &Footprints) {
    let align = footprints.align();
    let mut expected = l.base_offset;
    for &v in &l.order {
        expected = align_up(expected, align);
        assert_eq!(l.placement[v], expected);
        assert_eq!(l.node_bytes[v], footprints.bytes(graph, v));
        expected += l.node_bytes[v];
    }
    assert_eq!(l.tospace_end, expected);
    let placed = l.placement.iter().filter(|&&p| p != layout::UNPLACED).count();
    assert_eq!(placed, l.order.len());
}

/// Regions at each level are disjoint, ordered, rooted at their first node,
/// and nested inside the next level's regions.
fn check_regions(l: &LayoutResult) {
    for level in &l.regions {
        let mut prev_end = l.base_offset;
        for r in level {
            assert!(r.start >= prev_end);
            assert!(r.end > r.start);
            assert_eq!(l.placement[r.root], r.start);
            prev_end = r.end;
        }
        assert!(prev_end <= l.tospace_end);
    }
    for upper in 1..l.regions.len() {
        for inner in &l.regions[upper - 1] {
            let covering = l.regions[upper]
                .iter()
                .filter(|outer| outer.start <= inner.start && inner.end <= outer.end)
                .count();
            assert_eq!(covering, 1, "inner region not nested exactly once");
        }
    }
    // Every placement falls inside exactly one region per level.
    for level in &l.regions {
        for &v in &l.order {
            let holding = level.iter().filter(|r| r.contains(l.placement[v])).count();
            assert_eq!(holding, 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blocked_layouts_pack_and_partition(seed in any::<u64>(), engine in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = testkit::random_tree(&mut rng, 300);
        let hierarchy = testkit::random_hierarchy(&mut rng);
        let footprints = testkit::random_footprints(&mut rng, tree.node_count(), 16, 128);
        let opts = LayoutOptions { base_offset: *[0u64, 8].choose(&mut rng).unwrap() };
        let l = blocked_layout(engine, &tree, &hierarchy, &footprints, &opts, true);
        prop_assert_eq!(l.order.len(), tree.node_count());
        check_packing(&tree, &l, &footprints);
        check_regions(&l);
    }

    #[test]
    fn general_graph_layouts_pack_and_partition(seed in any::<u64>(), engine in 1u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = testkit::random_general_graph(&mut rng, 250);
        let hierarchy = testkit::random_hierarchy(&mut rng);
        let footprints = testkit::random_footprints(&mut rng, graph.node_count(), 16, 128);
        let opts = LayoutOptions::default();
        let l = blocked_layout(engine, &graph, &hierarchy, &footprints, &opts, false);
        check_packing(&graph, &l, &footprints);
        check_regions(&l);
        // Exactly the nodes reachable from the root slot get placed.
        let reach = testkit::reachable_from(&graph, 0);
        for (v, seen) in reach.iter().enumerate() {
            prop_assert_eq!(l.is_placed(v), *seen);
        }
    }

    #[test]
    fn region_overshoot_is_one_layer(seed in any::<u64>()) {
        // A first-level region closes at the first whole-layer boundary past
        // its byte budget, and a sub-traversal's layers are subsets of the
        // tree's own breadth-first layers, so the region exceeds the budget by
        // less than the fattest tree layer. Higher levels close at whole
        // rounds of lower-level applications (their extents are pinned by the
        // recursive-definition oracle), but at every level a region only ever
        // holds descendants of its root.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = testkit::random_tree(&mut rng, 300);
        let hierarchy = testkit::random_hierarchy(&mut rng);
        let footprints = testkit::random_footprints(&mut rng, tree.node_count(), 16, 128);
        let opts = LayoutOptions::default();
        let l = layout::hb_tree(&tree, 0, &hierarchy, &footprints, &opts).unwrap();

        let depths = testkit::bfs_depths(&tree, 0);
        let mut layer_bytes = vec![0u64; tree.node_count() + 1];
        for v in 0..tree.node_count() {
            let d = depths[v].unwrap() as usize;
            // Alignment 1 for explicit footprints: exact byte layers.
            layer_bytes[d] += footprints.bytes(&tree, v);
        }
        let max_layer = layer_bytes.iter().copied().max().unwrap();
        for r in &l.regions[0] {
            prop_assert!(r.end - r.start < hierarchy.block_size(1) + max_layer);
        }

        // Euler intervals: v is inside subtree(u) iff enter[u] <= enter[v] < exit[u].
        let n = tree.node_count();
        let (mut enter, mut exit) = (vec![0u32; n], vec![0u32; n]);
        let mut clock = 0;
        let mut stack = vec![(0usize, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                exit[v] = clock;
                continue;
            }
            enter[v] = clock;
            clock += 1;
            stack.push((v, true));
            for &c in tree.neighbors(v) {
                stack.push((c, false));
            }
        }
        for level in &l.regions {
            let mut r = 0;
            for &v in &l.order {
                while l.placement[v] >= level[r].end {
                    r += 1;
                }
                let root = level[r].root;
                prop_assert!(enter[root] <= enter[v] && enter[v] < exit[root]);
            }
        }
    }

    #[test]
    fn counters_stay_within_linear_envelope(seed in any::<u64>(), engine in 1u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = testkit::random_general_graph(&mut rng, 250);
        let roots: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..graph.node_count())).collect();
        let hierarchy = testkit::random_hierarchy(&mut rng);
        let footprints = testkit::random_footprints(&mut rng, graph.node_count(), 16, 128);
        let opts = LayoutOptions::default();
        let l = match engine % 2 {
            0 => layout::hba_two_pass(&graph, &roots, &hierarchy, &footprints, &opts).unwrap(),
            _ => layout::hb_one_pass(&graph, &roots, &hierarchy, &footprints, &opts).unwrap(),
        };
        let n = graph.node_count() as u64;
        let lists = hierarchy.levels() as u64 + 1;
        let c = &l.counters;
        prop_assert_eq!(c.copies, l.order.len() as u64);
        prop_assert!(c.queue_pushes <= lists * n);
        // Occurrences enter once but pop once per level while sinking back to
        // level 1, and dead occurrences never counted as fresh pushes.
        let occupancy = graph.total_entries() as u64 + roots.len() as u64;
        prop_assert!(c.queue_pops <= lists * occupancy);
        prop_assert!(c.slot_visits <= graph.total_entries() as u64 + roots.len() as u64);
        let run = bounds::ComplexityRun {
            nodes: n,
            edges: graph.total_entries() as u64,
            levels: lists,
            counters: l.counters,
        };
        prop_assert!(bounds::verify_complexity(&[run], 4.0));
    }

    #[test]
    fn lru_matches_naive_reference(
        accesses in prop::collection::vec((0u64..50_000, 1u64..=64), 1..400),
        block_pow in 4u32..10,
        capacity in 1u64..40,
    ) {
        let trace: Vec<Access> =
            accesses.into_iter().map(|(offset, len)| Access { offset, len }).collect();
        let config = SimLevelConfig::new(1 << block_pow, capacity);
        prop_assert_eq!(sim::simulate_lru(&trace, &config), testkit::naive_lru(&trace, &config));
    }

    #[test]
    fn distinct_blocks_equal_unbounded_misses(
        accesses in prop::collection::vec((0u64..50_000, 1u64..=64), 1..400),
        block_pow in 4u32..10,
    ) {
        let trace: Vec<Access> =
            accesses.into_iter().map(|(offset, len)| Access { offset, len }).collect();
        let bs = 1 << block_pow;
        let (_, misses) = sim::simulate_lru(&trace, &SimLevelConfig::new(bs, u64::MAX));
        prop_assert_eq!(misses, sim::distinct_blocks(&trace, bs));
        prop_assert_eq!(misses, testkit::naive_distinct_blocks(&trace, bs));
    }

    #[test]
    fn lru_inclusion_under_growing_capacity(
        accesses in prop::collection::vec((0u64..20_000, 1u64..=64), 1..300),
    ) {
        let trace: Vec<Access> =
            accesses.into_iter().map(|(offset, len)| Access { offset, len }).collect();
        let mut prev = u64::MAX;
        for capacity in [1u64, 2, 4, 8, 16, 32, 64] {
            let (_, misses) = sim::simulate_lru(&trace, &SimLevelConfig::new(64, capacity));
            prop_assert!(misses <= prev);
            prev = misses;
        }
    }

    #[test]
    fn shortest_paths_agree_with_relaxation_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut graph = testkit::random_general_graph(&mut rng, 120);
        hba_core::generators::assign_weights(&mut graph, rng.gen());
        let footprints = testkit::random_footprints(&mut rng, graph.node_count(), 16, 64);
        let opts = LayoutOptions::default();
        let source = rng.gen_range(0..graph.node_count());
        let a = layout::identity(&graph, &footprints, &opts).unwrap();
        let b = layout::pseudorandom(&graph, &[source], 5, &footprints, &opts).unwrap();
        let ra = workloads::run_sssp(&graph, &a, source, &WorkloadOptions::default()).unwrap();
        let rb = workloads::run_sssp(&graph, &b, source, &WorkloadOptions::default()).unwrap();
        prop_assert_eq!(&ra.answers, &rb.answers);
        let oracle = testkit::bellman_ford(&graph, source);
        prop_assert_eq!(ra.answers.distances(), oracle.as_slice());
    }

    #[test]
    fn breadth_first_visits_exactly_the_reachable_set(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = testkit::random_general_graph(&mut rng, 150).symmetrize();
        prop_assert_eq!(graph.kind, GraphKind::Undirected);
        let footprints = testkit::random_footprints(&mut rng, graph.node_count(), 16, 64);
        let l = layout::identity(&graph, &footprints, &LayoutOptions::default()).unwrap();
        let source = rng.gen_range(0..graph.node_count());
        let r = workloads::run_bfs(&graph, &l, source, &WorkloadOptions::default()).unwrap();
        let reach = testkit::reachable_from(&graph, source);
        let mut visited = vec![false; graph.node_count()];
        for &v in r.answers.visit_order() {
            prop_assert!(!visited[v], "revisited {}", v);
            visited[v] = true;
        }
        prop_assert_eq!(visited, reach);
    }
}
