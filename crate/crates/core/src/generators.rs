//! Seeded synthetic graph generators.
//!
//! All randomness flows through a ChaCha stream cipher seeded explicitly, so
//! every generator is a pure function of its parameters. Trees are directed
//! parent-to-child; the ring, preferential-attachment, and mesh models are
//! undirected and store both directions of each edge.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::model::{GraphKind, GraphModel, NodeId};
use crate::Error;

/// Largest supported complete-BST depth (2^(d+1) - 1 nodes).
pub const MAX_BST_DEPTH: u32 = 25;

/// A generator request, as built by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenKind {
    KaryTree { nodes: usize, k: usize },
    Bst { depth: u32 },
    WattsStrogatz { n: usize, k: usize, p: f64 },
    BarabasiAlbert { n: usize, m: usize },
    Mesh2d { rows: usize, cols: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub seed: u64,
}

pub fn generate(spec: &GenSpec) -> Result<GraphModel, Error> {
    match spec.kind {
        GenKind::KaryTree { nodes, k } => gen_kary_tree(nodes, k),
        GenKind::Bst { depth } => gen_bst(depth),
        GenKind::WattsStrogatz { n, k, p } => gen_watts_strogatz(n, k, p, spec.seed),
        GenKind::BarabasiAlbert { n, m } => gen_barabasi_albert(n, m, spec.seed),
        GenKind::Mesh2d { rows, cols } => gen_mesh2d(rows, cols),
    }
}

/// Complete k-ary tree with `nodes` nodes in level order: children of `i` are
/// `k*i + 1 ..= k*i + k`, clipped to the node count.
pub fn gen_kary_tree(nodes: usize, k: usize) -> Result<GraphModel, Error> {
    if nodes == 0 {
        return Err(Error::BadParameter("tree needs at least one node".into()));
    }
    if k == 0 {
        return Err(Error::BadParameter("arity k must be positive".into()));
    }
    let mut adjacency = vec![Vec::new(); nodes];
    for i in 0..nodes {
        let first = k * i + 1;
        for c in first..(first + k).min(nodes) {
            adjacency[i].push(c);
        }
    }
    Ok(GraphModel::new(adjacency, GraphKind::Directed))
}

/// Complete binary search tree of the given depth holding the contiguous
/// keyspace `0 ..= 2^(depth+1) - 2`. Node ids are heap-ordered (root 0,
/// children of `i` at `2i+1` and `2i+2`); keys are in-order ranks, so the
/// structure is fully determined by the depth.
pub fn gen_bst(depth: u32) -> Result<GraphModel, Error> {
    if depth > MAX_BST_DEPTH {
        return Err(Error::DepthTooLarge { depth, max: MAX_BST_DEPTH });
    }
    let n: usize = (1usize << (depth + 1)) - 1;
    let mut adjacency = vec![Vec::new(); n];
    let mut keys = vec![0u64; n];
    for i in 0..n {
        let (l, r) = (2 * i + 1, 2 * i + 2);
        if r < n {
            adjacency[i].push(l);
            adjacency[i].push(r);
        }
    }
    // In-order rank of every heap index; subtree sizes are uniform per level.
    fn fill(keys: &mut [u64], node: usize, lo: u64, size: u64) {
        let half = (size - 1) / 2;
        keys[node] = lo + half;
        if half > 0 {
            fill(keys, 2 * node + 1, lo, half);
            fill(keys, 2 * node + 2, lo + half + 1, half);
        }
    }
    fill(&mut keys, 0, 0, n as u64);
    let mut g = GraphModel::new(adjacency, GraphKind::Directed);
    g.keys = Some(keys);
    Ok(g)
}

/// Watts-Strogatz small world: ring lattice where each node links to its `k/2`
/// nearest neighbors on each side, then every clockwise lattice edge is
/// rewired with probability `p` to a uniform non-duplicate target. Edge count
/// stays `n * k / 2`.
pub fn gen_watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Result<GraphModel, Error> {
    if k == 0 || k % 2 != 0 || k >= n {
        return Err(Error::BadDegree { k, n });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParameter(format!("rewire probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::with_capacity(k); n];
    for i in 0..n {
        for j in 1..=k / 2 {
            let v = (i + j) % n;
            adjacency[i].push(v);
            adjacency[v].push(i);
        }
    }
    for i in 0..n {
        for j in 1..=k / 2 {
            let old = (i + j) % n;
            if rng.gen::<f64>() >= p {
                continue;
            }
            // Degree-saturated nodes keep their lattice edge.
            if adjacency[i].len() >= n - 1 {
                continue;
            }
            let new = loop {
                let cand = rng.gen_range(0..n);
                if cand != i && !adjacency[i].contains(&cand) {
                    break cand;
                }
            };
            let pos = adjacency[i].iter().position(|&v| v == old).expect("lattice edge present");
            adjacency[i].remove(pos);
            let pos = adjacency[old].iter().position(|&v| v == i).expect("reverse edge present");
            adjacency[old].remove(pos);
            adjacency[i].push(new);
            adjacency[new].push(i);
        }
    }
    Ok(GraphModel::new(adjacency, GraphKind::Undirected))
}

/// Barabasi-Albert preferential attachment: a clique over the first `m + 1`
/// nodes, then each new node attaches to `m` distinct targets sampled with
/// probability proportional to degree.
pub fn gen_barabasi_albert(n: usize, m: usize, seed: u64) -> Result<GraphModel, Error> {
    if m == 0 {
        return Err(Error::BadParameter("attachment count m must be positive".into()));
    }
    if n < m + 1 {
        return Err(Error::BadParameter(format!(
            "n = {n} too small for initial clique of {} nodes",
            m + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    // One entry per edge endpoint; uniform sampling from it is
    // degree-proportional sampling.
    let mut endpoints: Vec<NodeId> = Vec::new();
    for u in 0..=m {
        for v in (u + 1)..=m {
            adjacency[u].push(v);
            adjacency[v].push(u);
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for u in (m + 1)..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            adjacency[u].push(t);
            adjacency[t].push(u);
            endpoints.push(u);
            endpoints.push(t);
        }
    }
    Ok(GraphModel::new(adjacency, GraphKind::Undirected))
}

/// Four-connected rows x cols grid; node `(r, c)` is id `r * cols + c`.
pub fn gen_mesh2d(rows: usize, cols: usize) -> Result<GraphModel, Error> {
    if rows == 0 || cols == 0 {
        return Err(Error::BadParameter("mesh dimensions must be positive".into()));
    }
    let n = rows * cols;
    let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            if c + 1 < cols {
                adjacency[u].push(u + 1);
                adjacency[u + 1].push(u);
            }
            if r + 1 < rows {
                adjacency[u].push(u + cols);
                adjacency[u + cols].push(u);
            }
        }
    }
    Ok(GraphModel::new(adjacency, GraphKind::Undirected))
}

/// Attaches uniform integer weights in `[1, node_count]` to every edge.
/// Undirected edges get one draw shared by both directions.
pub fn assign_weights(graph: &mut GraphModel, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = graph.node_count() as u64;
    let hi = n.max(1);
    let mut weights: Vec<Vec<u64>> =
        graph.adjacency.iter().map(|row| vec![0; row.len()]).collect();
    match graph.kind {
        GraphKind::Directed => {
            for row in weights.iter_mut() {
                for w in row.iter_mut() {
                    *w = rng.gen_range(1..=hi);
                }
            }
        }
        GraphKind::Undirected => {
            for u in 0..graph.node_count() {
                for (j, &v) in graph.adjacency[u].iter().enumerate() {
                    if u < v || (u == v) {
                        weights[u][j] = rng.gen_range(1..=hi);
                    }
                }
            }
            // Mirror the draws onto the reverse directions.
            let snapshot = weights.clone();
            for u in 0..graph.node_count() {
                for (j, &v) in graph.adjacency[u].iter().enumerate() {
                    if v < u {
                        let back = graph.adjacency[v]
                            .iter()
                            .position(|&x| x == u)
                            .expect("undirected reverse edge");
                        weights[u][j] = snapshot[v][back];
                    }
                }
            }
        }
    }
    graph.weights = Some(weights);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kary_children_and_counts() {
        let g = gen_kary_tree(21, 4).unwrap();
        assert_eq!(g.total_entries(), 20);
        assert_eq!(g.adjacency[0], vec![1, 2, 3, 4]);
        assert_eq!(g.adjacency[4], vec![17, 18, 19, 20]);
        assert_eq!(g.adjacency[5], Vec::<usize>::new());
        assert_eq!(g.sole_root(), Some(0));
    }

    #[test]
    fn kary_partial_last_family() {
        let g = gen_kary_tree(6, 4).unwrap();
        assert_eq!(g.adjacency[1], vec![5]);
        assert_eq!(g.total_entries(), 5);
    }

    #[test]
    fn bst_depth_two_keys() {
        let g = gen_bst(2).unwrap();
        assert_eq!(g.node_count(), 7);
        let keys = g.keys.as_ref().unwrap();
        assert_eq!(keys[0], 3);
        assert_eq!(keys, &vec![3, 1, 5, 0, 2, 4, 6]);
        assert_eq!(g.adjacency[0], vec![1, 2]);
        assert_eq!(g.adjacency[3], Vec::<usize>::new());
    }

    #[test]
    fn bst_depth_zero() {
        let g = gen_bst(0).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.keys.as_ref().unwrap()[0], 0);
    }

    #[test]
    fn bst_depth_limit() {
        assert_eq!(
            gen_bst(MAX_BST_DEPTH + 1),
            Err(Error::DepthTooLarge { depth: MAX_BST_DEPTH + 1, max: MAX_BST_DEPTH })
        );
    }

    #[test]
    fn ws_lattice_unrewired() {
        let g = gen_watts_strogatz(10, 4, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 20);
        for u in 0..10 {
            assert_eq!(g.degree(u), 4);
        }
        g.validate().unwrap();
    }

    #[test]
    fn ws_preserves_edge_count_under_rewiring() {
        for seed in 0..5 {
            let g = gen_watts_strogatz(50, 6, 1.0, seed).unwrap();
            assert_eq!(g.edge_count(), 150);
            g.validate().unwrap();
            for u in 0..50 {
                let row = &g.adjacency[u];
                assert!(!row.contains(&u), "self loop at {u}");
                let mut sorted = row.clone();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), row.len(), "duplicate edge at {u}");
            }
        }
    }

    #[test]
    fn ws_rejects_bad_degree() {
        assert_eq!(gen_watts_strogatz(10, 3, 0.1, 1), Err(Error::BadDegree { k: 3, n: 10 }));
        assert_eq!(gen_watts_strogatz(4, 4, 0.1, 1), Err(Error::BadDegree { k: 4, n: 4 }));
    }

    #[test]
    fn ws_determinism() {
        let a = gen_watts_strogatz(64, 6, 0.1, 7).unwrap();
        let b = gen_watts_strogatz(64, 6, 0.1, 7).unwrap();
        let c = gen_watts_strogatz(64, 6, 0.1, 8).unwrap();
        assert_eq!(a.adjacency, b.adjacency);
        assert_ne!(a.adjacency, c.adjacency);
    }

    #[test]
    fn ba_line_case() {
        let g = gen_barabasi_albert(10, 1, 3).unwrap();
        assert_eq!(g.edge_count(), 9);
        g.validate().unwrap();
    }

    #[test]
    fn ba_degrees_and_count() {
        let g = gen_barabasi_albert(200, 2, 9).unwrap();
        // 3 clique edges plus m = 2 per attached node.
        assert_eq!(g.edge_count(), 3 + (200 - 3) * 2);
        for u in 3..200 {
            assert!(g.degree(u) >= 2);
        }
        g.validate().unwrap();
    }

    #[test]
    fn mesh_edge_formula() {
        let g = gen_mesh2d(3, 3).unwrap();
        assert_eq!(g.edge_count(), 12);
        let line = gen_mesh2d(1, 5).unwrap();
        assert_eq!(line.edge_count(), 4);
        g.validate().unwrap();
    }

    #[test]
    fn weights_range_symmetry_determinism() {
        let mut g = gen_mesh2d(4, 4).unwrap();
        assign_weights(&mut g, 11);
        let w = g.weights.clone().unwrap();
        let n = g.node_count() as u64;
        for u in 0..g.node_count() {
            for (j, &v) in g.adjacency[u].iter().enumerate() {
                assert!((1..=n).contains(&w[u][j]));
                let back = g.adjacency[v].iter().position(|&x| x == u).unwrap();
                assert_eq!(w[u][j], w[v][back], "asymmetric weight on ({u}, {v})");
            }
        }
        let mut g2 = gen_mesh2d(4, 4).unwrap();
        assign_weights(&mut g2, 11);
        assert_eq!(g.weights, g2.weights);
    }
}
