//! In-memory graph representation and the byte-footprint models that map
//! nodes onto address-space extents.
//!
//! Node ids are dense indices into `adjacency`. Adjacency lists are ordered;
//! that order is what the layout engines and workloads traverse, so it is part
//! of the model, not an implementation detail. Undirected graphs store both
//! directions of every edge. Neighbour counts live outside the per-node
//! footprint (a side array in the storage model), so a node's footprint is a
//! pure function of its degree and the size model.

use crate::Error;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Directed,
    Undirected,
}

/// A graph plus optional per-edge weights and per-node search keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphModel {
    pub adjacency: Vec<Vec<NodeId>>,
    /// Parallel to `adjacency` when present.
    pub weights: Option<Vec<Vec<u64>>>,
    pub kind: GraphKind,
    /// Search keys for binary-search-tree workloads.
    pub keys: Option<Vec<u64>>,
}

/// A location holding a node reference: child `child_index` of `owner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub owner: NodeId,
    pub child_index: usize,
}

impl GraphModel {
    pub fn new(adjacency: Vec<Vec<NodeId>>, kind: GraphKind) -> Self {
        GraphModel { adjacency, weights: None, kind, keys: None }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    /// Total adjacency entries (each undirected edge counts twice).
    pub fn total_entries(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum()
    }

    /// Logical edge count: undirected pairs are counted once.
    pub fn edge_count(&self) -> usize {
        match self.kind {
            GraphKind::Directed => self.total_entries(),
            GraphKind::Undirected => self.total_entries() / 2,
        }
    }

    /// Checks index ranges, parallel-array shapes, and reciprocity of
    /// undirected edges.
    pub fn validate(&self) -> Result<(), Error> {
        let n = self.node_count();
        for (u, row) in self.adjacency.iter().enumerate() {
            for &v in row {
                if v >= n {
                    return Err(Error::BadParameter(format!(
                        "node {u} references out-of-range neighbor {v}"
                    )));
                }
            }
        }
        if let Some(w) = &self.weights {
            if w.len() != n || w.iter().zip(&self.adjacency).any(|(a, b)| a.len() != b.len()) {
                return Err(Error::BadParameter("weights not parallel to adjacency".into()));
            }
        }
        if let Some(k) = &self.keys {
            if k.len() != n {
                return Err(Error::BadParameter("keys not parallel to nodes".into()));
            }
        }
        if self.kind == GraphKind::Undirected {
            use std::collections::HashMap;
            let mut count: HashMap<(NodeId, NodeId), i64> = HashMap::new();
            for (u, row) in self.adjacency.iter().enumerate() {
                for &v in row {
                    *count.entry((u, v)).or_insert(0) += 1;
                }
            }
            for ((u, v), c) in &count {
                if count.get(&(*v, *u)).copied().unwrap_or(0) != *c {
                    return Err(Error::BadParameter(format!(
                        "undirected edge ({u}, {v}) lacks its reverse"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Undirected, unweighted version of the graph: every edge gains its
    /// reverse, duplicates are dropped, adjacency order is original neighbors
    /// first, then newly added reverse neighbors in source order.
    pub fn symmetrize(&self) -> GraphModel {
        let n = self.node_count();
        let mut adjacency: Vec<Vec<NodeId>> = self.adjacency.clone();
        let mut present: Vec<std::collections::HashSet<NodeId>> =
            adjacency.iter().map(|row| row.iter().copied().collect()).collect();
        for u in 0..n {
            for i in 0..self.adjacency[u].len() {
                let v = self.adjacency[u][i];
                if u != v && !present[v].contains(&u) {
                    present[v].insert(u);
                    adjacency[v].push(u);
                }
            }
        }
        GraphModel { adjacency, weights: None, kind: GraphKind::Undirected, keys: self.keys.clone() }
    }

    /// The unique node with no incoming edge, when there is exactly one.
    pub fn sole_root(&self) -> Option<NodeId> {
        let mut indeg = vec![0usize; self.node_count()];
        for row in &self.adjacency {
            for &v in row {
                indeg[v] += 1;
            }
        }
        let mut roots = indeg.iter().enumerate().filter(|(_, &d)| d == 0).map(|(i, _)| i);
        match (roots.next(), roots.next()) {
            (Some(r), None) => Some(r),
            _ => None,
        }
    }
}

/// Degree-parameterized node footprint:
///
/// `footprint = header + degree * per_edge_overhead_refs * ref_bytes + link`
///
/// where `link` is one extra reference when `include_reorg_link` is set (the
/// field a reorganizing allocator threads through live objects). Fixed-slot
/// node records (a search-tree node with its two child pointers inline) fold
/// those slots into `header_bytes` and use zero per-edge overhead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeModel {
    pub header_bytes: u64,
    pub ref_bytes: u64,
    pub include_reorg_link: bool,
    pub per_edge_overhead_refs: u64,
}

impl SizeModel {
    /// Binary-search-tree node: key header plus two inline child pointers.
    pub fn bst_node(ref_bytes: u64, include_reorg_link: bool) -> SizeModel {
        SizeModel {
            header_bytes: 3 * ref_bytes,
            ref_bytes,
            include_reorg_link,
            per_edge_overhead_refs: 0,
        }
    }

    /// Adjacency stored inline in the node: id header plus one reference per
    /// neighbor.
    pub fn undirected_node(ref_bytes: u64) -> SizeModel {
        SizeModel {
            header_bytes: ref_bytes,
            ref_bytes,
            include_reorg_link: false,
            per_edge_overhead_refs: 1,
        }
    }

    /// Library-style adjacency list where every out-edge costs five pointers
    /// (source, destination, weight, two allocator words).
    pub fn boost_adjacency(ref_bytes: u64) -> SizeModel {
        SizeModel {
            header_bytes: ref_bytes,
            ref_bytes,
            include_reorg_link: false,
            per_edge_overhead_refs: 5,
        }
    }

    /// Every node occupies exactly `bytes`.
    pub fn fixed(bytes: u64) -> SizeModel {
        SizeModel {
            header_bytes: bytes,
            ref_bytes: 8,
            include_reorg_link: false,
            per_edge_overhead_refs: 0,
        }
    }
}

/// Byte footprint of one node under a size model.
pub fn node_footprint(graph: &GraphModel, node: NodeId, model: &SizeModel) -> u64 {
    let link = if model.include_reorg_link { model.ref_bytes } else { 0 };
    model.header_bytes
        + graph.degree(node) as u64 * model.per_edge_overhead_refs * model.ref_bytes
        + link
}

/// Where a layout engine gets node sizes from: a degree-parameterized model,
/// or explicit per-node sizes (test and benchmark plumbing).
#[derive(Debug, Clone)]
pub enum Footprints {
    Model(SizeModel),
    Explicit { sizes: Vec<u64>, align: u64 },
}

impl Footprints {
    pub fn explicit(sizes: Vec<u64>) -> Footprints {
        Footprints::Explicit { sizes, align: 1 }
    }

    pub fn bytes(&self, graph: &GraphModel, node: NodeId) -> u64 {
        let b = match self {
            Footprints::Model(m) => node_footprint(graph, node, m),
            Footprints::Explicit { sizes, .. } => sizes[node],
        };
        debug_assert!(b > 0, "node footprints must be positive");
        b
    }

    /// Placement alignment: references must stay aligned, so model-based
    /// footprints align to `ref_bytes`.
    pub fn align(&self) -> u64 {
        match self {
            Footprints::Model(m) => m.ref_bytes.max(1),
            Footprints::Explicit { align, .. } => (*align).max(1),
        }
    }
}

/// Work performed by one layout run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub queue_pushes: u64,
    pub queue_pops: u64,
    pub copies: u64,
    pub slot_visits: u64,
}

impl OpCounters {
    pub fn total(&self) -> u64 {
        self.queue_pushes + self.queue_pops + self.copies + self.slot_visits
    }
}

/// One read of `len` bytes at `offset` in the laid-out address space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Access {
    pub offset: u64,
    pub len: u64,
}

pub type AccessTrace = Vec<Access>;

pub fn align_up(value: u64, align: u64) -> u64 {
    debug_assert!(align >= 1);
    value.div_ceil(align) * align
}
