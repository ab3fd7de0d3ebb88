//! On-disk graph container plus the text edge-list importer.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! magic "HBAG" | version u32 = 1 | flags u32 | node_count u64 | edge_count u64
//! per node, in storage order: degree u32, then one u32 per neighbor
//! when flag bit 0 (weighted) is set: one u32 weight per adjacency entry,
//! same node-then-neighbor order as above
//! ```
//!
//! Flag bit 1 marks the adjacency as undirected (both directions stored).
//! Neighbor indices refer to positions in this file's storage order, so the
//! order nodes are written in *is* the layout; a file written from a blocked
//! emission order reloads as an already-blocked graph.
//!
//! Search keys are never stored: a search tree's keys are its in-order ranks,
//! recomputable from the structure alone (`recompute_bst_keys`).

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hba_core::{GraphKind, GraphModel, NodeId, Region};

pub const MAGIC: [u8; 4] = *b"HBAG";
pub const VERSION: u32 = 1;
const FLAG_WEIGHTED: u32 = 1;
const FLAG_UNDIRECTED: u32 = 2;

pub fn write_graph(path: &Path, graph: &GraphModel) -> Result<()> {
    let n = graph.node_count();
    if n > u32::MAX as usize {
        bail!("{n} nodes exceed the u32 index space of the file format");
    }
    let entries: usize = graph.total_entries();
    let mut flags = 0u32;
    if graph.weights.is_some() {
        flags |= FLAG_WEIGHTED;
    }
    if graph.kind == GraphKind::Undirected {
        flags |= FLAG_UNDIRECTED;
    }
    let mut buf = Vec::with_capacity(24 + 4 * (n + entries) + 4 * entries);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&flags.to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&(entries as u64).to_le_bytes());
    for row in &graph.adjacency {
        buf.extend_from_slice(&(row.len() as u32).to_le_bytes());
        for &v in row {
            buf.extend_from_slice(&(v as u32).to_le_bytes());
        }
    }
    if let Some(weights) = &graph.weights {
        for row in weights {
            for &w in row {
                if w > u32::MAX as u64 {
                    bail!("weight {w} exceeds the u32 range of the file format");
                }
                buf.extend_from_slice(&(w as u32).to_le_bytes());
            }
        }
    }
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.pos + len > self.data.len() {
            bail!("file truncated at byte {}", self.pos);
        }
        let s = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn read_graph(path: &Path) -> Result<GraphModel> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut c = Cursor { data: &data, pos: 0 };
    if c.take(4)? != MAGIC {
        bail!("{} is not a graph container (bad magic)", path.display());
    }
    let version = c.u32()?;
    if version != VERSION {
        bail!("unsupported container version {version}");
    }
    let flags = c.u32()?;
    if flags & !(FLAG_WEIGHTED | FLAG_UNDIRECTED) != 0 {
        bail!("unknown container flags {flags:#x}");
    }
    let n = c.u64()? as usize;
    let entries = c.u64()? as usize;
    let mut adjacency: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    let mut seen = 0usize;
    for u in 0..n {
        let degree = c.u32()? as usize;
        seen += degree;
        if seen > entries {
            bail!("node {u} overruns the declared {entries} adjacency entries");
        }
        let mut row = Vec::with_capacity(degree);
        for _ in 0..degree {
            let v = c.u32()? as usize;
            if v >= n {
                bail!("node {u} references out-of-range neighbor {v}");
            }
            row.push(v);
        }
        adjacency.push(row);
    }
    if seen != entries {
        bail!("degrees sum to {seen}, header declared {entries}");
    }
    let weights = if flags & FLAG_WEIGHTED != 0 {
        let mut weights = Vec::with_capacity(n);
        for row in &adjacency {
            let mut w = Vec::with_capacity(row.len());
            for _ in 0..row.len() {
                w.push(c.u32()? as u64);
            }
            weights.push(w);
        }
        Some(weights)
    } else {
        None
    };
    if c.pos != data.len() {
        bail!("{} trailing bytes after the payload", data.len() - c.pos);
    }
    let kind = if flags & FLAG_UNDIRECTED != 0 {
        GraphKind::Undirected
    } else {
        GraphKind::Directed
    };
    let mut graph = GraphModel::new(adjacency, kind);
    graph.weights = weights;
    graph.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(graph)
}

/// Parses `u v` / `u v w` lines (`#` starts a comment). External ids are
/// compacted to dense indices in first-appearance order; the returned vector
/// maps each new id back to its original.
pub fn parse_edge_list(text: &str, undirected: bool, weighted: bool) -> Result<(GraphModel, Vec<u64>)> {
    use std::collections::HashMap;
    let mut index: HashMap<u64, NodeId> = HashMap::new();
    let mut originals: Vec<u64> = Vec::new();
    let mut adjacency: Vec<Vec<NodeId>> = Vec::new();
    let mut weights: Vec<Vec<u64>> = Vec::new();
    let mut intern = |id: u64, adjacency: &mut Vec<Vec<NodeId>>, weights: &mut Vec<Vec<u64>>| {
        *index.entry(id).or_insert_with(|| {
            originals.push(id);
            adjacency.push(Vec::new());
            weights.push(Vec::new());
            adjacency.len() - 1
        })
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let at = lineno + 1;
        let u: u64 = fields
            .next()
            .ok_or_else(|| anyhow::anyhow!("line {at}: missing source id"))?
            .parse()
            .with_context(|| format!("line {at}"))?;
        let v: u64 = fields
            .next()
            .ok_or_else(|| anyhow::anyhow!("line {at}: missing target id"))?
            .parse()
            .with_context(|| format!("line {at}"))?;
        let w: Option<u64> = match fields.next() {
            Some(f) => Some(f.parse().with_context(|| format!("line {at}"))?),
            None => None,
        };
        if fields.next().is_some() {
            bail!("line {at}: more than three fields");
        }
        let w = match (weighted, w) {
            (true, Some(w)) => w,
            (true, None) => bail!("line {at}: weighted import needs a third column"),
            (false, Some(_)) => bail!("line {at}: unexpected weight column (pass --weighted)"),
            (false, None) => 0,
        };
        let ui = intern(u, &mut adjacency, &mut weights);
        let vi = intern(v, &mut adjacency, &mut weights);
        adjacency[ui].push(vi);
        weights[ui].push(w);
        if undirected {
            adjacency[vi].push(ui);
            weights[vi].push(w);
        }
    }
    let kind = if undirected { GraphKind::Undirected } else { GraphKind::Directed };
    let mut graph = GraphModel::new(adjacency, kind);
    if weighted {
        graph.weights = Some(weights);
    }
    graph.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok((graph, originals))
}

/// Assigns in-order ranks as search keys. Requires the 0-or-2-children shape
/// and a unique root that key lookups need.
pub fn recompute_bst_keys(graph: &mut GraphModel) -> Result<()> {
    let root = match graph.sole_root() {
        Some(r) => r,
        None => bail!("key recovery needs a unique root"),
    };
    if graph.adjacency.iter().any(|row| row.len() != 0 && row.len() != 2) {
        bail!("key recovery needs exactly zero or two children per node");
    }
    let n = graph.node_count();
    let mut keys = vec![0u64; n];
    let mut rank = 0u64;
    let mut visited = 0usize;
    // In-order walk without recursion: (node, children already expanded).
    let mut stack = vec![(root, false)];
    while let Some((v, expanded)) = stack.pop() {
        if expanded || graph.degree(v) == 0 {
            // A shared leaf would be visited once per parent.
            if visited == n {
                bail!("key recovery walked more nodes than the graph holds");
            }
            keys[v] = rank;
            rank += 1;
            visited += 1;
            if expanded {
                stack.push((graph.neighbors(v)[1], false));
            }
        } else {
            stack.push((v, true));
            let left = graph.neighbors(v)[0];
            // A left-edge cycle grows the stack without ever visiting.
            if visited + stack.len() > n {
                bail!("key recovery walked more nodes than the graph holds");
            }
            stack.push((left, false));
        }
    }
    if visited != n {
        bail!("{} nodes unreachable from the root", n - visited);
    }
    graph.keys = Some(keys);
    Ok(())
}

pub fn write_remap_csv(path: &Path, originals_by_new: &[u64]) -> Result<()> {
    let mut out = String::from("old_id,new_id\n");
    for (new, &old) in originals_by_new.iter().enumerate() {
        out.push_str(&format!("{old},{new}\n"));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Region sidecar: one row per region, roots in the output file's id space.
pub fn write_regions_csv(path: &Path, regions: &[Vec<Region>], new_id: &[NodeId]) -> Result<()> {
    let mut out = String::from("level,start,end,root,min_subtree_depth\n");
    for (i, level) in regions.iter().enumerate() {
        for r in level {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i + 1,
                r.start,
                r.end,
                new_id[r.root],
                r.min_subtree_depth
            ));
        }
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> GraphModel {
        let mut g = GraphModel::new(
            vec![vec![1, 2], vec![3], vec![3], vec![]],
            GraphKind::Directed,
        );
        g.weights = Some(vec![vec![5, 7], vec![1], vec![2], vec![]]);
        g
    }

    #[test]
    fn graph_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.hbag");
        let g = diamond();
        write_graph(&path, &g).unwrap();
        let back = read_graph(&path).unwrap();
        assert_eq!(back.adjacency, g.adjacency);
        assert_eq!(back.weights, g.weights);
        assert_eq!(back.kind, GraphKind::Directed);
        // Write -> read -> write is byte-identical.
        let again = dir.path().join("h.hbag");
        write_graph(&again, &back).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }

    #[test]
    fn rejects_corrupt_headers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.hbag");
        write_graph(&path, &diamond()).unwrap();
        let mut data = fs::read(&path).unwrap();
        data[0] = b'X';
        fs::write(&path, &data).unwrap();
        assert!(read_graph(&path).unwrap_err().to_string().contains("bad magic"));

        write_graph(&path, &diamond()).unwrap();
        let mut data = fs::read(&path).unwrap();
        data.truncate(data.len() - 1);
        fs::write(&path, &data).unwrap();
        assert!(read_graph(&path).unwrap_err().to_string().contains("truncated"));
    }

    #[test]
    fn rejects_out_of_range_neighbor() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.hbag");
        let g = GraphModel::new(vec![vec![1], vec![]], GraphKind::Directed);
        write_graph(&path, &g).unwrap();
        let mut data = fs::read(&path).unwrap();
        // First adjacency entry sits after the 28-byte header and node 0's
        // degree field.
        let entry = 32;
        data[entry..entry + 4].copy_from_slice(&9u32.to_le_bytes());
        fs::write(&path, &data).unwrap();
        assert!(read_graph(&path).unwrap_err().to_string().contains("out-of-range"));
    }

    #[test]
    fn edge_list_compacts_ids() {
        let text = "# comment\n10 20\n20 30 # trailing\n\n10 30\n";
        let (g, originals) = parse_edge_list(text, false, false).unwrap();
        assert_eq!(originals, vec![10, 20, 30]);
        assert_eq!(g.adjacency, vec![vec![1, 2], vec![2], vec![]]);
        assert_eq!(g.kind, GraphKind::Directed);
        assert!(g.weights.is_none());
    }

    #[test]
    fn edge_list_weighted_and_undirected() {
        let (g, _) = parse_edge_list("0 1 9\n1 2 4\n", true, true).unwrap();
        assert_eq!(g.adjacency, vec![vec![1], vec![0, 2], vec![1]]);
        assert_eq!(g.weights, Some(vec![vec![9], vec![9, 4], vec![4]]));
        assert_eq!(g.kind, GraphKind::Undirected);

        assert!(parse_edge_list("0 1\n", false, true).is_err());
        assert!(parse_edge_list("0 1 2\n", false, false).is_err());
        assert!(parse_edge_list("0\n", false, false).is_err());
    }

    #[test]
    fn keys_are_in_order_ranks() {
        let mut g = hba_core::generators::gen_bst(3).unwrap();
        let expected = g.keys.take().unwrap();
        recompute_bst_keys(&mut g).unwrap();
        assert_eq!(g.keys.unwrap(), expected);
    }

    #[test]
    fn key_recovery_rejects_non_trees() {
        let mut g = GraphModel::new(vec![vec![1, 1], vec![]], GraphKind::Directed);
        assert!(recompute_bst_keys(&mut g).is_err());
        let mut one_child = GraphModel::new(vec![vec![1], vec![]], GraphKind::Directed);
        assert!(recompute_bst_keys(&mut one_child).is_err());
    }
}
