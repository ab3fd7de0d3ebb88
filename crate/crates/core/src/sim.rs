//! Multi-level locality simulation over address traces.
//!
//! Each level is an independent fully associative LRU cache of fixed-size
//! blocks; levels do not filter each other, so every access is counted at
//! every level. An access that straddles a block boundary touches each
//! overlapped block once.

use std::collections::{HashMap, HashSet};

use crate::model::AccessTrace;
use crate::{Error, MemoryHierarchy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimLevelConfig {
    pub block_size: u64,
    pub capacity_blocks: u64,
}

impl SimLevelConfig {
    pub fn new(block_size: u64, capacity_blocks: u64) -> SimLevelConfig {
        SimLevelConfig { block_size, capacity_blocks }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.block_size.is_power_of_two() {
            return Err(Error::BadParameter(format!(
                "block size {} is not a power of two",
                self.block_size
            )));
        }
        if self.capacity_blocks == 0 {
            return Err(Error::BadParameter("cache needs at least one block".into()));
        }
        Ok(())
    }
}

/// Capacities modeling a 32KiB L1 over 64B lines, a 32-entry L2 TLB span
/// over 1KiB subpages, a 256KiB span of 4KiB pages, and 32 huge pages.
pub fn default_level_configs() -> Vec<SimLevelConfig> {
    vec![
        SimLevelConfig::new(64, 512),
        SimLevelConfig::new(1024, 32),
        SimLevelConfig::new(4096, 64),
        SimLevelConfig::new(2 * 1024 * 1024, 32),
    ]
}

/// Simulation levels matching a declared hierarchy, using each level's
/// declared capacity or the default for that block size.
pub fn configs_from_hierarchy(hierarchy: &MemoryHierarchy) -> Vec<SimLevelConfig> {
    hierarchy
        .level_specs()
        .iter()
        .map(|spec| {
            let capacity = spec.capacity_blocks.unwrap_or(match spec.block_size {
                64 => 512,
                1024 => 32,
                4096 => 64,
                2097152 => 32,
                _ => 64,
            });
            SimLevelConfig::new(spec.block_size, capacity)
        })
        .collect()
}

/// Number of distinct `block_size`-aligned blocks the trace touches.
pub fn distinct_blocks(trace: &AccessTrace, block_size: u64) -> u64 {
    assert!(block_size >= 1);
    let mut seen = HashSet::new();
    for a in trace {
        debug_assert!(a.len >= 1);
        for b in a.offset / block_size..=(a.offset + a.len - 1) / block_size {
            seen.insert(b);
        }
    }
    seen.len() as u64
}

const NIL: usize = usize::MAX;

struct LruEntry {
    block: u64,
    prev: usize,
    next: usize,
}

/// Fully associative LRU over block ids; O(1) per touch via a hash map into
/// an intrusive list kept in a slab.
struct Lru {
    capacity: usize,
    map: HashMap<u64, usize>,
    slab: Vec<LruEntry>,
    head: usize,
    tail: usize,
}

impl Lru {
    fn new(capacity: u64) -> Lru {
        let capacity = usize::try_from(capacity).unwrap_or(usize::MAX);
        Lru {
            capacity,
            map: HashMap::new(),
            slab: Vec::new(),
            head: NIL,
            tail: NIL,
        }
    }

    fn detach(&mut self, i: usize) {
        let (prev, next) = (self.slab[i].prev, self.slab[i].next);
        if prev == NIL {
            self.head = next;
        } else {
            self.slab[prev].next = next;
        }
        if next == NIL {
            self.tail = prev;
        } else {
            self.slab[next].prev = prev;
        }
    }

    fn attach_front(&mut self, i: usize) {
        self.slab[i].prev = NIL;
        self.slab[i].next = self.head;
        if self.head != NIL {
            self.slab[self.head].prev = i;
        }
        self.head = i;
        if self.tail == NIL {
            self.tail = i;
        }
    }

    /// Returns true when the block missed.
    fn touch(&mut self, block: u64) -> bool {
        if let Some(&i) = self.map.get(&block) {
            if self.head != i {
                self.detach(i);
                self.attach_front(i);
            }
            return false;
        }
        let slot = if self.slab.len() < self.capacity {
            self.slab.push(LruEntry { block, prev: NIL, next: NIL });
            self.slab.len() - 1
        } else {
            let victim = self.tail;
            self.map.remove(&self.slab[victim].block);
            self.detach(victim);
            self.slab[victim].block = block;
            victim
        };
        self.attach_front(slot);
        self.map.insert(block, slot);
        true
    }
}

/// Replays the trace through one LRU level; returns (block accesses, misses).
pub fn simulate_lru(trace: &AccessTrace, config: &SimLevelConfig) -> (u64, u64) {
    debug_assert!(config.validate().is_ok());
    let bs = config.block_size;
    let mut lru = Lru::new(config.capacity_blocks);
    let mut accesses = 0u64;
    let mut misses = 0u64;
    for a in trace {
        debug_assert!(a.len >= 1);
        for b in a.offset / bs..=(a.offset + a.len - 1) / bs {
            accesses += 1;
            if lru.touch(b) {
                misses += 1;
            }
        }
    }
    (accesses, misses)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissRow {
    pub level: usize,
    pub block_size: u64,
    pub capacity_blocks: u64,
    pub accesses: u64,
    pub misses: u64,
}

impl MissRow {
    pub fn miss_rate(&self) -> f64 {
        if self.accesses == 0 {
            0.0
        } else {
            self.misses as f64 / self.accesses as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissReport {
    pub rows: Vec<MissRow>,
}

impl MissReport {
    pub fn row_for_block_size(&self, block_size: u64) -> Option<&MissRow> {
        self.rows.iter().find(|r| r.block_size == block_size)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,block_size,capacity_blocks,accesses,misses,miss_rate\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{:.4}\n",
                r.level,
                r.block_size,
                r.capacity_blocks,
                r.accesses,
                r.misses,
                r.miss_rate()
            ));
        }
        out
    }
}

/// Replays the trace through every level independently.
pub fn simulate_hierarchy(
    trace: &AccessTrace,
    configs: &[SimLevelConfig],
) -> Result<MissReport, Error> {
    for (i, c) in configs.iter().enumerate() {
        c.validate()?;
        if i > 0 && configs[i - 1].block_size >= c.block_size {
            return Err(Error::BadParameter(format!(
                "simulation block sizes must increase: {} then {}",
                configs[i - 1].block_size,
                c.block_size
            )));
        }
    }
    let rows = configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (accesses, misses) = simulate_lru(trace, c);
            MissRow {
                level: i + 1,
                block_size: c.block_size,
                capacity_blocks: c.capacity_blocks,
                accesses,
                misses,
            }
        })
        .collect();
    Ok(MissReport { rows })
}
