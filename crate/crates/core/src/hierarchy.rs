//! Declaration of the memory hierarchy a layout is blocked for.
//!
//! Levels are ordered smallest block first. Level indices are 1-based in the
//! blocking machinery, matching the convention that `s[i]` is the transfer
//! granule of level `i`; a conceptual top level with an infinite block size is
//! implied and never stored.

use crate::Error;

/// One hierarchy level: the transfer granule plus an optional block capacity
/// used when the level is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelSpec {
    pub block_size: u64,
    pub capacity_blocks: Option<u64>,
}

/// Ordered, strictly increasing block sizes, smallest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryHierarchy {
    levels: Vec<LevelSpec>,
}

/// Block sizes of the four-level hierarchy used throughout the benchmarks:
/// cache lines, DRAM pages, VM pages, superpages.
pub const PAPER_PRESET: [u64; 4] = [64, 1024, 4096, 2097152];

impl MemoryHierarchy {
    pub fn new(sizes: &[u64]) -> Result<Self, Error> {
        Self::with_capacities(sizes, None)
    }

    /// Builds a hierarchy, optionally attaching a simulation capacity to each
    /// level. `capacities`, when given, must be parallel to `sizes`.
    pub fn with_capacities(sizes: &[u64], capacities: Option<&[u64]>) -> Result<Self, Error> {
        if sizes.is_empty() {
            return Err(Error::BadParameter(
                "hierarchy needs at least one level".into(),
            ));
        }
        if let Some(caps) = capacities {
            if caps.len() != sizes.len() {
                return Err(Error::BadParameter(format!(
                    "{} capacities given for {} levels",
                    caps.len(),
                    sizes.len()
                )));
            }
        }
        let mut levels = Vec::with_capacity(sizes.len());
        let mut prev = 0u64;
        for (index, &size) in sizes.iter().enumerate() {
            if size == 0 {
                return Err(Error::ZeroSize { index });
            }
            if size <= prev {
                return Err(Error::NonMonotoneSizes { index, prev, size });
            }
            prev = size;
            levels.push(LevelSpec {
                block_size: size,
                capacity_blocks: capacities.map(|c| c[index]),
            });
        }
        Ok(MemoryHierarchy { levels })
    }

    pub fn paper_preset() -> Self {
        MemoryHierarchy::new(&PAPER_PRESET).expect("preset is valid")
    }

    /// Number of declared levels (`n`).
    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level_specs(&self) -> &[LevelSpec] {
        &self.levels
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.block_size).collect()
    }

    /// Block size of a 1-based level. Level `n + 1` is the implied top and
    /// reports an effectively infinite size.
    pub fn block_size(&self, level: usize) -> u64 {
        assert!(level >= 1 && level <= self.levels.len() + 1, "level out of range");
        if level == self.levels.len() + 1 {
            u64::MAX
        } else {
            self.levels[level - 1].block_size
        }
    }
}
