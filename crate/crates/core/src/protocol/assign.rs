use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::ProtocolError;
use crate::placement::IntegerPlacement;

/// One cached item: a full copy (`fraction == 1`) or a partial copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoredCopy {
    pub content: usize,
    pub fraction: f64,
}

/// Concrete cell contents realizing an integer placement.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheAssignment {
    /// Per cell, sorted by content.
    cells: Vec<Vec<StoredCopy>>,
    capacity: usize,
    contents: usize,
}

impl CacheAssignment {
    /// Builds an assignment from explicit cell contents, checking capacity
    /// and that no cell stores a content twice.
    pub fn new(cells: Vec<Vec<StoredCopy>>, capacity: usize, contents: usize) -> Result<Self, ProtocolError> {
        let mut cells = cells;
        for cell in &mut cells {
            cell.sort_by_key(|s| s.content);
            if cell.len() > capacity {
                return Err(ProtocolError::Assignment("cell over capacity"));
            }
            if cell.windows(2).any(|w| w[0].content == w[1].content) {
                return Err(ProtocolError::Assignment("content stored twice in one cell"));
            }
            if cell
                .iter()
                .any(|s| s.content >= contents || !(s.fraction > 0.0 && s.fraction <= 1.0))
            {
                return Err(ProtocolError::Assignment("invalid stored copy"));
            }
        }
        Ok(Self {
            cells,
            capacity,
            contents,
        })
    }

    pub fn empty(cells: usize, capacity: usize, contents: usize) -> Self {
        Self {
            cells: vec![Vec::new(); cells],
            capacity,
            contents,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn content_count(&self) -> usize {
        self.contents
    }

    pub fn cell(&self, cell: usize) -> &[StoredCopy] {
        &self.cells[cell]
    }

    /// Fraction of `content` stored at `cell`, if any.
    pub fn lookup(&self, cell: usize, content: usize) -> Option<f64> {
        let list = &self.cells[cell];
        list.binary_search_by_key(&content, |s| s.content)
            .ok()
            .map(|k| list[k].fraction)
    }

    /// Number of cells holding a full or partial copy of each content.
    pub fn holders(&self) -> Vec<usize> {
        let mut n = vec![0; self.contents];
        for cell in &self.cells {
            for s in cell {
                n[s.content] += 1;
            }
        }
        n
    }
}

/// Places every content in `slots_of(i)` distinct cells without exceeding
/// any cell's capacity.
///
/// Contents are handled from the most to the least replicated, each going to
/// the cells with the most free slots (ties broken at random). This greedy
/// succeeds whenever `slots_of(i) <= M` for all `i` and the total fits in
/// `M * C`. A partial copy, when present, goes to the last chosen cell.
pub fn assign_caches(placement: &IntegerPlacement, seed: u64) -> Result<CacheAssignment, ProtocolError> {
    let (m, cap) = (placement.cells(), placement.capacity());
    let k = placement.len();
    if (0..k).any(|i| placement.slots_of(i) > m) {
        return Err(ProtocolError::Assignment(
            "a content needs more copies than there are cells",
        ));
    }
    if placement.slots() > m * cap {
        return Err(ProtocolError::Assignment("placement exceeds total cache capacity"));
    }
    let mut rng = crate::rng_from_seed(seed);
    let mut order: Vec<usize> = (0..k).filter(|&i| placement.slots_of(i) > 0).collect();
    order.shuffle(&mut rng);
    order.sort_by_key(|&i| core::cmp::Reverse(placement.slots_of(i)));

    let mut free = vec![cap; m];
    let mut cells: Vec<Vec<StoredCopy>> = vec![Vec::new(); m];
    let mut by_space: Vec<usize> = (0..m).collect();
    for i in order {
        let need = placement.slots_of(i);
        by_space.shuffle(&mut rng);
        by_space.sort_by_key(|&c| core::cmp::Reverse(free[c]));
        for (rank, &c) in by_space[..need].iter().enumerate() {
            if free[c] == 0 {
                return Err(ProtocolError::Assignment("greedy ran out of free slots"));
            }
            free[c] -= 1;
            let partial = placement.partial()[i];
            let fraction = if rank + 1 == need && partial > 0.0 {
                partial
            } else {
                1.0
            };
            cells[c].push(StoredCopy { content: i, fraction });
        }
    }
    CacheAssignment::new(cells, cap, k)
}
