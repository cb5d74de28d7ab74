use alloc::vec;
use alloc::vec::Vec;

use super::PlacementError;
use crate::catalog::UtilityGraph;

/// Binary storage decisions: `stores(cell, content)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorageMatrix {
    cells: Vec<Vec<bool>>,
    contents: usize,
}

impl StorageMatrix {
    pub fn empty(cells: usize, contents: usize) -> Self {
        Self {
            cells: vec![vec![false; contents]; cells],
            contents,
        }
    }

    pub fn set(&mut self, cell: usize, content: usize, stored: bool) {
        self.cells[cell][content] = stored;
    }

    pub fn stores(&self, cell: usize, content: usize) -> bool {
        self.cells[cell][content]
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn content_count(&self) -> usize {
        self.contents
    }
}

/// Femto-caching hit probability with Case 1 soft hits for a user reaching
/// `user_cells` and asking for `content`:
/// `1 - Π_{j ∈ G} Π_k (1 - x_kj)^{u_ik}`.
///
/// Any nonzero relation counts as an exponent of one, so with binary storage
/// the result is 0 or 1.
pub fn femto_hit_probability(
    x: &StorageMatrix,
    u: &UtilityGraph,
    user_cells: &[usize],
    content: usize,
) -> Result<f64, PlacementError> {
    if u.len() != x.content_count() || content >= u.len() {
        return Err(PlacementError::DimensionMismatch("content index outside the catalog"));
    }
    if user_cells.iter().any(|&j| j >= x.cell_count()) {
        return Err(PlacementError::DimensionMismatch("cell index outside the network"));
    }
    let acceptable = core::iter::once(content).chain(u.row(content).iter().copied());
    let mut miss = 1.0;
    for &j in user_cells {
        for k in acceptable.clone() {
            if x.stores(j, k) {
                miss *= 0.0;
            }
        }
    }
    Ok(1.0 - miss)
}
