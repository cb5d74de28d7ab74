use alloc::vec::Vec;

use super::PlacementVector;
use crate::math::{floor, round};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingMode {
    /// Largest-remainder rounding to whole copies.
    Round,
    /// Whole copies plus at most one partial copy per content.
    Fractional,
}

/// Integer copy counts, optionally with one partial copy per content.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerPlacement {
    copies: Vec<usize>,
    partial: Vec<f64>,
    cells: usize,
    capacity: usize,
}

impl IntegerPlacement {
    pub fn from_copies(copies: Vec<usize>, cells: usize, capacity: usize) -> Self {
        let partial = alloc::vec![0.0; copies.len()];
        Self {
            copies,
            partial,
            cells,
            capacity,
        }
    }

    /// Whole copies per content.
    pub fn copies(&self) -> &[usize] {
        &self.copies
    }

    /// Size of the extra partial copy per content, in `[0, 1)`.
    pub fn partial(&self) -> &[f64] {
        &self.partial
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    /// Cache slots used: a partial copy occupies a full slot.
    pub fn slots(&self) -> usize {
        self.copies.iter().sum::<usize>() + self.partial.iter().filter(|&&f| f > 0.0).count()
    }

    /// Slots held by content `i`.
    pub fn slots_of(&self, i: usize) -> usize {
        self.copies[i] + usize::from(self.partial[i] > 0.0)
    }

    pub fn as_continuous(&self) -> Vec<f64> {
        self.copies
            .iter()
            .zip(&self.partial)
            .map(|(&c, &f)| c as f64 + f)
            .collect()
    }
}

const SNAP: f64 = 1e-9;

fn split(x: f64) -> (usize, f64) {
    let r = round(x);
    if (x - r).abs() <= SNAP {
        return (r.max(0.0) as usize, 0.0);
    }
    let f = floor(x);
    (f.max(0.0) as usize, x - f)
}

/// Turns a continuous placement into whole copies.
///
/// `Round` keeps the rounded total (capped at `M * C`) and hands the copies
/// left after flooring to the largest fractional parts, lower index first on
/// ties. `Fractional` keeps `floor(n_i)` copies plus one partial copy of size
/// `n_i - floor(n_i)`; since a partial copy takes a whole slot, the smallest
/// partial copies are dropped if the slots would exceed `M * C`.
pub fn integerize(placement: &PlacementVector, mode: RoundingMode) -> IntegerPlacement {
    let (cells, capacity) = (placement.cells(), placement.capacity());
    let budget = cells * capacity;
    let parts: Vec<(usize, f64)> = placement.n().iter().map(|&x| split(x)).collect();
    let mut copies: Vec<usize> = parts.iter().map(|p| p.0.min(cells)).collect();
    let mut fracs: Vec<f64> = parts.iter().map(|p| p.1).collect();
    let mut order: Vec<usize> = (0..fracs.len()).filter(|&i| fracs[i] > 0.0).collect();
    order.sort_by(|&a, &b| fracs[b].partial_cmp(&fracs[a]).unwrap().then(a.cmp(&b)));

    match mode {
        RoundingMode::Round => {
            let target = (round(placement.total()).max(0.0) as usize).min(budget);
            let mut extra = target.saturating_sub(copies.iter().sum());
            for &i in &order {
                if extra == 0 {
                    break;
                }
                if copies[i] < cells {
                    copies[i] += 1;
                    extra -= 1;
                }
            }
            IntegerPlacement::from_copies(copies, cells, capacity)
        }
        RoundingMode::Fractional => {
            let whole: usize = copies.iter().sum();
            let allowed = budget.saturating_sub(whole);
            for &i in order.iter().skip(allowed) {
                fracs[i] = 0.0;
            }
            IntegerPlacement {
                copies,
                partial: fracs,
                cells,
                capacity,
            }
        }
    }
}
