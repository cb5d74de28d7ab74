//! Delayed-access protocol with soft cache hits, replayed over contact traces.

mod assign;
mod compare;
mod requests;
mod simulate;

pub use assign::{assign_caches, CacheAssignment, StoredCopy};
pub use compare::{compare_modes, CompareConfig, ComparisonRow, Policy};
pub use requests::{Request, RequestStream};
pub use simulate::{simulate, simulate_outcomes, AccessMode, ContactIndex, ContentHits, HitStats, Outcome};

use crate::catalog::CatalogError;
use crate::contact::ContactError;
use crate::placement::PlacementError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("cache assignment failed: {0}")]
    Assignment(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Contact(#[from] ContactError),
}
