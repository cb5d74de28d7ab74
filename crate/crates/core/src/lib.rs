//! Edge caching with soft cache hits.
//!
//! A request for content `i` that cannot be served from a small-cell cache may
//! still be satisfied by a *related* content `j` that is cached nearby. This
//! crate holds the algorithmic pieces needed to study that effect under
//! delayed (TTL-bounded) access:
//!
//! - [`catalog`]: popularity catalogs and content-relation graphs.
//! - [`placement`]: hit-ratio objectives, the water-filling baseline
//!   placement, relation-aware convex placement solvers and gain analytics.
//! - [`contact`]: user/small-cell contact processes (exponential meetings and
//!   a community-based mobility generator).
//! - [`protocol`]: discrete-event replay of the delayed-access protocol.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! experiment sweeps live in the companion `softcache` crate.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` rejects NaN on purpose; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod catalog;
pub mod contact;
mod math;
pub mod placement;
pub mod protocol;
pub mod stats;

pub use catalog::{ContentCatalog, GraphStats, RelationCase, UtilityGraph};
pub use contact::{ContactEvent, ContactKind, ContactTrace, MobilityConfig};
pub use placement::{AccessModel, IntegerPlacement, PlacementVector, SolveOptions, SolveReport};
pub use protocol::{AccessMode, CacheAssignment, HitStats, RequestStream};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used by every seeded generator in the crate.
pub type Rng = ChaCha8Rng;

pub(crate) fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
