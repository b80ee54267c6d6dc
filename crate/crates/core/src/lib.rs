//! One-sided bipartite crossing minimisation.
//!
//! Given a two-layer bipartite graph whose first layer has a fixed left-to-right
//! order, find an order of the second (free) layer with as few edge crossings as
//! possible. The crate provides:
//!
//! - [`instance`]: the instance model, a seeded random generator and text formats.
//! - [`crossings`]: the cross table, exact counting and incremental move deltas.
//! - [`classic`]: barycenter, median and sifting.
//! - [`evolutionary`]: RLS / (1+1) EA over swap, exchange and jump moves, plus
//!   the jump-scanning variants.
//! - [`exact`]: subset dynamic programming and brute force for small free layers.
//! - [`stats`]: the Wilcoxon rank-sum (Mann-Whitney) test.
//! - [`bench`]: the experiment harness that ties everything together.

pub mod bench;
pub mod classic;
pub mod crossings;
mod error;
pub mod evolutionary;
pub mod exact;
pub mod instance;
pub mod stats;

pub use crossings::CrossTable;
pub use error::{Error, Result};
pub use instance::{BipartiteInstance, Ordering, Seed};
