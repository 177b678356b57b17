//! Desk-scale probability laboratory on Cayley balls.
//!
//! The crate builds finite radius-R balls of Cayley graphs for a small catalog
//! of groups (free, free abelian, free products of cyclics, direct products
//! with Z), runs Bernoulli bond percolation on them, samples random spanning
//! forests (Wilson's algorithm in both its loop-erased-walk and stack/cycle-
//! popping forms, plus minimal spanning forests under uniform edge labels),
//! and estimates cluster-graphing costs and related statistics from the
//! resulting configurations.
//!
//! Everything downstream of a 64-bit master seed is deterministic: labels,
//! walks, stacks, resampling, and parallel trial schedules reproduce
//! bit-for-bit regardless of worker count.

#![forbid(unsafe_code)]

pub mod ball;
pub mod blocks;
pub mod cluster;
pub mod cost;
pub mod ends;
pub mod error;
pub mod forest;
pub mod graph;
pub mod group;
pub mod indist;
pub mod paths;
pub mod percolation;
pub mod phase;
pub mod real;
pub mod seed;
pub mod stats;

pub use ball::CayleyBall;
pub use error::Error;
pub use group::{Element, GroupKind, GroupSpec};
pub use seed::SeedDomain;

/// Scalar used by the concrete (default) lanes of the generic numeric kernel.
pub type Scalar = f64;
/// Edge labels at default precision.
pub type Labels = percolation::LabelConfig<f64>;
/// Edge labels at single precision.
pub type Labels32 = percolation::LabelConfig<f32>;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
