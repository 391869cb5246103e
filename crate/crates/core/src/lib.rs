//! Settlement-level social capital measures and procurement corruption risk.
//!
//! * [`graph`]: social network with settlement attribution.
//! * [`community`]: Louvain, modularity and fragmentation.
//! * [`diversity`]: ego-network diversity and its settlement average.
//! * [`procurement`]: contract red-flag indicators and composite risk scores.
//! * [`stats`]: standardization, OLS and its diagnostics, rank tests.
//! * [`synth`]: generators with planted ground truth.

pub mod community;
pub mod diversity;
pub mod error;
pub mod exec;
pub mod graph;
pub mod measures;
pub mod procurement;
pub mod rng;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{Adjacency, NodeId, SettlementId, SocialGraph};
