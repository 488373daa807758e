//! Budgeted online influence maximization under the independent cascade
//! model with edge-level semi-bandit feedback.

pub mod bonus;
pub mod diffusion;
pub mod env;
pub mod error;
pub mod estimation;
pub mod evaluation;
pub mod experiment;
pub mod graph;
pub mod greedy;
pub mod oracle;
pub mod policy;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{CostVector, DirectedGraph, EdgeId, NodeId, WeightVector};
