//! Controllability analysis for directed, weighted networks of heterogeneous
//! MIMO LTI node systems.
//!
//! The crate models networks in which each node `i` carries its own linear
//! dynamics `(A_i, B_i, C_i)`, nodes are coupled through a weighted adjacency
//! matrix `W` and an inner coupling matrix `H`, and a subset of nodes receives
//! external control input. All analysis runs on the lifted `Nn`-dimensional
//! state-space pair `(Phi, Psi)` or on equivalent finite reductions of it.

pub mod analyzers;
pub mod drivers;
pub mod graph;
pub mod model;
pub mod numerics;
pub mod structured;

pub use analyzers::{ControllabilityReport, Verdict};
pub use ndarray_linalg::c64;
pub use model::{LiftedSystem, NetworkSpec, NodeSystem, SpecViolation, ToleranceConfig};
pub use numerics::{NumericsError, PbhWitness, RankResult};
pub use structured::{CompanionNode, StructuredNetworkSpec};
