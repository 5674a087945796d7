//! Downward self-reductions for total search problems.
//!
//! The crate provides a Boolean circuit IR with restriction passes, the
//! PLS-complete problems ITER and Sink-of-DAG (with and without source) plus
//! End-of-Line, the inter-reductions between them, the four downward
//! self-reduction algorithms, a compiler from any downward self-reduction
//! to a Sink-of-DAG state graph, the Sink-of-Verifiable-Line construction for
//! unique-solution problems, and the Factor/AllFactors reductions.

pub mod bits;
pub mod circuit;
pub mod dsr;
pub mod dsr2pls;
pub mod error;
pub mod fixtures;
pub mod gadgets;
pub mod instance_file;
pub mod netlist;
pub mod numbertheory;
pub mod problems;
pub mod reductions;
pub mod solvers;
pub mod svl;
pub mod synth;

pub use bits::BitString;
pub use circuit::{Circuit, Gate};
pub use error::{Error, Result};
pub use problems::{ProblemInstance, ProblemKind};
