//! Workflow satisfiability with equality, separation-of-duty and seniority
//! constraints, solved by dynamic programming over a tree decomposition of
//! the user hierarchy.

pub mod bench;
pub mod dp;
pub mod error;
pub mod format;
pub mod model;
pub mod oracle;
pub mod order;
pub mod pipeline;
pub mod preprocess;
pub mod treedecomp;

pub use error::Error;
