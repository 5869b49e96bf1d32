//! Shared pieces of the `hyperwell` command: cross-checks against the
//! finite-difference oracle and table formatting.

pub mod audit;
pub mod output;
