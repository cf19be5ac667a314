//! Follow-the-Regularized-Leader algorithms for Blackwell approachability
//! of closed convex cones, with the global-cost, combinatorial, Φ-regret
//! and classical Blackwell applications.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blackwell;
pub mod combinatorial;
pub mod engine;
pub mod error;
pub mod games;
pub mod geometry;
pub mod global_cost;
pub mod harness;
pub mod phi_regret;
pub mod regularizers;
pub mod solvers;
pub mod vector;

pub use error::{Error, Result};
