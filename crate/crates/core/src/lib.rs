//! Block-theoretic invariants of finite groups over finite fields.

pub mod algebra;
pub mod bisets;
pub mod blocks;
pub mod catalog;
pub mod conjecture;
pub mod error;
pub mod field;
pub mod fusion;
pub mod groups;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod salgebra;

pub use error::{Error, Result};
