pub mod arith;
pub mod classify;
pub mod cli;
pub mod dsl;
pub mod error;
pub mod order_one;
pub mod ore;
pub mod rationality;
pub mod report;
pub mod selftest;
pub mod series;
pub mod solver;
pub mod system;
pub mod verdict;

pub use error::{Error, Result};
