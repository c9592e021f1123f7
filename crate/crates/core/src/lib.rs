//! Numerical multifractional calculus on uniform one-dimensional grids.

pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod frac;
pub mod grid;
pub mod laplacian;
pub mod measure;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
