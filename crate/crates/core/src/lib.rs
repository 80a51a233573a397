#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod model;
pub mod ncalg;
pub mod qcoeff;
pub mod repr;
pub mod sigma;
pub mod spinor;

pub use error::{Error, Result};
