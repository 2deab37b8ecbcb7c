pub mod arith;
pub mod classgrp;
pub mod error;
pub mod ideals;
pub mod qfield;
pub mod realnum;
pub mod replace;
pub mod tmetric;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
