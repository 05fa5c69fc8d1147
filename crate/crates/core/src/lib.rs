#![no_std]

extern crate alloc;

pub mod abp;
pub mod cfg;
pub mod circuit;
pub mod error;
pub mod gen;
pub mod lblab;
pub mod linalg;
pub mod pit;
pub mod poly;
pub mod products;
pub mod scalar;

pub use error::{Caps, Error, Result};
