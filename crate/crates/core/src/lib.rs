pub mod coloring;
pub mod conquer;
pub mod cube;
pub mod encode;
pub mod error;
pub mod formula;
pub mod graph;
pub mod sms;
pub mod solver;

pub use error::{Error, Result};
