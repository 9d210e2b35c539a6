pub mod arrangement;
pub mod catalog;
pub mod cli;
pub mod constructor;
pub mod criteria;
pub mod error;
pub mod family;
pub(crate) mod frac;
pub mod list;
pub mod rat;
pub mod reducibility;
pub mod small_norm;
pub mod step;

pub use error::{Error, Result};
pub use list::IntList;
pub use rat::Rat;
