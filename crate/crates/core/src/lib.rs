pub mod cli;
pub mod demo;
pub mod desc;
pub mod effects;
pub mod error;
pub mod extfun;
pub mod generics;
pub mod multiplate;
pub mod safeser;
pub mod typerep;
pub mod uniplate;
pub mod value;
pub mod views;

pub use error::{Error, Result};
