pub mod algebra;
pub mod cli;
pub mod construct;
pub mod counterexample;
pub mod decide;
pub mod error;
pub mod io;
pub mod perm;

pub use error::{Error, Result};
