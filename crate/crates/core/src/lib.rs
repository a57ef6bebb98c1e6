pub mod bench;
pub mod deadline;
pub mod ds;
pub mod game;
pub mod lasso;
pub mod objective;
pub mod pipeline;
pub mod product;
pub mod solver;

#[cfg(test)]
extern crate self as satisfice;
#[cfg(test)]
mod proptests;

pub use deadline::{Deadline, Timeout};
pub use lasso::Lasso;
