//! Exact set algebra, map checkers, topological games and sieves on
//! countable carriers.

pub mod cylinder;
pub mod error;
pub mod field;
pub mod gallery;
pub mod games;
pub mod linear;
pub mod maps;
mod parse;
pub mod point;
pub mod refine;
pub mod set;
pub mod sieves;
pub mod space;
pub mod trace;

pub use error::{ParseError, Result, TopoError};
pub use field::FieldPoint;
pub use point::{Point, SeqPoint};
pub use set::ExactSet;
