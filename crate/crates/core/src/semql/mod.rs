//! The SemQL intermediate representation: a typed tree for the grammar
//! with intersect / union / except roots, lowered from resolved SQL.

mod error;
mod lower;
mod sexpr;
mod tree;
mod validate;

pub use error::SemQlError;
pub use lower::{aggregate_kinds, lower_to_semql};
pub use sexpr::to_sexpr;
pub use tree::*;
pub use validate::validate_semql;
