//! SPARQL query model, emission from SemQL and text serialization.

mod emit;
mod error;
mod group;
mod invariants;
mod model;
mod serialize;

pub use emit::{emit_sparql, like_to_regex, lower_set_operation};
pub use error::SparqlError;
pub use group::complete_group_by;
pub use invariants::check_invariants;
pub use model::*;
pub use serialize::{serialize_sparql, serialize_sparql_with, IriStyle};
