//! Ontology derivation and RDF materialization by direct mapping.

mod graph;
mod materialize;
mod ntriples;
mod ontology;
mod prompt;

pub use graph::{Graph, Literal, LiteralType, Term, Triple, RDF_TYPE, XSD};
pub use materialize::{materialize, subject_iri, MaterializationReport, SkippedReference};
pub(crate) use ntriples::escape_literal;
pub use ntriples::{literal_to_ntriples, serialize_graph, triple_to_ntriples};
pub use ontology::{
    data_property_name, derive_ontology, object_property_name, DataProperty, MappingError,
    ObjectProperty, Ontology, OntologyClass, DEFAULT_PREFIX,
};
pub use prompt::ontology_prompt_summary;
