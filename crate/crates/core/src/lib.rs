//! Relational databases to knowledge graphs, SQL to SPARQL, and a pair of
//! reference engines to check that each translation returns the same
//! answers as the query it came from.
//!
//! The pipeline:
//!
//! * [`schema`] loads a relational schema and its rows and repairs missing
//!   keys and mismatched key types.
//! * [`mapping`] derives an ontology by direct mapping and materializes the
//!   rows as an RDF graph.
//! * [`sql`] parses the supported SQL dialect, [`semql`] lowers it into the
//!   SemQL intermediate tree and [`sparql`] emits SPARQL from that tree.
//! * [`engines`] evaluates SQL over the rows and SPARQL over the graph, and
//!   [`eval`] compares the two and profiles query complexity.

pub mod engines;
pub mod eval;
pub mod mapping;
pub mod pipeline;
pub mod schema;
pub mod semql;
pub mod sparql;
pub mod sql;
pub mod value;
