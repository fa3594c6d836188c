//! The SQL to SPARQL path as one call, with errors from every stage in one
//! type.

use std::path::Path;

use thiserror::Error;

use crate::mapping::{derive_ontology, materialize, Graph, MappingError, MaterializationReport, Ontology};
use crate::schema::{
    load_data, load_hints, load_schema, repair_schema, DataError, RelationalInstance, RelationalSchema,
    RepairReport, SchemaError,
};
use crate::semql::{lower_to_semql, validate_semql, SemQlError, SemQlTree};
use crate::sparql::{emit_sparql, SparqlError, SparqlQuery};
use crate::sql::{normalize_sql, parse_sql, Query, SqlError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Sql(#[from] SqlError),
    #[error(transparent)]
    SemQl(#[from] SemQlError),
    #[error(transparent)]
    Sparql(#[from] SparqlError),
}

impl PipelineError {
    /// Whether the query was refused as outside the supported dialect
    /// rather than being malformed or hitting a bug.
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            PipelineError::Sql(SqlError::Unsupported(_))
                | PipelineError::SemQl(SemQlError::Unsupported(_) | SemQlError::ProjectionOverflow(_))
                | PipelineError::Sparql(SparqlError::Unsupported(_))
        )
    }
}

/// Every intermediate form of one translated query.
#[derive(Debug, Clone)]
pub struct Translation {
    /// Resolved query as written; what the SQL engine runs.
    pub resolved: Query,
    pub normalized: Query,
    pub tree: SemQlTree,
    pub sparql: SparqlQuery,
}

pub fn translate(sql: &str, schema: &RelationalSchema, ontology: &Ontology) -> Result<Translation, PipelineError> {
    let resolved = parse_sql(sql, schema)?;
    let normalized = normalize_sql(&resolved, schema)?;
    let tree = lower_to_semql(&normalized, schema)?;
    let problems = validate_semql(&tree, schema);
    if !problems.is_empty() {
        return Err(SemQlError::Grammar(problems.join("; ")).into());
    }
    let sparql = emit_sparql(&tree, ontology)?;
    Ok(Translation {
        resolved,
        normalized,
        tree,
        sparql,
    })
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

/// A repaired schema with its rows, ontology and materialized graph.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub schema: RelationalSchema,
    pub repair: RepairReport,
    pub instance: RelationalInstance,
    pub ontology: Ontology,
    pub graph: Graph,
    pub materialization: MaterializationReport,
}

impl Dataset {
    /// Loads `schema` (and optional `hints`), repairs it, reads one CSV per
    /// table from `data_dir` and materializes the graph under `prefix`.
    pub fn load(schema: &Path, hints: Option<&Path>, data_dir: &Path, prefix: &str) -> Result<Dataset, LoadError> {
        let raw = load_schema(schema)?;
        let hints = hints.map(load_hints).transpose()?;
        let (schema, repair) = repair_schema(&raw, hints.as_ref())?;
        let instance = load_data(&schema, data_dir)?;
        Dataset::from_parts(schema, repair, instance, prefix)
    }

    /// Builds the ontology and graph for an already repaired schema.
    pub fn from_parts(
        schema: RelationalSchema,
        repair: RepairReport,
        instance: RelationalInstance,
        prefix: &str,
    ) -> Result<Dataset, LoadError> {
        let ontology = derive_ontology(&schema, prefix)?;
        let (graph, materialization) = materialize(&schema, &instance, &ontology)?;
        Ok(Dataset {
            schema,
            repair,
            instance,
            ontology,
            graph,
            materialization,
        })
    }

    pub fn translate(&self, sql: &str) -> Result<Translation, PipelineError> {
        translate(sql, &self.schema, &self.ontology)
    }
}
