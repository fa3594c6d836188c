//! Parser, resolver and serializer for the supported SQL dialect: inner
//! joins, the five aggregates, arithmetic, BETWEEN / IN / NOT IN / LIKE,
//! set operations, uncorrelated scalar and IN subqueries, ORDER BY and
//! LIMIT. Anything else is rejected as an unsupported construct by name.

mod ast;
mod display;
mod error;
mod lexer;
mod normalize;
mod parser;
mod resolve;

pub use ast::*;
pub use display::{sql_literal, to_sql};
pub use error::SqlError;
pub use lexer::{tokenize, Token, TokenKind};
pub use normalize::normalize_sql;
pub use parser::parse_statement;
pub use resolve::{expr_type, resolve_query};

use crate::schema::RelationalSchema;

/// Parses and resolves one statement against `schema`.
pub fn parse_sql(text: &str, schema: &RelationalSchema) -> Result<Query, SqlError> {
    resolve_query(parse_statement(text)?, schema)
}
