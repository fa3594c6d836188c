//! Reference evaluators: SQL over relational rows and SPARQL over the
//! materialized graph. Both are deliberately naive; they exist to check
//! translations, not to be fast.

mod error;
mod order;
mod result;
mod sparql_eval;
mod sql_eval;

pub use error::EngineError;
pub use order::key_order;
pub use result::ResultSet;
pub use sparql_eval::eval_sparql;
pub use sql_eval::eval_sql;
