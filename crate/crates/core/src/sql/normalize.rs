//! Canonical form of a resolved query: aliases `t1..tn` per block in FROM
//! and JOIN order, no select-list aliases, and literals coerced to the type
//! of whatever they are compared with.

use super::ast::*;
use super::error::SqlError;
use super::resolve::expr_type;
use crate::schema::RelationalSchema;
use crate::value::{Datatype, Value};

pub fn normalize_sql(query: &Query, schema: &RelationalSchema) -> Result<Query, SqlError> {
    let mut q = query.clone();
    normalize_query(&mut q, schema)?;
    Ok(q)
}

fn normalize_query(q: &mut Query, schema: &RelationalSchema) -> Result<(), SqlError> {
    match q {
        Query::Select(s) => normalize_block(s, schema),
        Query::SetOp { left, right, .. } => {
            normalize_query(left, schema)?;
            normalize_query(right, schema)
        }
    }
}

fn normalize_block(s: &mut Select, schema: &RelationalSchema) -> Result<(), SqlError> {
    s.from.alias = Some("t1".to_string());
    for (i, join) in s.joins.iter_mut().enumerate() {
        join.table.alias = Some(format!("t{}", i + 2));
    }
    for item in &mut s.items {
        item.alias = None;
        coerce(&mut item.expr, schema)?;
    }
    for join in &mut s.joins {
        if let Some(on) = &mut join.on {
            coerce(on, schema)?;
        }
    }
    if let Some(w) = &mut s.where_clause {
        coerce(w, schema)?;
    }
    if let Some(h) = &mut s.having {
        coerce(h, schema)?;
    }
    for o in &mut s.order_by {
        coerce(&mut o.expr, schema)?;
    }
    Ok(())
}

fn coerce_literal(v: &mut Value, target: Option<Datatype>, context: &str) -> Result<(), SqlError> {
    let Some(target) = target else {
        return Ok(());
    };
    match v.coerce_to(target) {
        Some(c) => {
            *v = c;
            Ok(())
        }
        None => Err(SqlError::TypeMismatch(format!(
            "literal {} compared with {target} {context}",
            describe(v)
        ))),
    }
}

fn describe(v: &Value) -> String {
    match v {
        Value::Text(s) => format!("'{s}'"),
        other => other.to_string(),
    }
}

fn coerce(e: &mut Expr, schema: &RelationalSchema) -> Result<(), SqlError> {
    match e {
        Expr::Column(_) | Expr::Wildcard(_) | Expr::Literal(_) => Ok(()),
        Expr::Aggregate { func, arg } => {
            if let AggArg::Expr(inner) = arg {
                coerce(inner, schema)?;
                if matches!(func, AggFunc::Sum | AggFunc::Avg) {
                    if let Some(t) = expr_type(inner, schema) {
                        if !t.is_numeric() {
                            return Err(SqlError::TypeMismatch(format!("{func} over a {t} expression")));
                        }
                    }
                }
            }
            Ok(())
        }
        Expr::Arith { left, right, .. } => {
            coerce(left, schema)?;
            coerce(right, schema)?;
            for side in [&**left, &**right] {
                if let Some(t) = expr_type(side, schema) {
                    if !t.is_numeric() {
                        return Err(SqlError::TypeMismatch(format!("arithmetic over a {t} expression")));
                    }
                }
            }
            Ok(())
        }
        Expr::Compare { left, right, .. } => {
            coerce(left, schema)?;
            coerce(right, schema)?;
            match (&mut **left, &mut **right) {
                (Expr::Literal(_), Expr::Literal(_)) => Ok(()),
                (Expr::Literal(v), other) | (other, Expr::Literal(v)) => {
                    coerce_literal(v, expr_type(other, schema), "expression")
                }
                _ => Ok(()),
            }
        }
        Expr::Between { expr, low, high } => {
            coerce(expr, schema)?;
            coerce(low, schema)?;
            coerce(high, schema)?;
            let t = expr_type(expr, schema);
            for bound in [&mut **low, &mut **high] {
                if let Expr::Literal(v) = bound {
                    coerce_literal(v, t, "expression in BETWEEN")?;
                }
            }
            Ok(())
        }
        Expr::InList { expr, list, .. } => {
            coerce(expr, schema)?;
            let t = expr_type(expr, schema);
            for v in list {
                coerce_literal(v, t, "expression in IN list")?;
            }
            Ok(())
        }
        Expr::InSubquery { expr, query, .. } => {
            coerce(expr, schema)?;
            normalize_query(query, schema)
        }
        Expr::Like { expr, .. } => {
            coerce(expr, schema)?;
            match expr_type(expr, schema) {
                Some(t) if t != Datatype::Text => {
                    Err(SqlError::TypeMismatch(format!("LIKE over a {t} expression")))
                }
                _ => Ok(()),
            }
        }
        Expr::Subquery(q) => normalize_query(q, schema),
        Expr::And(a, b) | Expr::Or(a, b) => {
            coerce(a, schema)?;
            coerce(b, schema)
        }
    }
}
