//! SQL text for an AST. Columns are always qualified and nested arithmetic
//! is always parenthesized, so parsing the output gives back the same tree.

use super::ast::*;
use crate::value::{format_real, Value};

pub fn to_sql(query: &Query) -> String {
    let mut out = String::new();
    write_query(query, &mut out);
    out
}

fn write_query(query: &Query, out: &mut String) {
    match query {
        Query::Select(s) => write_block(s, out),
        Query::SetOp { op, left, right } => {
            write_query(left, out);
            out.push(' ');
            out.push_str(op.keyword());
            out.push(' ');
            write_query(right, out);
        }
    }
}

fn table_ref(t: &TableRef) -> String {
    match &t.alias {
        Some(a) => format!("{} AS {a}", t.table),
        None => t.table.clone(),
    }
}

fn write_block(s: &Select, out: &mut String) {
    let slots = s.slots();
    out.push_str("SELECT ");
    if s.distinct {
        out.push_str("DISTINCT ");
    }
    let items: Vec<String> = s
        .items
        .iter()
        .map(|i| {
            let e = expr(&i.expr, &slots);
            match &i.alias {
                Some(a) => format!("{e} AS {a}"),
                None => e,
            }
        })
        .collect();
    out.push_str(&items.join(", "));
    out.push_str(" FROM ");
    out.push_str(&table_ref(&s.from));
    for j in &s.joins {
        out.push_str(" JOIN ");
        out.push_str(&table_ref(&j.table));
        if let Some(on) = &j.on {
            out.push_str(" ON ");
            out.push_str(&expr(on, &slots));
        }
    }
    if let Some(w) = &s.where_clause {
        out.push_str(" WHERE ");
        out.push_str(&expr(w, &slots));
    }
    if !s.group_by.is_empty() {
        let cols: Vec<String> = s.group_by.iter().map(|c| column(c, &slots)).collect();
        out.push_str(" GROUP BY ");
        out.push_str(&cols.join(", "));
    }
    if let Some(h) = &s.having {
        out.push_str(" HAVING ");
        out.push_str(&expr(h, &slots));
    }
    if !s.order_by.is_empty() {
        let items: Vec<String> = s
            .order_by
            .iter()
            .map(|o| {
                let dir = match o.direction {
                    Direction::Asc => "ASC",
                    Direction::Desc => "DESC",
                };
                format!("{} {dir}", expr(&o.expr, &slots))
            })
            .collect();
        out.push_str(" ORDER BY ");
        out.push_str(&items.join(", "));
    }
    if let Some(n) = s.limit {
        out.push_str(&format!(" LIMIT {n}"));
    }
}

fn column(c: &ColumnRef, slots: &[&TableRef]) -> String {
    if c.is_resolved() {
        if let Some(t) = slots.get(c.slot) {
            return format!("{}.{}", t.qualifier(), c.column);
        }
    }
    match &c.qualifier {
        Some(q) => format!("{q}.{}", c.column),
        None => c.column.clone(),
    }
}

pub fn sql_literal(v: &Value) -> String {
    match v {
        Value::Null => "NULL".to_string(),
        Value::Integer(i) => i.to_string(),
        Value::Real(r) => format_real(*r),
        Value::Text(s) => format!("'{}'", s.replace('\'', "''")),
        Value::Boolean(b) => if *b { "TRUE" } else { "FALSE" }.to_string(),
    }
}

fn operand(e: &Expr, slots: &[&TableRef]) -> String {
    match e {
        Expr::Arith { .. } => format!("({})", expr(e, slots)),
        _ => expr(e, slots),
    }
}

fn subquery(q: &Query) -> String {
    format!("({})", to_sql(q))
}

fn expr(e: &Expr, slots: &[&TableRef]) -> String {
    match e {
        Expr::Column(c) => column(c, slots),
        Expr::Wildcard(None) => "*".to_string(),
        Expr::Wildcard(Some(q)) => format!("{q}.*"),
        Expr::Literal(v) => sql_literal(v),
        Expr::Aggregate { func, arg } => match arg {
            AggArg::Star => format!("{func}(*)"),
            AggArg::Expr(inner) => format!("{func}({})", expr(inner, slots)),
        },
        Expr::Arith { op, left, right } => {
            format!("{} {} {}", operand(left, slots), op.symbol(), operand(right, slots))
        }
        Expr::Compare { op, left, right } => {
            format!("{} {} {}", expr(left, slots), op.symbol(), expr(right, slots))
        }
        Expr::Between { expr: x, low, high } => format!(
            "{} BETWEEN {} AND {}",
            expr(x, slots),
            expr(low, slots),
            expr(high, slots)
        ),
        Expr::InList { expr: x, list, negated } => {
            let items: Vec<String> = list.iter().map(sql_literal).collect();
            format!(
                "{} {}IN ({})",
                expr(x, slots),
                if *negated { "NOT " } else { "" },
                items.join(", ")
            )
        }
        Expr::InSubquery { expr: x, query, negated } => format!(
            "{} {}IN {}",
            expr(x, slots),
            if *negated { "NOT " } else { "" },
            subquery(query)
        ),
        Expr::Like { expr: x, pattern } => {
            format!("{} LIKE {}", expr(x, slots), sql_literal(&Value::Text(pattern.clone())))
        }
        Expr::Subquery(q) => subquery(q),
        Expr::And(a, b) => {
            let l = match **a {
                Expr::Or(..) => format!("({})", expr(a, slots)),
                _ => expr(a, slots),
            };
            let r = match **b {
                Expr::Or(..) | Expr::And(..) => format!("({})", expr(b, slots)),
                _ => expr(b, slots),
            };
            format!("{l} AND {r}")
        }
        Expr::Or(a, b) => {
            let r = match **b {
                Expr::Or(..) => format!("({})", expr(b, slots)),
                _ => expr(b, slots),
            };
            format!("{} OR {r}", expr(a, slots))
        }
    }
}
