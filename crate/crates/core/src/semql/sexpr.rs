//! Stable s-expression text for trees, used in golden files and debugging.
//!
//! ```text
//! (R
//!   (tables airports)
//!   (select (ref city airports@0))
//!   (filter (= (ref airportcode airports@0) 'MMI')))
//! ```

use super::tree::*;
use crate::sql::Direction;
use crate::value::{format_real, Value};

pub fn to_sexpr(tree: &SemQlTree) -> String {
    match tree {
        SemQlTree::Single(r) => block(r, 0),
        SemQlTree::Intersect(a, b) | SemQlTree::Union(a, b) | SemQlTree::Except(a, b) => format!(
            "({}\n  {}\n  {})",
            tree.set_op_name().unwrap_or_default(),
            block(a, 1),
            block(b, 1)
        ),
    }
}

fn value(v: &Value) -> String {
    match v {
        Value::Text(s) => format!("'{}'", s.replace('\\', "\\\\").replace('\'', "\\'")),
        Value::Real(r) => format_real(*r),
        other => other.to_string(),
    }
}

fn col(c: &ColRef) -> String {
    format!(
        "{} {}@{}",
        c.column.as_deref().unwrap_or("*"),
        c.table,
        c.slot
    )
}

fn op(o: &Op) -> String {
    match o {
        Op::Ref(c) => format!("(ref {})", col(c)),
        Op::Arith(k, a, b) => format!("(arith {} ({}) ({}))", k.symbol(), col(a), col(b)),
    }
}

fn a_expr(a: &AExpr) -> String {
    match a {
        AExpr::Agg(f, o) => format!("(agg {f} {})", op(o)),
        AExpr::Plain(o) => op(o),
    }
}

fn filter(f: &Filter) -> String {
    match f {
        Filter::And(a, b) => format!("(and {} {})", filter(a), filter(b)),
        Filter::Or(a, b) => format!("(or {} {})", filter(a), filter(b)),
        Filter::Cmp(k, a, Operand::Value(v)) => format!("({} {} {})", k.symbol(), a_expr(a), value(v)),
        Filter::Cmp(k, a, Operand::Query(r)) => {
            format!("({} {} {})", k.symbol(), a_expr(a), inline_block(r))
        }
        Filter::Between(a, bounds) => {
            let b: Vec<String> = bounds.iter().map(value).collect();
            format!("(between {} {})", a_expr(a), b.join(" "))
        }
        Filter::BetweenQuery(a, r) => format!("(between {} {})", a_expr(a), inline_block(r)),
        Filter::In(a, r) => format!("(in {} {})", a_expr(a), inline_block(r)),
        Filter::NotIn(a, r) => format!("(not_in {} {})", a_expr(a), inline_block(r)),
        Filter::Like(a, p) => format!("(like {} {})", a_expr(a), value(&Value::Text(p.clone()))),
    }
}

fn clauses(r: &RBlock) -> Vec<String> {
    let mut out = vec![format!("(tables {})", r.tables.join(" "))];
    if !r.join_path.is_empty() {
        let edges: Vec<String> = r
            .join_path
            .iter()
            .map(|e| {
                format!(
                    "({}@{}.{} {}@{}.{})",
                    r.tables[e.from_slot], e.from_slot, e.column, r.tables[e.to_slot], e.to_slot, e.ref_column
                )
            })
            .collect();
        out.push(format!("(join {})", edges.join(" ")));
    }
    let items: Vec<String> = r.select.items.iter().map(a_expr).collect();
    out.push(format!(
        "(select{} {})",
        if r.select.distinct { " distinct" } else { "" },
        items.join(" ")
    ));
    if let Some(f) = &r.filter {
        out.push(format!("(filter {})", filter(f)));
    }
    if !r.group_by.is_empty() {
        let keys: Vec<String> = r.group_by.iter().map(|c| format!("({})", col(c))).collect();
        out.push(format!("(group {})", keys.join(" ")));
    }
    match &r.order {
        None => {}
        Some(OrderClause::Order(d, a)) => {
            let d = match d {
                Direction::Asc => "asc",
                Direction::Desc => "desc",
            };
            out.push(format!("(order {d} {})", a_expr(a)));
        }
        Some(OrderClause::Superlative(k, n, a)) => {
            let k = match k {
                SuperlativeKind::Most => "most",
                SuperlativeKind::Least => "least",
            };
            out.push(format!("(superlative {k} {n} {})", a_expr(a)));
        }
    }
    out
}

fn block(r: &RBlock, depth: usize) -> String {
    let pad = "  ".repeat(depth + 1);
    let mut s = String::from("(R");
    for c in clauses(r) {
        s.push('\n');
        s.push_str(&pad);
        s.push_str(&c);
    }
    s.push(')');
    s
}

fn inline_block(r: &RBlock) -> String {
    format!("(R {})", clauses(r).join(" "))
}
