//! Lowering of resolved SQL into SemQL. Joins become a foreign-key path
//! annotation, WHERE / ON / HAVING predicates merge into one filter, and
//! ORDER BY with or without LIMIT becomes a superlative or an order.

use std::num::NonZeroU64;

use super::error::SemQlError;
use super::tree::*;
use crate::schema::RelationalSchema;
use crate::sql::{AggArg, AggFunc, ColumnRef, CmpOp, Direction, Expr, Query, Select, SetOpKind};

pub fn lower_to_semql(query: &Query, schema: &RelationalSchema) -> Result<SemQlTree, SemQlError> {
    match query {
        Query::Select(s) => Ok(SemQlTree::Single(Box::new(lower_block(s, schema)?))),
        Query::SetOp { op, left, right } => {
            let (Query::Select(l), Query::Select(r)) = (left.as_ref(), right.as_ref()) else {
                return Err(SemQlError::unsupported("chained set operations"));
            };
            let l = Box::new(lower_block(l, schema)?);
            let r = Box::new(lower_block(r, schema)?);
            if l.select.items.len() != r.select.items.len() {
                return Err(SemQlError::Grammar(format!(
                    "set operation branches project {} and {} items",
                    l.select.items.len(),
                    r.select.items.len()
                )));
            }
            Ok(match op {
                SetOpKind::Intersect => SemQlTree::Intersect(l, r),
                SetOpKind::Union => SemQlTree::Union(l, r),
                SetOpKind::Except => SemQlTree::Except(l, r),
            })
        }
    }
}

fn col(c: &ColumnRef) -> ColRef {
    ColRef::new(&c.column, &c.table, c.slot)
}

fn conjuncts<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other),
    }
}

/// Foreign-key edge for `a = b`, in whichever direction is declared.
fn fk_edge(a: &ColumnRef, b: &ColumnRef, schema: &RelationalSchema) -> Option<JoinEdge> {
    let declared = |x: &ColumnRef, y: &ColumnRef| {
        schema
            .table(&x.table)
            .and_then(|t| t.foreign_key(&x.column))
            .is_some_and(|fk| fk.ref_table == y.table && fk.ref_column == y.column)
    };
    if declared(a, b) {
        Some(JoinEdge {
            from_slot: a.slot,
            column: a.column.clone(),
            to_slot: b.slot,
            ref_column: b.column.clone(),
        })
    } else if declared(b, a) {
        Some(JoinEdge {
            from_slot: b.slot,
            column: b.column.clone(),
            to_slot: a.slot,
            ref_column: a.column.clone(),
        })
    } else {
        None
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    parent[x] = root;
    root
}

pub(crate) fn lower_block(s: &Select, schema: &RelationalSchema) -> Result<RBlock, SemQlError> {
    if s.items.len() > MAX_PROJECTIONS {
        return Err(SemQlError::ProjectionOverflow(s.items.len()));
    }
    let tables: Vec<String> = s.slots().iter().map(|t| t.table.clone()).collect();

    let mut conditions: Vec<&Expr> = Vec::new();
    for j in &s.joins {
        if let Some(on) = &j.on {
            conjuncts(on, &mut conditions);
        }
    }
    if let Some(w) = &s.where_clause {
        conjuncts(w, &mut conditions);
    }

    let mut join_path = Vec::new();
    let mut residual = Vec::new();
    for cond in conditions {
        if let Expr::Compare { op: CmpOp::Eq, left, right } = cond {
            if let (Expr::Column(a), Expr::Column(b)) = (left.as_ref(), right.as_ref()) {
                if a.slot != b.slot {
                    match fk_edge(a, b, schema) {
                        Some(edge) => {
                            join_path.push(edge);
                            continue;
                        }
                        None => {
                            return Err(SemQlError::unsupported(format!(
                                "join condition {}.{} = {}.{} is not a foreign key",
                                a.table, a.column, b.table, b.column
                            )))
                        }
                    }
                }
            }
        }
        residual.push(cond);
    }

    let mut parent: Vec<usize> = (0..tables.len()).collect();
    for e in &join_path {
        let (a, b) = (find(&mut parent, e.from_slot), find(&mut parent, e.to_slot));
        parent[a] = b;
    }
    for i in 1..tables.len() {
        if find(&mut parent, i) != find(&mut parent, 0) {
            return Err(SemQlError::unsupported(format!(
                "no foreign-key join path between '{}' and '{}'",
                tables[0], tables[i]
            )));
        }
    }

    let anchor = (tables[0].as_str(), 0usize);
    let mut filter: Option<Filter> = None;
    let mut push = |f: Filter| {
        filter = Some(match filter.take() {
            None => f,
            Some(prev) => Filter::and(prev, f),
        });
    };
    for cond in residual {
        push(lower_predicate(cond, anchor, schema, false)?);
    }
    let mut having_plain: Vec<ColRef> = Vec::new();
    if let Some(h) = &s.having {
        let mut hs = Vec::new();
        conjuncts(h, &mut hs);
        for cond in hs {
            for c in cond.bare_columns() {
                having_plain.push(col(c));
            }
            push(lower_predicate(cond, anchor, schema, true)?);
        }
    }

    let mut items = Vec::with_capacity(s.items.len());
    for item in &s.items {
        items.push(lower_a(&item.expr, anchor)?);
    }
    let select = Projection::new(s.distinct, items)?;

    let group_by: Vec<ColRef> = s.group_by.iter().map(col).collect();

    let order = match (s.order_by.as_slice(), s.limit) {
        ([], None) => None,
        ([], Some(_)) => return Err(SemQlError::unsupported("LIMIT without ORDER BY")),
        ([item], limit) => {
            let a = lower_a(&item.expr, anchor)?;
            Some(match limit {
                None => OrderClause::Order(item.direction, a),
                Some(n) => {
                    let n = NonZeroU64::new(n)
                        .ok_or_else(|| SemQlError::unsupported("LIMIT 0"))?;
                    let kind = match item.direction {
                        Direction::Desc => SuperlativeKind::Most,
                        Direction::Asc => SuperlativeKind::Least,
                    };
                    OrderClause::Superlative(kind, n, a)
                }
            })
        }
        _ => return Err(SemQlError::unsupported("ORDER BY with several keys")),
    };

    let block = RBlock {
        select,
        filter,
        order,
        tables,
        join_path,
        group_by,
    };
    check_grouping(&block, &having_plain)?;
    Ok(block)
}

/// Rejects grouping shapes whose SPARQL form would not be equivalent.
fn check_grouping(r: &RBlock, having_plain: &[ColRef]) -> Result<(), SemQlError> {
    if !r.is_grouped() {
        return Ok(());
    }
    let plain_items: Vec<&AExpr> = r.select.items.iter().filter(|a| !a.is_aggregate()).collect();
    if r.group_by.is_empty() {
        let plain_order = r.order.as_ref().is_some_and(|o| !o.expr().is_aggregate());
        if !plain_items.is_empty() || plain_order {
            return Err(SemQlError::unsupported(
                "non-aggregated column alongside an aggregate without GROUP BY",
            ));
        }
        return Ok(());
    }
    let is_key = |c: &ColRef| {
        r.group_by.contains(c)
            || plain_items
                .iter()
                .any(|a| matches!(a, AExpr::Plain(Op::Ref(p)) if p == c))
    };
    if let Some(o) = &r.order {
        let a = o.expr();
        if !a.is_aggregate() && !plain_items.contains(&a) {
            let keyed = matches!(a, AExpr::Plain(Op::Ref(c)) if is_key(c));
            if !keyed {
                return Err(SemQlError::unsupported("ORDER BY on a non-grouped column"));
            }
        }
    }
    for c in having_plain {
        if !is_key(c) {
            return Err(SemQlError::unsupported("HAVING on a non-grouped column"));
        }
    }
    Ok(())
}

fn lower_op(e: &Expr) -> Result<Op, SemQlError> {
    match e {
        Expr::Column(c) => Ok(Op::Ref(col(c))),
        Expr::Arith { op, left, right } => match (left.as_ref(), right.as_ref()) {
            (Expr::Column(a), Expr::Column(b)) => Ok(Op::Arith(*op, col(a), col(b))),
            (Expr::Literal(_), _) | (_, Expr::Literal(_)) => {
                Err(SemQlError::unsupported("arithmetic with a literal"))
            }
            (Expr::Aggregate { .. }, _) | (_, Expr::Aggregate { .. }) => {
                Err(SemQlError::unsupported("arithmetic over aggregates"))
            }
            _ => Err(SemQlError::unsupported("nested arithmetic")),
        },
        Expr::Literal(_) => Err(SemQlError::unsupported("literal used as a column")),
        Expr::Aggregate { .. } => Err(SemQlError::unsupported("nested aggregate")),
        Expr::Subquery(_) => Err(SemQlError::unsupported("subquery used as a column")),
        _ => Err(SemQlError::unsupported("predicate used as a column")),
    }
}

fn lower_a(e: &Expr, anchor: (&str, usize)) -> Result<AExpr, SemQlError> {
    match e {
        Expr::Aggregate { func, arg } => match arg {
            AggArg::Star => Ok(AExpr::count_star(anchor.0, anchor.1)),
            AggArg::Expr(inner) => {
                if matches!(inner.as_ref(), Expr::Literal(_)) {
                    return Err(SemQlError::unsupported("aggregate over a literal"));
                }
                Ok(AExpr::Agg(*func, lower_op(inner)?))
            }
        },
        Expr::Literal(_) => Err(SemQlError::unsupported("literal in select list")),
        other => Ok(AExpr::Plain(lower_op(other)?)),
    }
}

fn subquery_block(q: &Query, schema: &RelationalSchema) -> Result<RBlock, SemQlError> {
    match q {
        Query::Select(s) => lower_block(s, schema),
        Query::SetOp { .. } => Err(SemQlError::unsupported("set operation in a subquery")),
    }
}

/// Whether a block yields at most one row whatever the data.
fn is_single_row(r: &RBlock) -> bool {
    let aggregate_only = r.group_by.is_empty() && r.select.items.iter().all(AExpr::is_aggregate);
    aggregate_only || r.order.as_ref().and_then(OrderClause::limit) == Some(1)
}

fn lower_predicate(
    e: &Expr,
    anchor: (&str, usize),
    schema: &RelationalSchema,
    in_having: bool,
) -> Result<Filter, SemQlError> {
    let sub = |q: &Query| -> Result<Box<RBlock>, SemQlError> {
        if in_having {
            return Err(SemQlError::unsupported("subquery in HAVING"));
        }
        subquery_block(q, schema).map(Box::new)
    };
    match e {
        Expr::And(a, b) => Ok(Filter::and(
            lower_predicate(a, anchor, schema, in_having)?,
            lower_predicate(b, anchor, schema, in_having)?,
        )),
        Expr::Or(a, b) => Ok(Filter::or(
            lower_predicate(a, anchor, schema, in_having)?,
            lower_predicate(b, anchor, schema, in_having)?,
        )),
        Expr::Compare { op, left, right } => {
            let (op, subject, other) = match (left.as_ref(), right.as_ref()) {
                (Expr::Literal(_), Expr::Literal(_)) => {
                    return Err(SemQlError::unsupported("comparison between literals"))
                }
                (Expr::Literal(_) | Expr::Subquery(_), x) => (op.flipped(), x, left.as_ref()),
                (x, _) => (*op, x, right.as_ref()),
            };
            let a = lower_a(subject, anchor)?;
            let operand = match other {
                Expr::Literal(v) => Operand::Value(v.clone()),
                Expr::Subquery(q) => {
                    let r = sub(q)?;
                    if !is_single_row(&r) {
                        return Err(SemQlError::unsupported(
                            "scalar subquery that may return several rows",
                        ));
                    }
                    Operand::Query(r)
                }
                _ => return Err(SemQlError::unsupported("comparison between two columns")),
            };
            Ok(Filter::Cmp(op, a, operand))
        }
        Expr::Between { expr, low, high } => {
            let a = lower_a(expr, anchor)?;
            match (low.as_ref(), high.as_ref()) {
                (Expr::Literal(l), Expr::Literal(h)) => Ok(Filter::between(a, l.clone(), h.clone())),
                _ => Err(SemQlError::unsupported("non-literal BETWEEN bound")),
            }
        }
        Expr::InList { expr, list, negated } => {
            let a = lower_a(expr, anchor)?;
            let op = if *negated { CmpOp::Ne } else { CmpOp::Eq };
            let mut out: Option<Filter> = None;
            for v in list {
                let f = Filter::Cmp(op, a.clone(), Operand::Value(v.clone()));
                out = Some(match out {
                    None => f,
                    Some(prev) if *negated => Filter::and(prev, f),
                    Some(prev) => Filter::or(prev, f),
                });
            }
            out.ok_or_else(|| SemQlError::unsupported("empty IN list"))
        }
        Expr::InSubquery { expr, query, negated } => {
            let a = lower_a(expr, anchor)?;
            let r = sub(query)?;
            Ok(if *negated {
                Filter::NotIn(a, r)
            } else {
                Filter::In(a, r)
            })
        }
        Expr::Like { expr, pattern } => Ok(Filter::Like(lower_a(expr, anchor)?, pattern.clone())),
        _ => Err(SemQlError::unsupported("non-predicate condition")),
    }
}

/// Aggregate kinds used anywhere in a tree.
pub fn aggregate_kinds(tree: &SemQlTree) -> Vec<AggFunc> {
    fn from_a(a: &AExpr, out: &mut Vec<AggFunc>) {
        if let AExpr::Agg(f, _) = a {
            out.push(*f);
        }
    }
    fn from_filter(f: &Filter, out: &mut Vec<AggFunc>) {
        match f {
            Filter::And(a, b) | Filter::Or(a, b) => {
                from_filter(a, out);
                from_filter(b, out);
            }
            Filter::Cmp(_, a, operand) => {
                from_a(a, out);
                if let Operand::Query(r) = operand {
                    from_block(r, out);
                }
            }
            Filter::Between(a, _) | Filter::Like(a, _) => from_a(a, out),
            Filter::BetweenQuery(a, r) | Filter::In(a, r) | Filter::NotIn(a, r) => {
                from_a(a, out);
                from_block(r, out);
            }
        }
    }
    fn from_block(r: &RBlock, out: &mut Vec<AggFunc>) {
        for a in &r.select.items {
            from_a(a, out);
        }
        if let Some(f) = &r.filter {
            from_filter(f, out);
        }
        if let Some(o) = &r.order {
            from_a(o.expr(), out);
        }
    }
    let mut out = Vec::new();
    for r in tree.blocks() {
        from_block(r, &mut out);
    }
    out
}
