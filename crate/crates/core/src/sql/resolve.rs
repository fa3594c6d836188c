//! Name resolution against a schema: binds every column reference to a FROM
//! slot and column index, expands `*`, and applies the dialect's structural
//! restrictions that need scope information.

use super::ast::*;
use super::error::SqlError;
use crate::schema::{RelationalSchema, Table};
use crate::value::Datatype;

struct Slot<'a> {
    qualifier: String,
    table: &'a Table,
}

type Scope<'a> = Vec<Slot<'a>>;

#[derive(Clone, Copy)]
enum AggPolicy {
    Allowed,
    Forbidden(&'static str),
}

pub fn resolve_query(query: Query, schema: &RelationalSchema) -> Result<Query, SqlError> {
    Resolver { schema }.query(query, &[])
}

struct Resolver<'s> {
    schema: &'s RelationalSchema,
}

impl<'s> Resolver<'s> {
    fn query(&self, query: Query, outer: &[&Scope<'s>]) -> Result<Query, SqlError> {
        match query {
            Query::Select(s) => Ok(Query::Select(Box::new(self.block(*s, outer)?))),
            Query::SetOp { op, left, right } => {
                let left = self.query(*left, outer)?;
                let right = self.query(*right, outer)?;
                if left.arity() != right.arity() {
                    return Err(SqlError::ArityMismatch(format!(
                        "{} branches project {} and {} columns",
                        op.keyword(),
                        left.arity(),
                        right.arity()
                    )));
                }
                Ok(Query::SetOp {
                    op,
                    left: Box::new(left),
                    right: Box::new(right),
                })
            }
        }
    }

    fn block(&self, mut s: Select, outer: &[&Scope<'s>]) -> Result<Select, SqlError> {
        let mut scope: Scope<'s> = Vec::new();
        for tref in s.slots() {
            let table = self
                .schema
                .table(&tref.table)
                .ok_or_else(|| SqlError::UnknownIdentifier(format!("table '{}'", tref.table)))?;
            let qualifier = tref.qualifier().to_string();
            if scope.iter().any(|slot| slot.qualifier == qualifier) {
                return Err(SqlError::AmbiguousIdentifier(format!(
                    "table reference '{qualifier}' appears more than once"
                )));
            }
            scope.push(Slot { qualifier, table });
        }

        let mut items = Vec::new();
        for item in std::mem::take(&mut s.items) {
            match item.expr {
                Expr::Wildcard(q) => {
                    for (slot_index, slot) in scope.iter().enumerate() {
                        if q.as_ref().is_some_and(|q| *q != slot.qualifier) {
                            continue;
                        }
                        for (index, column) in slot.table.columns.iter().enumerate() {
                            items.push(SelectItem {
                                expr: Expr::Column(ColumnRef {
                                    qualifier: None,
                                    table: slot.table.name.clone(),
                                    column: column.name.clone(),
                                    slot: slot_index,
                                    index,
                                }),
                                alias: None,
                            });
                        }
                    }
                    if let Some(q) = q {
                        if !scope.iter().any(|slot| slot.qualifier == q) {
                            return Err(SqlError::UnknownIdentifier(format!("table or alias '{q}'")));
                        }
                    }
                }
                expr => {
                    if expr.is_predicate() {
                        return Err(SqlError::unsupported("predicate in select list"));
                    }
                    let mut has_subquery = false;
                    expr.visit_shallow(&mut |e| {
                        if matches!(e, Expr::Subquery(_)) {
                            has_subquery = true;
                        }
                    });
                    if has_subquery {
                        return Err(SqlError::unsupported("subquery in select list"));
                    }
                    let expr = self.expr(expr, &scope, outer, AggPolicy::Allowed, None)?;
                    items.push(SelectItem {
                        expr,
                        alias: item.alias,
                    });
                }
            }
        }
        s.items = items;

        for (i, join) in s.joins.iter_mut().enumerate() {
            if let Some(on) = join.on.take() {
                require_predicate(&on, "ON")?;
                // An ON condition sees only the tables joined so far.
                let visible: Scope<'s> = scope[..i + 2]
                    .iter()
                    .map(|slot| Slot {
                        qualifier: slot.qualifier.clone(),
                        table: slot.table,
                    })
                    .collect();
                join.on = Some(self.expr(on, &visible, outer, AggPolicy::Forbidden("aggregate in ON"), None)?);
            }
        }

        if let Some(w) = s.where_clause.take() {
            require_predicate(&w, "WHERE")?;
            s.where_clause =
                Some(self.expr(w, &scope, outer, AggPolicy::Forbidden("aggregate in WHERE"), None)?);
        }
        infer_join_conditions(&mut s, &scope)?;

        let mut group_by = Vec::new();
        for c in std::mem::take(&mut s.group_by) {
            group_by.push(self.column(c, &scope, outer)?);
        }
        s.group_by = group_by;

        let aliases: Vec<(String, Expr)> = s
            .items
            .iter()
            .filter_map(|i| i.alias.as_ref().map(|a| (a.to_ascii_lowercase(), i.expr.clone())))
            .collect();

        if let Some(h) = s.having.take() {
            if s.group_by.is_empty() {
                return Err(SqlError::unsupported("HAVING without GROUP BY"));
            }
            require_predicate(&h, "HAVING")?;
            s.having = Some(self.expr(
                h,
                &scope,
                outer,
                AggPolicy::Allowed,
                Some(Aliases { list: &aliases, first: false }),
            )?);
        }

        let mut order_by = Vec::new();
        for item in std::mem::take(&mut s.order_by) {
            if let Expr::Literal(_) = item.expr {
                return Err(SqlError::unsupported("ORDER BY on a literal or position"));
            }
            if item.expr.is_predicate() {
                return Err(SqlError::unsupported("ORDER BY on a predicate"));
            }
            let expr = self.expr(
                item.expr,
                &scope,
                outer,
                AggPolicy::Allowed,
                Some(Aliases { list: &aliases, first: true }),
            )?;
            order_by.push(OrderItem {
                expr,
                direction: item.direction,
            });
        }
        s.order_by = order_by;
        Ok(s)
    }

    fn column(&self, c: ColumnRef, scope: &Scope<'s>, outer: &[&Scope<'s>]) -> Result<ColumnRef, SqlError> {
        if c.is_resolved() {
            return Ok(c);
        }
        let found = find_column(scope, &c)?;
        match found {
            Some((slot, index)) => Ok(ColumnRef {
                qualifier: None,
                table: scope[slot].table.name.clone(),
                column: c.column,
                slot,
                index,
            }),
            None => {
                for o in outer {
                    if let Ok(Some(_)) = find_column(o, &c) {
                        return Err(SqlError::unsupported("correlated subquery"));
                    }
                }
                Err(match &c.qualifier {
                    Some(q) if !scope.iter().any(|s| &s.qualifier == q) => {
                        SqlError::UnknownIdentifier(format!("table or alias '{q}'"))
                    }
                    Some(q) => SqlError::UnknownIdentifier(format!("column '{q}.{}'", c.column)),
                    None => SqlError::UnknownIdentifier(format!("column '{}'", c.column)),
                })
            }
        }
    }

    fn subquery(&self, q: Query, scope: &Scope<'s>, outer: &[&Scope<'s>]) -> Result<Query, SqlError> {
        let mut nested: Vec<&Scope<'s>> = outer.to_vec();
        nested.push(scope);
        let q = self.query(q, &nested)?;
        if q.arity() != 1 {
            return Err(SqlError::ArityMismatch(format!(
                "subquery used as a value projects {} columns",
                q.arity()
            )));
        }
        Ok(q)
    }

    fn expr(
        &self,
        e: Expr,
        scope: &Scope<'s>,
        outer: &[&Scope<'s>],
        aggs: AggPolicy,
        aliases: Option<Aliases<'_>>,
    ) -> Result<Expr, SqlError> {
        let rec = |e: Expr| self.expr(e, scope, outer, aggs, aliases);
        let boxed = |e: Box<Expr>| rec(*e).map(Box::new);
        Ok(match e {
            Expr::Column(c) => {
                if let (Some(a), None) = (aliases, &c.qualifier) {
                    let alias_hit = a.list.iter().find(|(name, _)| *name == c.column);
                    if let Some((_, target)) = alias_hit {
                        if a.first || find_column(scope, &c)?.is_none() {
                            return Ok(target.clone());
                        }
                    }
                }
                Expr::Column(self.column(c, scope, outer)?)
            }
            Expr::Wildcard(_) => return Err(SqlError::unsupported("wildcard outside the select list")),
            Expr::Literal(v) => Expr::Literal(v),
            Expr::Aggregate { func, arg } => {
                if let AggPolicy::Forbidden(what) = aggs {
                    return Err(SqlError::unsupported(what));
                }
                let arg = match arg {
                    AggArg::Star => AggArg::Star,
                    AggArg::Expr(inner) => {
                        if inner.is_predicate() {
                            return Err(SqlError::unsupported("predicate inside aggregate"));
                        }
                        let mut has_subquery = false;
                        inner.visit_shallow(&mut |e| {
                            if matches!(e, Expr::Subquery(_)) {
                                has_subquery = true;
                            }
                        });
                        if has_subquery {
                            return Err(SqlError::unsupported("subquery inside aggregate"));
                        }
                        AggArg::Expr(Box::new(self.expr(
                            *inner,
                            scope,
                            outer,
                            AggPolicy::Forbidden("nested aggregate"),
                            None,
                        )?))
                    }
                };
                Expr::Aggregate { func, arg }
            }
            Expr::Arith { op, left, right } => {
                if left.is_predicate() || right.is_predicate() {
                    return Err(SqlError::unsupported("arithmetic over a predicate"));
                }
                Expr::Arith {
                    op,
                    left: boxed(left)?,
                    right: boxed(right)?,
                }
            }
            Expr::Compare { op, left, right } => {
                if left.is_predicate() || right.is_predicate() {
                    return Err(SqlError::unsupported("comparison of predicates"));
                }
                Expr::Compare {
                    op,
                    left: boxed(left)?,
                    right: boxed(right)?,
                }
            }
            Expr::Between { expr, low, high } => Expr::Between {
                expr: boxed(expr)?,
                low: boxed(low)?,
                high: boxed(high)?,
            },
            Expr::InList { expr, list, negated } => Expr::InList {
                expr: boxed(expr)?,
                list,
                negated,
            },
            Expr::InSubquery { expr, query, negated } => Expr::InSubquery {
                expr: boxed(expr)?,
                query: Box::new(self.subquery(*query, scope, outer)?),
                negated,
            },
            Expr::Like { expr, pattern } => Expr::Like {
                expr: boxed(expr)?,
                pattern,
            },
            Expr::Subquery(q) => Expr::Subquery(Box::new(self.subquery(*q, scope, outer)?)),
            Expr::And(a, b) => {
                require_predicate(&a, "AND")?;
                require_predicate(&b, "AND")?;
                Expr::And(boxed(a)?, boxed(b)?)
            }
            Expr::Or(a, b) => {
                require_predicate(&a, "OR")?;
                require_predicate(&b, "OR")?;
                Expr::Or(boxed(a)?, boxed(b)?)
            }
        })
    }
}

#[derive(Clone, Copy)]
struct Aliases<'a> {
    list: &'a [(String, Expr)],
    /// Whether select-list aliases shadow table columns (ORDER BY) or the
    /// other way round (HAVING).
    first: bool,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    parent[x] = root;
    root
}

fn equality_links(e: &Expr, parent: &mut [usize]) {
    match e {
        Expr::And(a, b) => {
            equality_links(a, parent);
            equality_links(b, parent);
        }
        Expr::Compare { op: CmpOp::Eq, left, right } => {
            if let (Expr::Column(a), Expr::Column(b)) = (left.as_ref(), right.as_ref()) {
                let (x, y) = (find(parent, a.slot), find(parent, b.slot));
                parent[x] = y;
            }
        }
        _ => {}
    }
}

/// Gives a join without ON, whose table no equality ties to an earlier
/// one, the single foreign key between it and the tables before it. Two or
/// more candidate keys are refused rather than guessed; none is left for
/// lowering to reject.
fn infer_join_conditions(s: &mut Select, scope: &Scope<'_>) -> Result<(), SqlError> {
    let mut parent: Vec<usize> = (0..scope.len()).collect();
    for e in s.joins.iter().filter_map(|j| j.on.as_ref()).chain(&s.where_clause) {
        equality_links(e, &mut parent);
    }
    for i in 0..s.joins.len() {
        let slot = i + 1;
        if s.joins[i].on.is_some() || (0..slot).any(|j| find(&mut parent, j) == find(&mut parent, slot)) {
            continue;
        }
        let column = |at: usize, name: &str| {
            scope[at].table.column_index(name).map(|index| ColumnRef {
                qualifier: None,
                table: scope[at].table.name.clone(),
                column: scope[at].table.columns[index].name.clone(),
                slot: at,
                index,
            })
        };
        let mut candidates = Vec::new();
        for earlier in 0..slot {
            for (from, to) in [(slot, earlier), (earlier, slot)] {
                for fk in &scope[from].table.foreign_keys {
                    if fk.ref_table != scope[to].table.name {
                        continue;
                    }
                    if let (Some(a), Some(b)) = (column(from, &fk.column), column(to, &fk.ref_column)) {
                        candidates.push((earlier, a, b));
                    }
                }
            }
        }
        match candidates.len() {
            0 => {}
            1 => {
                let (earlier, a, b) = candidates.remove(0);
                s.joins[i].on = Some(Expr::Compare {
                    op: CmpOp::Eq,
                    left: Box::new(Expr::Column(a)),
                    right: Box::new(Expr::Column(b)),
                });
                let (x, y) = (find(&mut parent, slot), find(&mut parent, earlier));
                parent[x] = y;
            }
            _ => {
                return Err(SqlError::unsupported(format!(
                    "ambiguous join path to '{}': {} foreign keys qualify",
                    scope[slot].table.name,
                    candidates.len()
                )))
            }
        }
    }
    Ok(())
}

fn require_predicate(e: &Expr, clause: &str) -> Result<(), SqlError> {
    if e.is_predicate() {
        Ok(())
    } else {
        Err(SqlError::unsupported(format!("non-predicate operand of {clause}")))
    }
}

fn find_column(scope: &Scope<'_>, c: &ColumnRef) -> Result<Option<(usize, usize)>, SqlError> {
    let mut hits = Vec::new();
    for (slot_index, slot) in scope.iter().enumerate() {
        if let Some(q) = &c.qualifier {
            if *q != slot.qualifier {
                continue;
            }
        }
        if let Some(index) = slot.table.column_index(&c.column) {
            hits.push((slot_index, index));
        }
    }
    match hits.len() {
        0 => Ok(None),
        1 => Ok(Some(hits[0])),
        _ => Err(SqlError::AmbiguousIdentifier(format!("column '{}'", c.column))),
    }
}

/// Static type of a resolved expression, `None` when it cannot be known.
pub fn expr_type(e: &Expr, schema: &RelationalSchema) -> Option<Datatype> {
    match e {
        Expr::Column(c) => schema.column_type(&c.table, &c.column),
        Expr::Literal(v) => v.datatype(),
        Expr::Aggregate { func, arg } => match func {
            AggFunc::Count => Some(Datatype::Integer),
            AggFunc::Avg => Some(Datatype::Real),
            _ => match arg {
                AggArg::Star => Some(Datatype::Integer),
                AggArg::Expr(inner) => expr_type(inner, schema),
            },
        },
        Expr::Arith { left, right, .. } => {
            match (expr_type(left, schema)?, expr_type(right, schema)?) {
                (Datatype::Integer, Datatype::Integer) => Some(Datatype::Integer),
                (a, b) if a.is_numeric() && b.is_numeric() => Some(Datatype::Real),
                _ => None,
            }
        }
        Expr::Subquery(q) => q.first_block().items.first().and_then(|i| expr_type(&i.expr, schema)),
        Expr::Wildcard(_) => None,
        _ => Some(Datatype::Boolean),
    }
}
