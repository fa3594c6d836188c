//! Deterministic SemQL to SPARQL emission.
//!
//! Naming: entity variables `?t1, ?t2, ...` are numbered across the whole
//! query (subqueries included), column values are `?t{n}_{column}`,
//! projected aggregates `?agg, ?agg2, ...`, arithmetic binds `?expr{n}` and
//! the value of a scalar subquery `?agg_t{n}` after its first table.

use super::error::SparqlError;
use super::group::complete_group_by;
use super::model::*;
use crate::mapping::{Ontology, RDF_TYPE};
use crate::semql::*;
use crate::sql::{AggFunc, ArithOp, CmpOp};
use crate::value::{Datatype, Value};

pub fn emit_sparql(tree: &SemQlTree, ontology: &Ontology) -> Result<SparqlQuery, SparqlError> {
    let mut e = Emitter::new(ontology);
    match tree {
        SemQlTree::Single(r) => e.block(r, Role::Top),
        _ => e.set_operation(tree),
    }
}

/// Emits an intersect, union or except root.
pub fn lower_set_operation(tree: &SemQlTree, ontology: &Ontology) -> Result<SparqlQuery, SparqlError> {
    Emitter::new(ontology).set_operation(tree)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Top,
    /// Single value compared against (`?agg_t{n}` naming).
    Scalar,
    /// Value set of IN / NOT IN; projected distinct.
    Member,
    /// Two bounds of a between.
    Bounds,
    /// Branch of a set operation.
    Branch,
}

struct Emitter<'o> {
    ontology: &'o Ontology,
    tables: usize,
    aggs: usize,
    exprs: usize,
}

/// Per-block emission state.
#[derive(Default)]
struct Block {
    slot_vars: Vec<String>,
    slot_tables: Vec<String>,
    data: Vec<(usize, String, String)>,
    binds: Vec<(Op, String, SExpr)>,
    joined: Vec<PatternElement>,
    /// Sum / avg must yield no value over zero rows, as in SQL.
    guard_empty: bool,
}

impl<'o> Emitter<'o> {
    fn new(ontology: &'o Ontology) -> Emitter<'o> {
        Emitter {
            ontology,
            tables: 0,
            aggs: 0,
            exprs: 0,
        }
    }

    fn entity_var(&mut self) -> String {
        self.tables += 1;
        format!("t{}", self.tables)
    }

    fn agg_var(&mut self) -> String {
        self.aggs += 1;
        if self.aggs == 1 {
            "agg".to_string()
        } else {
            format!("agg{}", self.aggs)
        }
    }

    fn expr_var(&mut self) -> String {
        self.exprs += 1;
        format!("expr{}", self.exprs)
    }

    fn column_var(&self, b: &mut Block, c: &ColRef) -> Result<String, SparqlError> {
        let Some(column) = &c.column else {
            return Err(SparqlError::EmissionBug(format!(
                "'*' of '{}' used outside count",
                c.table
            )));
        };
        let slot_var = b
            .slot_vars
            .get(c.slot)
            .ok_or_else(|| SparqlError::EmissionBug(format!("slot {} out of range", c.slot)))?;
        let var = format!("{slot_var}_{column}");
        if !b.data.iter().any(|(_, _, v)| *v == var) {
            if self.ontology.data_property(&c.table, column).is_none() {
                return Err(SparqlError::UnknownProperty(format!(
                    "data property for '{}.{column}'",
                    c.table
                )));
            }
            b.data.push((c.slot, column.clone(), var.clone()));
        }
        Ok(var)
    }

    fn column_type(&self, c: &ColRef) -> Option<Datatype> {
        let column = c.column.as_ref()?;
        self.ontology.data_property(&c.table, column).map(|p| p.range)
    }

    fn op(&mut self, b: &mut Block, op: &Op) -> Result<SExpr, SparqlError> {
        match op {
            Op::Ref(c) => Ok(SExpr::Var(self.column_var(b, c)?)),
            Op::Arith(kind, x, y) => {
                if let Some((_, var, _)) = b.binds.iter().find(|(o, _, _)| o == op) {
                    return Ok(SExpr::Var(var.clone()));
                }
                let l = SExpr::Var(self.column_var(b, x)?);
                let r = SExpr::Var(self.column_var(b, y)?);
                let mut expr = SExpr::Arith(*kind, Box::new(l), Box::new(r));
                let integers = self.column_type(x) == Some(Datatype::Integer)
                    && self.column_type(y) == Some(Datatype::Integer);
                if *kind == ArithOp::Div && integers {
                    expr = SExpr::CastInteger(Box::new(expr));
                }
                let var = self.expr_var();
                b.binds.push((op.clone(), var.clone(), expr));
                Ok(SExpr::Var(var))
            }
        }
    }

    fn a_expr(&mut self, b: &mut Block, a: &AExpr) -> Result<SExpr, SparqlError> {
        match a {
            AExpr::Plain(op) => self.op(b, op),
            AExpr::Agg(func, Op::Ref(c)) if c.column.is_none() => {
                if *func != AggFunc::Count {
                    return Err(SparqlError::EmissionBug(format!("{func}(*)")));
                }
                Ok(SExpr::Aggregate(Aggregate {
                    func: AggFunc::Count,
                    arg: None,
                }))
            }
            AExpr::Agg(func, op) => {
                let arg = self.op(b, op)?;
                let agg = SExpr::Aggregate(Aggregate {
                    func: *func,
                    arg: Some(Box::new(arg.clone())),
                });
                if b.guard_empty && matches!(func, AggFunc::Sum | AggFunc::Avg) {
                    let count = SExpr::Aggregate(Aggregate {
                        func: AggFunc::Count,
                        arg: Some(Box::new(arg)),
                    });
                    return Ok(SExpr::If(
                        Box::new(SExpr::cmp(CmpOp::Gt, count, SExpr::Const(Value::Integer(0)))),
                        Box::new(agg),
                        Box::new(SExpr::Coalesce(Vec::new())),
                    ));
                }
                Ok(agg)
            }
        }
    }

    fn block(&mut self, r: &RBlock, role: Role) -> Result<SparqlQuery, SparqlError> {
        let mut b = Block {
            guard_empty: r.group_by.is_empty(),
            ..Block::default()
        };
        for t in &r.tables {
            b.slot_vars.push(self.entity_var());
            b.slot_tables.push(t.clone());
        }
        let mut elements = Vec::new();
        for (var, table) in b.slot_vars.iter().zip(&b.slot_tables) {
            let class = self
                .ontology
                .class(table)
                .ok_or_else(|| SparqlError::UnknownProperty(format!("class for table '{table}'")))?;
            elements.push(PatternElement::Triple(TriplePattern::new(
                PatternTerm::Var(var.clone()),
                RDF_TYPE,
                PatternTerm::Iri(class.iri.clone()),
            )));
        }
        for edge in &r.join_path {
            let (Some(from), Some(to)) = (b.slot_vars.get(edge.from_slot), b.slot_vars.get(edge.to_slot)) else {
                return Err(SparqlError::EmissionBug("join edge slot out of range".into()));
            };
            let table = &r.tables[edge.from_slot];
            let prop = self.ontology.object_property(table, &edge.column).ok_or_else(|| {
                SparqlError::UnknownProperty(format!("object property for '{table}.{}'", edge.column))
            })?;
            elements.push(PatternElement::Triple(TriplePattern::new(
                PatternTerm::Var(from.clone()),
                &prop.iri,
                PatternTerm::Var(to.clone()),
            )));
        }

        // Projection.
        let mut projections: Vec<Projected> = Vec::new();
        let mut outputs: Vec<String> = Vec::new();
        for (i, a) in r.select.items.iter().enumerate() {
            let expr = self.a_expr(&mut b, a)?;
            let projected = match (a.is_aggregate(), expr) {
                (true, expr) => {
                    let var = if role == Role::Scalar && i == 0 {
                        format!("agg_{}", b.slot_vars[0])
                    } else {
                        self.agg_var()
                    };
                    Projected::Expr(expr, var)
                }
                (false, SExpr::Var(v)) if !outputs.contains(&v) => Projected::Var(v),
                (false, SExpr::Var(v)) => {
                    let mut k = 2;
                    while outputs.contains(&format!("{v}_{k}")) {
                        k += 1;
                    }
                    Projected::Expr(SExpr::Var(v.clone()), format!("{v}_{k}"))
                }
                (false, _) => return Err(SparqlError::EmissionBug("plain item is not a variable".into())),
            };
            outputs.push(projected.output().to_string());
            projections.push(projected);
        }

        // Filters and having.
        let mut filters = Vec::new();
        let mut having = Vec::new();
        if let Some(f) = &r.filter {
            for conj in f.conjuncts() {
                if conj.has_aggregate() {
                    if !conj.subqueries().is_empty() {
                        return Err(SparqlError::Unsupported("subquery in HAVING".into()));
                    }
                    having.push(self.filter(&mut b, conj, false)?);
                } else {
                    filters.push(self.filter(&mut b, conj, true)?);
                }
            }
        }

        // Ordering.
        let mut order_by = Vec::new();
        let mut limit = None;
        if let Some(o) = &r.order {
            let a = o.expr();
            let expr = match r.select.items.iter().position(|item| item == a) {
                Some(i) => SExpr::Var(outputs[i].clone()),
                None => self.a_expr(&mut b, a)?,
            };
            order_by.push(OrderKey {
                expr,
                direction: o.direction(),
            });
            limit = o.limit();
        }

        let mut group_by = Vec::new();
        for c in &r.group_by {
            group_by.push(self.column_var(&mut b, c)?);
        }

        for (slot, column, var) in &b.data {
            let table = &b.slot_tables[*slot];
            let prop = self
                .ontology
                .data_property(table, column)
                .ok_or_else(|| SparqlError::UnknownProperty(format!("data property for '{table}.{column}'")))?;
            elements.push(PatternElement::Triple(TriplePattern::new(
                PatternTerm::Var(b.slot_vars[*slot].clone()),
                &prop.iri,
                PatternTerm::Var(var.clone()),
            )));
        }
        for (_, var, expr) in &b.binds {
            elements.push(PatternElement::Bind(expr.clone(), var.clone()));
        }
        elements.append(&mut b.joined);
        elements.extend(filters.into_iter().map(PatternElement::Filter));

        let query = SparqlQuery {
            distinct: r.select.distinct || role == Role::Member,
            projections,
            pattern: GroupPattern { elements },
            group_by,
            having,
            order_by,
            limit,
        };
        Ok(complete_group_by(&query))
    }

    fn nested(&mut self, r: &RBlock, role: Role, width: usize) -> Result<(SparqlQuery, Vec<String>), SparqlError> {
        let q = self.block(r, role)?;
        let outputs = q.output_vars();
        if outputs.len() != width {
            return Err(SparqlError::ArityMismatch(format!(
                "subquery projects {} values, expected {width}",
                outputs.len()
            )));
        }
        Ok((q, outputs))
    }

    /// Joins `sub` into the block when the predicate is a top-level
    /// conjunct; elsewhere wraps it in an EXISTS together with the test.
    fn attach(&mut self, b: &mut Block, sub: SparqlQuery, test: SExpr, top: bool) -> SExpr {
        if top {
            b.joined.push(PatternElement::SubQuery(Box::new(sub)));
            test
        } else {
            SExpr::Exists(Box::new(GroupPattern {
                elements: vec![PatternElement::SubQuery(Box::new(sub)), PatternElement::Filter(test)],
            }))
        }
    }

    fn filter(&mut self, b: &mut Block, f: &Filter, top: bool) -> Result<SExpr, SparqlError> {
        Ok(match f {
            Filter::And(x, y) => SExpr::and(self.filter(b, x, top)?, self.filter(b, y, top)?),
            Filter::Or(x, y) => SExpr::or(self.filter(b, x, false)?, self.filter(b, y, false)?),
            Filter::Cmp(op, a, Operand::Value(v)) => {
                SExpr::cmp(*op, self.a_expr(b, a)?, SExpr::Const(v.clone()))
            }
            Filter::Cmp(op, a, Operand::Query(r)) => {
                let lhs = self.a_expr(b, a)?;
                let (sub, out) = self.nested(r, Role::Scalar, 1)?;
                let test = SExpr::cmp(*op, lhs, SExpr::Var(out[0].clone()));
                self.attach(b, sub, test, top)
            }
            Filter::Between(a, bounds) => {
                let [low, high] = bounds.as_slice() else {
                    return Err(SparqlError::EmissionBug(format!(
                        "between with {} bounds",
                        bounds.len()
                    )));
                };
                let x = self.a_expr(b, a)?;
                SExpr::and(
                    SExpr::cmp(CmpOp::Ge, x.clone(), SExpr::Const(low.clone())),
                    SExpr::cmp(CmpOp::Le, x, SExpr::Const(high.clone())),
                )
            }
            Filter::BetweenQuery(a, r) => {
                let x = self.a_expr(b, a)?;
                let (sub, out) = self.nested(r, Role::Bounds, 2)?;
                let test = SExpr::and(
                    SExpr::cmp(CmpOp::Ge, x.clone(), SExpr::Var(out[0].clone())),
                    SExpr::cmp(CmpOp::Le, x, SExpr::Var(out[1].clone())),
                );
                self.attach(b, sub, test, top)
            }
            Filter::In(a, r) => {
                let x = self.a_expr(b, a)?;
                let (sub, out) = self.nested(r, Role::Member, 1)?;
                let test = SExpr::In(Box::new(x), vec![SExpr::Var(out[0].clone())]);
                self.attach(b, sub, test, top)
            }
            Filter::NotIn(a, r) => {
                let x = self.a_expr(b, a)?;
                let (sub, out) = self.nested(r, Role::Member, 1)?;
                let test = SExpr::In(Box::new(x), vec![SExpr::Var(out[0].clone())]);
                SExpr::NotExists(Box::new(GroupPattern {
                    elements: vec![PatternElement::SubQuery(Box::new(sub)), PatternElement::Filter(test)],
                }))
            }
            Filter::Like(a, pattern) => SExpr::Regex {
                text: Box::new(self.a_expr(b, a)?),
                pattern: like_to_regex(pattern),
                flags: "s".to_string(),
            },
        })
    }

    fn set_operation(&mut self, tree: &SemQlTree) -> Result<SparqlQuery, SparqlError> {
        let (left, right) = match tree {
            SemQlTree::Single(_) => {
                return Err(SparqlError::EmissionBug("set operation expected".into()))
            }
            SemQlTree::Intersect(l, r) | SemQlTree::Union(l, r) | SemQlTree::Except(l, r) => (l, r),
        };
        let left = self.block(left, Role::Branch)?;
        let right = self.block(right, Role::Branch)?;
        let lo = left.output_vars();
        let ro = right.output_vars();
        if lo.len() != ro.len() {
            return Err(SparqlError::ArityMismatch(format!(
                "{} branches project {} and {} values",
                tree.set_op_name().unwrap_or_default(),
                lo.len(),
                ro.len()
            )));
        }
        let projections: Vec<Projected> = lo.iter().map(|v| Projected::Var(v.clone())).collect();
        let pattern = match tree {
            SemQlTree::Union(..) => {
                let mut renamed = right;
                for (p, name) in renamed.projections.iter_mut().zip(&lo) {
                    if p.output() == name {
                        continue;
                    }
                    *p = match p.clone() {
                        Projected::Var(v) => Projected::Expr(SExpr::Var(v), name.clone()),
                        Projected::Expr(e, _) => Projected::Expr(e, name.clone()),
                    };
                }
                let renamed = complete_group_by(&renamed);
                GroupPattern {
                    elements: vec![PatternElement::Union(vec![
                        GroupPattern {
                            elements: vec![PatternElement::SubQuery(Box::new(left))],
                        },
                        GroupPattern {
                            elements: vec![PatternElement::SubQuery(Box::new(renamed))],
                        },
                    ])],
                }
            }
            SemQlTree::Intersect(..) => {
                let mut elements = inline_or_wrap(left);
                elements.extend(inline_or_wrap(right));
                for (l, r) in lo.iter().zip(&ro) {
                    elements.push(PatternElement::Filter(SExpr::In(
                        Box::new(SExpr::var(l)),
                        vec![SExpr::var(r)],
                    )));
                }
                GroupPattern { elements }
            }
            SemQlTree::Except(..) => {
                let mut elements = inline_or_wrap(left);
                let mut inner = inline_or_wrap(right);
                let mut test: Option<SExpr> = None;
                for (l, r) in lo.iter().zip(&ro) {
                    let t = SExpr::In(Box::new(SExpr::var(l)), vec![SExpr::var(r)]);
                    test = Some(match test {
                        None => t,
                        Some(prev) => SExpr::and(prev, t),
                    });
                }
                if let Some(t) = test {
                    inner.push(PatternElement::Filter(t));
                }
                elements.push(PatternElement::Filter(SExpr::NotExists(Box::new(GroupPattern {
                    elements: inner,
                }))));
                GroupPattern { elements }
            }
            SemQlTree::Single(_) => unreachable!("handled above"),
        };
        Ok(SparqlQuery {
            distinct: true,
            projections,
            pattern,
            ..SparqlQuery::default()
        })
    }
}

/// A branch without grouping, ordering or computed projections contributes
/// its patterns directly; anything else becomes a subquery.
fn inline_or_wrap(q: SparqlQuery) -> Vec<PatternElement> {
    let simple = !q.is_grouped()
        && q.order_by.is_empty()
        && q.limit.is_none()
        && q.projections.iter().all(|p| matches!(p, Projected::Var(_)));
    if simple {
        q.pattern.elements
    } else {
        vec![PatternElement::SubQuery(Box::new(q))]
    }
}

/// Anchored regular expression for a LIKE pattern: `%` becomes `.*`, `_`
/// becomes `.`, and regex metacharacters are escaped.
pub fn like_to_regex(pattern: &str) -> String {
    let mut out = String::from("^");
    for c in pattern.chars() {
        match c {
            '%' => out.push_str(".*"),
            '_' => out.push('.'),
            '\\' | '.' | '^' | '$' | '|' | '?' | '*' | '+' | '(' | ')' | '[' | ']' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            c => out.push(c),
        }
    }
    out.push('$');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn like_patterns() {
        assert_eq!(like_to_regex("%a_b%"), "^.*a.b.*$");
        assert_eq!(like_to_regex("1.5 (x)"), "^1\\.5 \\(x\\)$");
    }
}
