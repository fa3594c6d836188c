//! Reference SQL evaluator: nested-loop joins over the stored rows, bag
//! semantics, SQLite-style permissive grouping.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::error::EngineError;
use super::order::{finalize, row_key, Keyed};
use super::result::ResultSet;
use crate::schema::{RelationalInstance, Row};
use crate::sql::{AggArg, AggFunc, ArithOp, CmpOp, Expr, Query, Select, SelectItem, SetOpKind};
use crate::value::{compare_values, sort_order, values_equal, Datatype, SqlKey, Value};

pub fn eval_sql(query: &Query, instance: &RelationalInstance) -> Result<ResultSet, EngineError> {
    let ev = SqlEvaluator {
        instance,
        memo: RefCell::new(HashMap::new()),
    };
    let rows = ev.query(query)?;
    let columns = query
        .first_block()
        .items
        .iter()
        .enumerate()
        .map(|(i, item)| item_name(item, i))
        .collect();
    Ok(ResultSet {
        columns,
        rows: rows.as_ref().clone(),
        ordered: query.is_ordered(),
    })
}

fn item_name(item: &SelectItem, i: usize) -> String {
    if let Some(a) = &item.alias {
        return a.clone();
    }
    match &item.expr {
        Expr::Column(c) => c.column.clone(),
        Expr::Aggregate { func, arg: AggArg::Star } => format!("{func}(*)"),
        Expr::Aggregate { func, arg: AggArg::Expr(e) } => match e.as_ref() {
            Expr::Column(c) => format!("{func}({})", c.column),
            _ => format!("{func}(expr{})", i + 1),
        },
        _ => format!("expr{}", i + 1),
    }
}

type Tuple<'a> = Vec<&'a Row>;

enum Scope<'s, 'a> {
    Row(&'s [&'a Row]),
    Group(&'s [Tuple<'a>]),
}

struct SqlEvaluator<'a> {
    instance: &'a RelationalInstance,
    /// Results of uncorrelated subqueries, keyed by node address.
    memo: RefCell<HashMap<usize, Rc<Vec<Row>>>>,
}

fn type_error(msg: impl Into<String>) -> EngineError {
    EngineError::EvaluationType(msg.into())
}

fn truth(v: Option<bool>) -> Value {
    v.map(Value::Boolean).unwrap_or(Value::Null)
}

fn as_truth(v: &Value) -> Result<Option<bool>, EngineError> {
    match v {
        Value::Null => Ok(None),
        Value::Boolean(b) => Ok(Some(*b)),
        Value::Integer(i) => Ok(Some(*i != 0)),
        Value::Real(r) => Ok(Some(*r != 0.0)),
        Value::Text(_) => Err(type_error("text used as a condition")),
    }
}

/// Comparison with SQLite-like affinity: a text operand facing a number is
/// read as a number when it parses as one, and facing a boolean as a
/// boolean spelling (`t`, `false`, `1`, ...).
fn sql_compare(a: &Value, b: &Value) -> Option<Ordering> {
    if a.is_null() || b.is_null() {
        return None;
    }
    if let Some(o) = compare_values(a, b) {
        return Some(o);
    }
    let read = |v: &Value, other: &Value| match (v, other) {
        (Value::Text(s), Value::Boolean(_)) => Value::parse_as(s.trim(), Datatype::Boolean),
        (Value::Text(s), _) => s.trim().parse::<f64>().ok().map(Value::Real),
        (v, _) => Some(v.clone()),
    };
    compare_values(&read(a, b)?, &read(b, a)?)
}

fn arith(op: ArithOp, a: &Value, b: &Value) -> Result<Value, EngineError> {
    if a.is_null() || b.is_null() {
        return Ok(Value::Null);
    }
    if let (Value::Integer(x), Value::Integer(y)) = (a, b) {
        let r = match op {
            ArithOp::Add => x.checked_add(*y),
            ArithOp::Sub => x.checked_sub(*y),
            ArithOp::Mul => x.checked_mul(*y),
            ArithOp::Div => {
                if *y == 0 {
                    return Ok(Value::Null);
                }
                x.checked_div(*y)
            }
        };
        if let Some(r) = r {
            return Ok(Value::Integer(r));
        }
    }
    let (Some(x), Some(y)) = (a.as_f64(), b.as_f64()) else {
        return Err(type_error(format!("arithmetic on {a} and {b}")));
    };
    Ok(match op {
        ArithOp::Add => Value::Real(x + y),
        ArithOp::Sub => Value::Real(x - y),
        ArithOp::Mul => Value::Real(x * y),
        ArithOp::Div if y == 0.0 => Value::Null,
        ArithOp::Div => Value::Real(x / y),
    })
}

/// SQL LIKE with `%` and `_`; case-sensitive.
pub(crate) fn like_match(text: &str, pattern: &str) -> bool {
    let t: Vec<char> = text.chars().collect();
    let p: Vec<char> = pattern.chars().collect();
    // matches[j]: whether p[..i] matches t[..j]
    let mut matches = vec![false; t.len() + 1];
    matches[0] = true;
    for &pc in &p {
        let mut next = vec![false; t.len() + 1];
        match pc {
            '%' => {
                let mut any = false;
                for j in 0..=t.len() {
                    any |= matches[j];
                    next[j] = any;
                }
            }
            _ => {
                for j in 1..=t.len() {
                    next[j] = matches[j - 1] && (pc == '_' || t[j - 1] == pc);
                }
            }
        }
        matches = next;
    }
    matches[t.len()]
}

fn aggregate(func: AggFunc, values: Vec<Value>) -> Result<Value, EngineError> {
    let values: Vec<Value> = values.into_iter().filter(|v| !v.is_null()).collect();
    match func {
        AggFunc::Count => Ok(Value::Integer(values.len() as i64)),
        AggFunc::Min | AggFunc::Max => {
            let best = values.into_iter().reduce(|a, b| {
                let o = sort_order(&b, &a);
                let better = if func == AggFunc::Min {
                    o == Ordering::Less
                } else {
                    o == Ordering::Greater
                };
                if better {
                    b
                } else {
                    a
                }
            });
            Ok(best.unwrap_or(Value::Null))
        }
        AggFunc::Sum | AggFunc::Avg => {
            if values.is_empty() {
                return Ok(Value::Null);
            }
            let mut int_sum: Option<i64> = Some(0);
            let mut real_sum = 0.0;
            for v in &values {
                match v {
                    Value::Integer(i) => int_sum = int_sum.and_then(|s| s.checked_add(*i)),
                    Value::Real(_) => int_sum = None,
                    other => return Err(type_error(format!("{func} over {other}"))),
                }
                real_sum += v.as_f64().unwrap_or(0.0);
            }
            Ok(match (func, int_sum) {
                (AggFunc::Sum, Some(s)) => Value::Integer(s),
                (AggFunc::Sum, None) => Value::Real(real_sum),
                _ => Value::Real(real_sum / values.len() as f64),
            })
        }
    }
}

/// Highest slot a predicate reads, ignoring subqueries.
fn max_slot(e: &Expr) -> usize {
    let mut m = 0;
    e.visit_shallow(&mut |x| {
        if let Expr::Column(c) = x {
            m = m.max(c.slot);
        }
    });
    m
}

/// Borrowed, never cloned: subquery results are memoized by node address.
fn conjuncts<'q>(e: &'q Expr, out: &mut Vec<&'q Expr>) {
    match e {
        Expr::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other),
    }
}

impl<'a> SqlEvaluator<'a> {
    fn query(&self, q: &Query) -> Result<Rc<Vec<Row>>, EngineError> {
        let key = q as *const Query as usize;
        if let Some(hit) = self.memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let rows = match q {
            Query::Select(s) => self.select(s)?,
            Query::SetOp { op, left, right } => {
                let l = self.query(left)?;
                let r = self.query(right)?;
                let right_keys: HashSet<_> = r.iter().map(|row| row_key(row)).collect();
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                let candidates: Box<dyn Iterator<Item = &Row>> = match op {
                    SetOpKind::Union => Box::new(l.iter().chain(r.iter())),
                    _ => Box::new(l.iter()),
                };
                for row in candidates {
                    let k = row_key(row);
                    let keep = match op {
                        SetOpKind::Union => true,
                        SetOpKind::Intersect => right_keys.contains(&k),
                        SetOpKind::Except => !right_keys.contains(&k),
                    };
                    if keep && seen.insert(k) {
                        out.push(row.clone());
                    }
                }
                out
            }
        };
        let rows = Rc::new(rows);
        self.memo.borrow_mut().insert(key, rows.clone());
        Ok(rows)
    }

    fn table_rows(&self, table: &str) -> Result<&'a [Row], EngineError> {
        if !self.instance.tables.iter().any(|t| t.table == table) {
            return Err(EngineError::Input(format!("no rows for table '{table}'")));
        }
        Ok(self.instance.rows(table))
    }

    fn select(&self, s: &Select) -> Result<Vec<Row>, EngineError> {
        let slots = s.slots();
        // Every ON / WHERE conjunct runs as soon as the slots it reads are bound.
        let mut pending: Vec<Vec<&Expr>> = vec![Vec::new(); slots.len()];
        let mut all = Vec::new();
        for j in &s.joins {
            if let Some(on) = &j.on {
                conjuncts(on, &mut all);
            }
        }
        if let Some(w) = &s.where_clause {
            conjuncts(w, &mut all);
        }
        for c in all {
            let at = max_slot(c).min(slots.len() - 1);
            pending[at].push(c);
        }

        let mut tuples: Vec<Tuple<'a>> = vec![Vec::new()];
        for (i, slot) in slots.iter().enumerate() {
            let rows = self.table_rows(&slot.table)?;
            let mut next = Vec::new();
            for t in &tuples {
                for row in rows {
                    let mut ext = t.clone();
                    ext.push(row);
                    let mut keep = true;
                    for c in &pending[i] {
                        if as_truth(&self.eval(c, &Scope::Row(&ext))?)? != Some(true) {
                            keep = false;
                            break;
                        }
                    }
                    if keep {
                        next.push(ext);
                    }
                }
            }
            tuples = next;
        }

        let aggregated = s.items.iter().any(|i| i.expr.contains_aggregate())
            || s.having.as_ref().is_some_and(Expr::contains_aggregate)
            || s.order_by.iter().any(|o| o.expr.contains_aggregate());
        let mut keyed = Vec::new();
        if !s.group_by.is_empty() || aggregated || s.having.is_some() {
            let mut groups: Vec<Vec<Tuple<'a>>> = Vec::new();
            if s.group_by.is_empty() {
                groups.push(tuples);
            } else {
                let mut index: HashMap<Vec<SqlKey>, usize> = HashMap::new();
                for t in tuples {
                    let key: Vec<SqlKey> = s
                        .group_by
                        .iter()
                        .map(|c| SqlKey::of(&t[c.slot][c.index]))
                        .collect();
                    let at = *index.entry(key).or_insert_with(|| {
                        groups.push(Vec::new());
                        groups.len() - 1
                    });
                    groups[at].push(t);
                }
            }
            for g in &groups {
                let scope = Scope::Group(g);
                if let Some(h) = &s.having {
                    if as_truth(&self.eval(h, &scope)?)? != Some(true) {
                        continue;
                    }
                }
                keyed.push(self.output(s, &scope)?);
            }
        } else {
            for t in &tuples {
                keyed.push(self.output(s, &Scope::Row(t))?);
            }
        }
        let directions: Vec<_> = s.order_by.iter().map(|o| o.direction).collect();
        Ok(finalize(keyed, &directions, s.distinct, s.limit))
    }

    fn output(&self, s: &Select, scope: &Scope<'_, 'a>) -> Result<Keyed, EngineError> {
        let mut row = Vec::with_capacity(s.items.len());
        for item in &s.items {
            row.push(self.eval(&item.expr, scope)?);
        }
        let mut keys = Vec::with_capacity(s.order_by.len());
        for o in &s.order_by {
            keys.push(self.eval(&o.expr, scope)?);
        }
        Ok(Keyed { keys, row })
    }

    fn eval(&self, e: &Expr, scope: &Scope<'_, 'a>) -> Result<Value, EngineError> {
        Ok(match e {
            Expr::Column(c) => {
                let tuple = match scope {
                    Scope::Row(t) => Some(*t),
                    Scope::Group(g) => g.first().map(Vec::as_slice),
                };
                match tuple {
                    Some(t) => t
                        .get(c.slot)
                        .and_then(|row| row.get(c.index))
                        .cloned()
                        .ok_or_else(|| EngineError::Input(format!("unresolved column '{}'", c.column)))?,
                    None => Value::Null,
                }
            }
            Expr::Wildcard(_) => return Err(EngineError::Input("unexpanded '*'".into())),
            Expr::Literal(v) => v.clone(),
            Expr::Aggregate { func, arg } => {
                let Scope::Group(g) = scope else {
                    return Err(EngineError::Input("aggregate outside a grouped query".into()));
                };
                match arg {
                    AggArg::Star => Value::Integer(g.len() as i64),
                    AggArg::Expr(inner) => {
                        let mut values = Vec::with_capacity(g.len());
                        for t in g.iter() {
                            values.push(self.eval(inner, &Scope::Row(t))?);
                        }
                        aggregate(*func, values)?
                    }
                }
            }
            Expr::Arith { op, left, right } => arith(*op, &self.eval(left, scope)?, &self.eval(right, scope)?)?,
            Expr::Compare { op, left, right } => {
                let (a, b) = (self.eval(left, scope)?, self.eval(right, scope)?);
                truth(sql_compare(&a, &b).map(|o| op.holds(o)))
            }
            Expr::Between { expr, low, high } => {
                let x = self.eval(expr, scope)?;
                let lo = sql_compare(&x, &self.eval(low, scope)?).map(|o| CmpOp::Ge.holds(o));
                let hi = sql_compare(&x, &self.eval(high, scope)?).map(|o| CmpOp::Le.holds(o));
                truth(and3(lo, hi))
            }
            Expr::InList { expr, list, negated } => {
                let x = self.eval(expr, scope)?;
                truth(member(&x, list.iter()).map(|m| m != *negated))
            }
            Expr::InSubquery { expr, query, negated } => {
                let x = self.eval(expr, scope)?;
                let rows = self.query(query)?;
                truth(member(&x, rows.iter().filter_map(|r| r.first())).map(|m| m != *negated))
            }
            Expr::Like { expr, pattern } => match self.eval(expr, scope)? {
                Value::Null => Value::Null,
                Value::Text(t) => Value::Boolean(like_match(&t, pattern)),
                other => Value::Boolean(like_match(&other.to_field(), pattern)),
            },
            Expr::Subquery(q) => {
                let rows = self.query(q)?;
                rows.first().and_then(|r| r.first()).cloned().unwrap_or(Value::Null)
            }
            Expr::And(a, b) => {
                let x = as_truth(&self.eval(a, scope)?)?;
                if x == Some(false) {
                    return Ok(Value::Boolean(false));
                }
                truth(and3(x, as_truth(&self.eval(b, scope)?)?))
            }
            Expr::Or(a, b) => {
                let x = as_truth(&self.eval(a, scope)?)?;
                if x == Some(true) {
                    return Ok(Value::Boolean(true));
                }
                let y = as_truth(&self.eval(b, scope)?)?;
                truth(match (x, y) {
                    (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                })
            }
        })
    }
}

fn and3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

/// SQL IN: true on a match, unknown if no match but a null was involved.
fn member<'v>(x: &Value, candidates: impl Iterator<Item = &'v Value>) -> Option<bool> {
    if x.is_null() {
        return None;
    }
    let mut unknown = false;
    for c in candidates {
        if c.is_null() {
            unknown = true;
        } else if values_equal(x, c) || sql_compare(x, c) == Some(Ordering::Equal) {
            return Some(true);
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}
