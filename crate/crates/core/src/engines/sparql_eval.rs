//! Reference evaluator for the emitted SPARQL subset over an in-memory
//! graph.
//!
//! Terms are interned to integer ids; a solution is a vector of ids indexed
//! by variable. Triple patterns are answered from three hash indexes.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use regex::Regex;

use super::error::EngineError;
use super::order::{finalize, Keyed};
use super::result::ResultSet;
use crate::mapping::{Graph, Literal, Term};
use crate::sparql::*;
use crate::sql::{AggFunc, ArithOp};
use crate::value::{compare_values, sort_order, Value};

pub fn eval_sparql(query: &SparqlQuery, graph: &Graph) -> Result<ResultSet, EngineError> {
    let mut vars = VarTable::default();
    collect_vars(query, &mut vars);
    let ev = SparqlEvaluator::new(graph, vars);
    let sol = ev.query(query)?;
    let rows = sol
        .rows
        .iter()
        .map(|r| r.iter().map(|id| ev.value_of(*id).unwrap_or(Value::Null)).collect())
        .collect();
    Ok(ResultSet {
        columns: query.output_vars(),
        rows,
        ordered: !query.order_by.is_empty(),
    })
}

const UNBOUND: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Iri(String),
    Lit(Value),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum NodeKey {
    Iri(String),
    Int(i64),
    Real(u64),
    Text(String),
    Bool(bool),
}

fn node_key(n: &Node) -> Option<NodeKey> {
    Some(match n {
        Node::Iri(i) => NodeKey::Iri(i.clone()),
        Node::Lit(Value::Integer(i)) => NodeKey::Int(*i),
        Node::Lit(Value::Real(r)) => NodeKey::Real(r.to_bits()),
        Node::Lit(Value::Text(s)) => NodeKey::Text(s.clone()),
        Node::Lit(Value::Boolean(b)) => NodeKey::Bool(*b),
        Node::Lit(Value::Null) => return None,
    })
}

#[derive(Default)]
struct VarTable {
    index: HashMap<String, usize>,
}

impl VarTable {
    fn add(&mut self, v: &str) {
        let n = self.index.len();
        self.index.entry(v.to_string()).or_insert(n);
    }
}

fn collect_vars(q: &SparqlQuery, vars: &mut VarTable) {
    q.walk(&mut |sub| {
        for p in &sub.projections {
            vars.add(p.output());
            if let Projected::Expr(e, _) = p {
                expr_vars(e, vars);
            }
        }
        for g in &sub.group_by {
            vars.add(g);
        }
        for h in &sub.having {
            expr_vars(h, vars);
        }
        for o in &sub.order_by {
            expr_vars(&o.expr, vars);
        }
    });
    for g in q.all_groups() {
        for e in &g.elements {
            match e {
                PatternElement::Triple(t) => {
                    for term in [&t.subject, &t.object] {
                        if let PatternTerm::Var(v) = term {
                            vars.add(v);
                        }
                    }
                }
                PatternElement::Bind(x, v) => {
                    vars.add(v);
                    expr_vars(x, vars);
                }
                PatternElement::Filter(x) => expr_vars(x, vars),
                PatternElement::SubQuery(_) | PatternElement::Union(_) => {}
            }
        }
    }
}

fn expr_vars(e: &SExpr, vars: &mut VarTable) {
    let mut all = Vec::new();
    e.all_vars(&mut all);
    for v in all {
        vars.add(&v);
    }
}

type Binding = Vec<u32>;

/// Projected solutions of a query: one id per output variable.
struct Solutions {
    vars: Vec<usize>,
    rows: Vec<Vec<u32>>,
}

struct Store {
    by_pred: HashMap<u32, Vec<(u32, u32)>>,
    by_sp: HashMap<(u32, u32), Vec<u32>>,
    by_po: HashMap<(u32, u32), Vec<u32>>,
}

struct SparqlEvaluator {
    nodes: RefCell<Vec<Node>>,
    ids: RefCell<HashMap<NodeKey, u32>>,
    store: Store,
    vars: VarTable,
    memo: RefCell<HashMap<usize, Rc<Solutions>>>,
    regexes: RefCell<HashMap<(String, String), Option<Regex>>>,
}

/// Expression result; `None` is a SPARQL evaluation error (including an
/// unbound variable).
type Ev = Option<Value>;

enum Ctx<'c> {
    Row(&'c Binding),
    Group { rows: &'c [Binding], rep: &'c Binding },
}

impl SparqlEvaluator {
    fn new(graph: &Graph, vars: VarTable) -> SparqlEvaluator {
        let ev = SparqlEvaluator {
            nodes: RefCell::new(Vec::new()),
            ids: RefCell::new(HashMap::new()),
            store: Store {
                by_pred: HashMap::new(),
                by_sp: HashMap::new(),
                by_po: HashMap::new(),
            },
            vars,
            memo: RefCell::new(HashMap::new()),
            regexes: RefCell::new(HashMap::new()),
        };
        let mut store = Store {
            by_pred: HashMap::new(),
            by_sp: HashMap::new(),
            by_po: HashMap::new(),
        };
        for t in graph.iter() {
            let s = ev.intern(Node::Iri(t.subject.clone())).expect("IRI interns");
            let p = ev.intern(Node::Iri(t.predicate.clone())).expect("IRI interns");
            let o = match &t.object {
                Term::Iri(i) => ev.intern(Node::Iri(i.clone())),
                Term::Literal(l) => ev.intern(Node::Lit(l.to_value())),
            };
            let Some(o) = o else { continue };
            store.by_pred.entry(p).or_default().push((s, o));
            store.by_sp.entry((s, p)).or_default().push(o);
            store.by_po.entry((p, o)).or_default().push(s);
        }
        SparqlEvaluator { store, ..ev }
    }

    fn intern(&self, n: Node) -> Option<u32> {
        let key = node_key(&n)?;
        if let Some(id) = self.ids.borrow().get(&key) {
            return Some(*id);
        }
        let mut nodes = self.nodes.borrow_mut();
        let id = nodes.len() as u32;
        nodes.push(n);
        self.ids.borrow_mut().insert(key, id);
        Some(id)
    }

    fn lookup(&self, n: &Node) -> Option<u32> {
        self.ids.borrow().get(&node_key(n)?).copied()
    }

    fn value_of(&self, id: u32) -> Option<Value> {
        if id == UNBOUND {
            return None;
        }
        match &self.nodes.borrow()[id as usize] {
            Node::Lit(v) => Some(v.clone()),
            Node::Iri(_) => None,
        }
    }

    fn var(&self, name: &str) -> Result<usize, EngineError> {
        self.vars
            .index
            .get(name)
            .copied()
            .ok_or_else(|| EngineError::UnsupportedSparql(format!("variable ?{name} outside any scope")))
    }

    fn empty_binding(&self) -> Binding {
        vec![UNBOUND; self.vars.index.len()]
    }

    // ---- patterns ----

    fn query(&self, q: &SparqlQuery) -> Result<Rc<Solutions>, EngineError> {
        let key = q as *const SparqlQuery as usize;
        if let Some(hit) = self.memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let sols = Rc::new(self.run_query(q)?);
        self.memo.borrow_mut().insert(key, sols.clone());
        Ok(sols)
    }

    fn run_query(&self, q: &SparqlQuery) -> Result<Solutions, EngineError> {
        let solutions = self.group(&q.pattern, vec![self.empty_binding()])?;
        let out_vars: Vec<usize> = q
            .projections
            .iter()
            .map(|p| self.var(p.output()))
            .collect::<Result<_, _>>()?;

        let mut keyed = Vec::new();
        if q.is_grouped() {
            let key_vars: Vec<usize> = q.group_by.iter().map(|g| self.var(g)).collect::<Result<_, _>>()?;
            let mut groups: Vec<Vec<Binding>> = Vec::new();
            if key_vars.is_empty() {
                groups.push(solutions);
            } else {
                let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
                for s in solutions {
                    let k: Vec<u32> = key_vars.iter().map(|v| s[*v]).collect();
                    let at = *index.entry(k).or_insert_with(|| {
                        groups.push(Vec::new());
                        groups.len() - 1
                    });
                    groups[at].push(s);
                }
            }
            for g in &groups {
                let mut rep = self.empty_binding();
                if let Some(first) = g.first() {
                    for v in &key_vars {
                        rep[*v] = first[*v];
                    }
                }
                let mut pass = true;
                for h in &q.having {
                    if self.ebv(&self.eval(h, &Ctx::Group { rows: g, rep: &rep })?) != Some(true) {
                        pass = false;
                        break;
                    }
                }
                if !pass {
                    continue;
                }
                let row = self.project(q, &out_vars, &mut rep, Some(g))?;
                let mut keys = Vec::new();
                for o in &q.order_by {
                    let ctx = Ctx::Group { rows: g, rep: &rep };
                    keys.push(self.eval(&o.expr, &ctx)?.unwrap_or(Value::Null));
                }
                keyed.push((keys, row));
            }
        } else {
            for mut s in solutions {
                let row = self.project(q, &out_vars, &mut s, None)?;
                let mut keys = Vec::new();
                for o in &q.order_by {
                    keys.push(self.eval(&o.expr, &Ctx::Row(&s))?.unwrap_or(Value::Null));
                }
                keyed.push((keys, row));
            }
        }

        // Order, distinct and limit operate on values; ids ride along.
        let rows: Vec<Keyed> = keyed
            .iter()
            .map(|(keys, ids)| Keyed {
                keys: keys.clone(),
                row: ids.iter().map(|id| self.value_of(*id).unwrap_or(Value::Null)).collect(),
            })
            .collect();
        let mut by_values: HashMap<Vec<crate::value::SqlKey>, Vec<u32>> = HashMap::new();
        for (k, (_, ids)) in rows.iter().zip(&keyed) {
            by_values.entry(super::order::row_key(&k.row)).or_insert_with(|| ids.clone());
        }
        let directions: Vec<_> = q.order_by.iter().map(|o| o.direction).collect();
        let finalized = finalize(rows, &directions, q.distinct, q.limit);
        let rows = finalized
            .iter()
            .map(|r| by_values[&super::order::row_key(r)].clone())
            .collect();
        Ok(Solutions { vars: out_vars, rows })
    }

    /// Evaluates the projection, writing outputs into `b` so that ORDER BY
    /// can see them.
    fn project(
        &self,
        q: &SparqlQuery,
        out_vars: &[usize],
        b: &mut Binding,
        group: Option<&[Binding]>,
    ) -> Result<Vec<u32>, EngineError> {
        let mut row = Vec::with_capacity(out_vars.len());
        for (p, v) in q.projections.iter().zip(out_vars) {
            let id = match p {
                Projected::Var(_) => b[*v],
                Projected::Expr(e, _) => {
                    let value = match group {
                        Some(rows) => self.eval(e, &Ctx::Group { rows, rep: b })?,
                        None => self.eval(e, &Ctx::Row(b))?,
                    };
                    value.and_then(|x| self.intern(Node::Lit(x))).unwrap_or(UNBOUND)
                }
            };
            b[*v] = id;
            row.push(id);
        }
        Ok(row)
    }

    fn group(&self, g: &GroupPattern, seed: Vec<Binding>) -> Result<Vec<Binding>, EngineError> {
        let mut sols = seed;
        let mut i = 0;
        while i < g.elements.len() {
            match &g.elements[i] {
                PatternElement::Triple(_) => {
                    let mut run = Vec::new();
                    while let Some(PatternElement::Triple(t)) = g.elements.get(i) {
                        run.push(t);
                        i += 1;
                    }
                    sols = self.bgp(&run, sols)?;
                    continue;
                }
                PatternElement::Bind(e, v) => {
                    let v = self.var(v)?;
                    for s in &mut sols {
                        if s[v] != UNBOUND {
                            return Err(EngineError::UnsupportedSparql("BIND to a bound variable".into()));
                        }
                        if let Some(x) = self.eval(e, &Ctx::Row(s))? {
                            s[v] = self.intern(Node::Lit(x)).unwrap_or(UNBOUND);
                        }
                    }
                }
                PatternElement::SubQuery(q) => {
                    let sub = self.query(q)?;
                    sols = self.join(sols, &sub.vars, &sub.rows);
                }
                PatternElement::Union(branches) => {
                    let mut rows = Vec::new();
                    for b in branches {
                        rows.extend(self.group(b, vec![self.empty_binding()])?);
                    }
                    let all: Vec<usize> = (0..self.vars.index.len()).collect();
                    sols = self.join(sols, &all, &rows);
                }
                PatternElement::Filter(_) => {}
            }
            i += 1;
        }
        let filters: Vec<&SExpr> = g.filters().collect();
        if filters.is_empty() {
            return Ok(sols);
        }
        let mut kept = Vec::with_capacity(sols.len());
        for s in sols {
            let mut pass = true;
            for f in &filters {
                if self.ebv(&self.eval(f, &Ctx::Row(&s))?) != Some(true) {
                    pass = false;
                    break;
                }
            }
            if pass {
                kept.push(s);
            }
        }
        Ok(kept)
    }

    /// Joins solutions with rows over `vars`; unbound cells are compatible
    /// with anything.
    fn join(&self, left: Vec<Binding>, vars: &[usize], rows: &[Vec<u32>]) -> Vec<Binding> {
        let mut out = Vec::new();
        for s in &left {
            'row: for r in rows {
                let mut merged = s.clone();
                for (v, id) in vars.iter().zip(r) {
                    if *id == UNBOUND {
                        continue;
                    }
                    if merged[*v] == UNBOUND {
                        merged[*v] = *id;
                    } else if merged[*v] != *id {
                        continue 'row;
                    }
                }
                out.push(merged);
            }
        }
        out
    }

    fn term_id(&self, t: &PatternTerm, b: &Binding) -> Result<Option<u32>, EngineError> {
        Ok(match t {
            PatternTerm::Var(v) => {
                let id = b[self.var(v)?];
                (id != UNBOUND).then_some(id)
            }
            PatternTerm::Iri(i) => Some(self.lookup(&Node::Iri(i.clone())).unwrap_or(UNBOUND)),
            PatternTerm::Literal(l) => Some(self.lookup(&Node::Lit(literal_value(l))).unwrap_or(UNBOUND)),
        })
    }

    fn bound_in(&self, t: &PatternTerm, bound: &[bool]) -> bool {
        match t {
            PatternTerm::Var(v) => self.vars.index.get(v).is_some_and(|i| bound[*i]),
            _ => true,
        }
    }

    /// Matches a run of triple patterns, always taking next the pattern
    /// with the most bound positions.
    fn bgp(&self, patterns: &[&TriplePattern], mut sols: Vec<Binding>) -> Result<Vec<Binding>, EngineError> {
        let mut bound = vec![false; self.vars.index.len()];
        if let Some(first) = sols.first() {
            for (i, id) in first.iter().enumerate() {
                bound[i] = *id != UNBOUND;
            }
        }
        let mut remaining: Vec<&TriplePattern> = patterns.to_vec();
        while !remaining.is_empty() {
            let score = |t: &TriplePattern| {
                u8::from(self.bound_in(&t.subject, &bound)) * 2 + u8::from(self.bound_in(&t.object, &bound))
            };
            let best = (0..remaining.len())
                .max_by(|a, b| score(remaining[*a]).cmp(&score(remaining[*b])).then(b.cmp(a)))
                .expect("non-empty");
            let t = remaining.remove(best);
            sols = self.match_triple(t, sols)?;
            for term in [&t.subject, &t.object] {
                if let PatternTerm::Var(v) = term {
                    bound[self.var(v)?] = true;
                }
            }
        }
        Ok(sols)
    }

    fn match_triple(&self, t: &TriplePattern, sols: Vec<Binding>) -> Result<Vec<Binding>, EngineError> {
        let Some(p) = self.lookup(&Node::Iri(t.predicate.clone())) else {
            return Ok(Vec::new());
        };
        let subject_var = match &t.subject {
            PatternTerm::Var(v) => Some(self.var(v)?),
            _ => None,
        };
        let object_var = match &t.object {
            PatternTerm::Var(v) => Some(self.var(v)?),
            _ => None,
        };
        let mut out = Vec::new();
        for b in sols {
            let s = self.term_id(&t.subject, &b)?;
            let o = self.term_id(&t.object, &b)?;
            let mut emit = |s_id: u32, o_id: u32| {
                let mut n = b.clone();
                if let Some(v) = subject_var {
                    n[v] = s_id;
                }
                if let Some(v) = object_var {
                    if n[v] != UNBOUND && n[v] != o_id {
                        return;
                    }
                    n[v] = o_id;
                }
                out.push(n);
            };
            match (s, o) {
                (Some(s), Some(o)) => {
                    if self.store.by_sp.get(&(s, p)).is_some_and(|os| os.contains(&o)) {
                        emit(s, o);
                    }
                }
                (Some(s), None) => {
                    for o in self.store.by_sp.get(&(s, p)).into_iter().flatten() {
                        emit(s, *o);
                    }
                }
                (None, Some(o)) => {
                    for s in self.store.by_po.get(&(p, o)).into_iter().flatten() {
                        emit(*s, o);
                    }
                }
                (None, None) => {
                    for (s, o) in self.store.by_pred.get(&p).into_iter().flatten() {
                        // `?x p ?x` needs both positions equal.
                        if subject_var.is_some() && subject_var == object_var && s != o {
                            continue;
                        }
                        emit(*s, *o);
                    }
                }
            }
        }
        Ok(out)
    }

    // ---- expressions ----

    fn ebv(&self, v: &Ev) -> Option<bool> {
        match v.as_ref()? {
            Value::Boolean(b) => Some(*b),
            Value::Integer(i) => Some(*i != 0),
            Value::Real(r) => Some(*r != 0.0),
            Value::Text(s) => Some(!s.is_empty()),
            Value::Null => None,
        }
    }

    fn eval(&self, e: &SExpr, ctx: &Ctx<'_>) -> Result<Ev, EngineError> {
        Ok(match e {
            SExpr::Var(v) => {
                let i = self.var(v)?;
                let b = match ctx {
                    Ctx::Row(b) => b,
                    Ctx::Group { rep, .. } => rep,
                };
                self.value_of(b[i])
            }
            SExpr::Const(v) => (!v.is_null()).then(|| v.clone()),
            SExpr::Cmp(op, a, b) => {
                let (Some(x), Some(y)) = (self.eval(a, ctx)?, self.eval(b, ctx)?) else {
                    return Ok(None);
                };
                compare_values(&x, &y).map(|o| Value::Boolean(op.holds(o)))
            }
            SExpr::And(a, b) => {
                let x = self.ebv(&self.eval(a, ctx)?);
                let y = self.ebv(&self.eval(b, ctx)?);
                match (x, y) {
                    (Some(false), _) | (_, Some(false)) => Some(Value::Boolean(false)),
                    (Some(true), Some(true)) => Some(Value::Boolean(true)),
                    _ => None,
                }
            }
            SExpr::Or(a, b) => {
                let x = self.ebv(&self.eval(a, ctx)?);
                let y = self.ebv(&self.eval(b, ctx)?);
                match (x, y) {
                    (Some(true), _) | (_, Some(true)) => Some(Value::Boolean(true)),
                    (Some(false), Some(false)) => Some(Value::Boolean(false)),
                    _ => None,
                }
            }
            SExpr::Arith(op, a, b) => {
                let (Some(x), Some(y)) = (self.eval(a, ctx)?, self.eval(b, ctx)?) else {
                    return Ok(None);
                };
                numeric_op(*op, &x, &y)
            }
            SExpr::In(x, list) => {
                let Some(x) = self.eval(x, ctx)? else {
                    return Ok(None);
                };
                let mut error = false;
                for item in list {
                    match self.eval(item, ctx)? {
                        Some(y) => match compare_values(&x, &y) {
                            Some(Ordering::Equal) => return Ok(Some(Value::Boolean(true))),
                            Some(_) => {}
                            None => error = true,
                        },
                        None => error = true,
                    }
                }
                (!error).then_some(Value::Boolean(false))
            }
            SExpr::Regex { text, pattern, flags } => {
                let Some(Value::Text(t)) = self.eval(text, ctx)? else {
                    return Ok(None);
                };
                let re = self.regex(pattern, flags)?;
                Some(Value::Boolean(re.is_match(&t)))
            }
            SExpr::Aggregate(a) => match ctx {
                Ctx::Group { rows, .. } => self.aggregate(a, rows)?,
                Ctx::Row(_) => return Err(EngineError::UnsupportedSparql("aggregate outside a group".into())),
            },
            SExpr::Exists(g) | SExpr::NotExists(g) => {
                let Ctx::Row(b) = ctx else {
                    return Err(EngineError::UnsupportedSparql("EXISTS over grouped solutions".into()));
                };
                let found = !self.group(g, vec![(*b).clone()])?.is_empty();
                Some(Value::Boolean(found == matches!(e, SExpr::Exists(_))))
            }
            SExpr::CastInteger(x) => match self.eval(x, ctx)? {
                Some(Value::Integer(i)) => Some(Value::Integer(i)),
                Some(Value::Real(r)) => {
                    let t = r.trunc();
                    (t.abs() < 9.2e18).then_some(Value::Integer(t as i64))
                }
                Some(Value::Boolean(b)) => Some(Value::Integer(i64::from(b))),
                Some(Value::Text(s)) => s.trim().parse::<i64>().ok().map(Value::Integer),
                _ => None,
            },
            SExpr::If(c, a, b) => match self.ebv(&self.eval(c, ctx)?) {
                Some(true) => self.eval(a, ctx)?,
                Some(false) => self.eval(b, ctx)?,
                None => None,
            },
            SExpr::Coalesce(list) => {
                for item in list {
                    if let Some(v) = self.eval(item, ctx)? {
                        return Ok(Some(v));
                    }
                }
                None
            }
        })
    }

    fn regex(&self, pattern: &str, flags: &str) -> Result<Regex, EngineError> {
        let key = (pattern.to_string(), flags.to_string());
        if let Some(hit) = self.regexes.borrow().get(&key) {
            return hit
                .clone()
                .ok_or_else(|| EngineError::UnsupportedSparql(format!("regex /{pattern}/")));
        }
        let mut inline = String::new();
        for f in flags.chars() {
            match f {
                's' | 'i' | 'm' | 'x' => inline.push(f),
                other => return Err(EngineError::UnsupportedSparql(format!("regex flag '{other}'"))),
            }
        }
        let full = if inline.is_empty() {
            pattern.to_string()
        } else {
            format!("(?{inline}){pattern}")
        };
        let compiled = Regex::new(&full).ok();
        self.regexes.borrow_mut().insert(key, compiled.clone());
        compiled.ok_or_else(|| EngineError::UnsupportedSparql(format!("regex /{pattern}/")))
    }

    fn aggregate(&self, a: &Aggregate, rows: &[Binding]) -> Result<Ev, EngineError> {
        let Some(arg) = &a.arg else {
            return Ok(Some(Value::Integer(rows.len() as i64)));
        };
        // Rows whose argument errors are left out.
        let mut values = Vec::with_capacity(rows.len());
        for r in rows {
            if let Some(v) = self.eval(arg, &Ctx::Row(r))? {
                values.push(v);
            }
        }
        Ok(match a.func {
            AggFunc::Count => Some(Value::Integer(values.len() as i64)),
            AggFunc::Sum | AggFunc::Avg => {
                let mut total = Value::Integer(0);
                for v in &values {
                    match numeric_op(ArithOp::Add, &total, v) {
                        Some(t) => total = t,
                        None => return Ok(None),
                    }
                }
                if a.func == AggFunc::Sum || values.is_empty() {
                    Some(total)
                } else {
                    numeric_op(ArithOp::Div, &total, &Value::Integer(values.len() as i64))
                }
            }
            AggFunc::Min | AggFunc::Max => values.into_iter().reduce(|x, y| {
                let o = sort_order(&y, &x);
                let better = if a.func == AggFunc::Min {
                    o == Ordering::Less
                } else {
                    o == Ordering::Greater
                };
                if better {
                    y
                } else {
                    x
                }
            }),
        })
    }
}

fn literal_value(l: &Literal) -> Value {
    l.to_value()
}

/// SPARQL numeric arithmetic: integer closed under `+ - *`, division
/// always yields a decimal, errors on non-numbers and division by zero.
fn numeric_op(op: ArithOp, a: &Value, b: &Value) -> Ev {
    if let (Value::Integer(x), Value::Integer(y)) = (a, b) {
        let r = match op {
            ArithOp::Add => x.checked_add(*y),
            ArithOp::Sub => x.checked_sub(*y),
            ArithOp::Mul => x.checked_mul(*y),
            ArithOp::Div => None,
        };
        if let Some(r) = r {
            return Some(Value::Integer(r));
        }
    }
    if matches!(a, Value::Boolean(_) | Value::Text(_)) || matches!(b, Value::Boolean(_) | Value::Text(_)) {
        return None;
    }
    let (x, y) = (a.as_f64()?, b.as_f64()?);
    match op {
        ArithOp::Add => Some(Value::Real(x + y)),
        ArithOp::Sub => Some(Value::Real(x - y)),
        ArithOp::Mul => Some(Value::Real(x * y)),
        ArithOp::Div if y == 0.0 => None,
        ArithOp::Div => Some(Value::Real(x / y)),
    }
}
