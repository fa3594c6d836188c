use crate::mapping::Literal;
use crate::sql::{AggFunc, ArithOp, CmpOp, Direction};
use crate::value::Value;

/// Subject or object position of a triple pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternTerm {
    Var(String),
    Iri(String),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: String,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: PatternTerm, predicate: &str, object: PatternTerm) -> TriplePattern {
        TriplePattern {
            subject,
            predicate: predicate.to_string(),
            object,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub func: AggFunc,
    /// `None` for `COUNT(*)`.
    pub arg: Option<Box<SExpr>>,
}

/// SPARQL expression.
#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Var(String),
    Const(Value),
    Cmp(CmpOp, Box<SExpr>, Box<SExpr>),
    And(Box<SExpr>, Box<SExpr>),
    Or(Box<SExpr>, Box<SExpr>),
    Arith(ArithOp, Box<SExpr>, Box<SExpr>),
    /// `x IN (e1, e2, ...)`
    In(Box<SExpr>, Vec<SExpr>),
    Regex {
        text: Box<SExpr>,
        pattern: String,
        flags: String,
    },
    Aggregate(Aggregate),
    Exists(Box<GroupPattern>),
    NotExists(Box<GroupPattern>),
    /// `xsd:integer(x)`
    CastInteger(Box<SExpr>),
    If(Box<SExpr>, Box<SExpr>, Box<SExpr>),
    Coalesce(Vec<SExpr>),
}

impl SExpr {
    pub fn var(name: &str) -> SExpr {
        SExpr::Var(name.to_string())
    }

    pub fn cmp(op: CmpOp, a: SExpr, b: SExpr) -> SExpr {
        SExpr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn and(a: SExpr, b: SExpr) -> SExpr {
        SExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: SExpr, b: SExpr) -> SExpr {
        SExpr::Or(Box::new(a), Box::new(b))
    }

    /// Whether an aggregate occurs outside nested patterns.
    pub fn has_aggregate(&self) -> bool {
        match self {
            SExpr::Aggregate(_) => true,
            SExpr::Var(_) | SExpr::Const(_) | SExpr::Exists(_) | SExpr::NotExists(_) => false,
            SExpr::Cmp(_, a, b) | SExpr::And(a, b) | SExpr::Or(a, b) | SExpr::Arith(_, a, b) => {
                a.has_aggregate() || b.has_aggregate()
            }
            SExpr::In(x, list) => x.has_aggregate() || list.iter().any(SExpr::has_aggregate),
            SExpr::Regex { text, .. } => text.has_aggregate(),
            SExpr::CastInteger(x) => x.has_aggregate(),
            SExpr::If(a, b, c) => a.has_aggregate() || b.has_aggregate() || c.has_aggregate(),
            SExpr::Coalesce(list) => list.iter().any(SExpr::has_aggregate),
        }
    }

    /// Variables referenced outside aggregates and nested patterns.
    pub fn free_vars(&self, out: &mut Vec<String>) {
        match self {
            SExpr::Var(v) => out.push(v.clone()),
            SExpr::Const(_) | SExpr::Aggregate(_) | SExpr::Exists(_) | SExpr::NotExists(_) => {}
            SExpr::Cmp(_, a, b) | SExpr::And(a, b) | SExpr::Or(a, b) | SExpr::Arith(_, a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            SExpr::In(x, list) => {
                x.free_vars(out);
                for e in list {
                    e.free_vars(out);
                }
            }
            SExpr::Regex { text, .. } => text.free_vars(out),
            SExpr::CastInteger(x) => x.free_vars(out),
            SExpr::If(a, b, c) => {
                a.free_vars(out);
                b.free_vars(out);
                c.free_vars(out);
            }
            SExpr::Coalesce(list) => {
                for e in list {
                    e.free_vars(out);
                }
            }
        }
    }

    /// All variables, including those inside aggregates (but not inside
    /// nested patterns).
    pub fn all_vars(&self, out: &mut Vec<String>) {
        match self {
            SExpr::Aggregate(a) => {
                if let Some(arg) = &a.arg {
                    arg.all_vars(out);
                }
            }
            SExpr::Cmp(_, a, b) | SExpr::And(a, b) | SExpr::Or(a, b) | SExpr::Arith(_, a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            SExpr::In(x, list) => {
                x.all_vars(out);
                for e in list {
                    e.all_vars(out);
                }
            }
            SExpr::Regex { text, .. } => text.all_vars(out),
            SExpr::CastInteger(x) => x.all_vars(out),
            SExpr::If(a, b, c) => {
                a.all_vars(out);
                b.all_vars(out);
                c.all_vars(out);
            }
            SExpr::Coalesce(list) => {
                for e in list {
                    e.all_vars(out);
                }
            }
            other => other.free_vars(out),
        }
    }

    /// Nested group patterns of EXISTS / NOT EXISTS.
    pub fn nested_patterns(&self) -> Vec<&GroupPattern> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a SExpr, out: &mut Vec<&'a GroupPattern>) {
            match e {
                SExpr::Exists(g) | SExpr::NotExists(g) => out.push(g),
                SExpr::Var(_) | SExpr::Const(_) => {}
                SExpr::Aggregate(a) => {
                    if let Some(arg) = &a.arg {
                        walk(arg, out);
                    }
                }
                SExpr::Cmp(_, a, b) | SExpr::And(a, b) | SExpr::Or(a, b) | SExpr::Arith(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                SExpr::In(x, list) => {
                    walk(x, out);
                    for e in list {
                        walk(e, out);
                    }
                }
                SExpr::Regex { text, .. } => walk(text, out),
                SExpr::CastInteger(x) => walk(x, out),
                SExpr::If(a, b, c) => {
                    walk(a, out);
                    walk(b, out);
                    walk(c, out);
                }
                SExpr::Coalesce(list) => {
                    for e in list {
                        walk(e, out);
                    }
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternElement {
    Triple(TriplePattern),
    Bind(SExpr, String),
    SubQuery(Box<SparqlQuery>),
    Union(Vec<GroupPattern>),
    Filter(SExpr),
}

/// `{ ... }`: elements are joined in order; filters apply to the whole
/// group.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupPattern {
    pub elements: Vec<PatternElement>,
}

impl GroupPattern {
    pub fn triples(&self) -> impl Iterator<Item = &TriplePattern> {
        self.elements.iter().filter_map(|e| match e {
            PatternElement::Triple(t) => Some(t),
            _ => None,
        })
    }

    pub fn filters(&self) -> impl Iterator<Item = &SExpr> {
        self.elements.iter().filter_map(|e| match e {
            PatternElement::Filter(f) => Some(f),
            _ => None,
        })
    }

    /// Variables this group can bind (visible to its enclosing scope).
    pub fn bound_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.elements {
            match e {
                PatternElement::Triple(t) => {
                    for term in [&t.subject, &t.object] {
                        if let PatternTerm::Var(v) = term {
                            out.push(v.clone());
                        }
                    }
                }
                PatternElement::Bind(_, v) => out.push(v.clone()),
                PatternElement::SubQuery(q) => out.extend(q.output_vars()),
                PatternElement::Union(branches) => {
                    for b in branches {
                        out.extend(b.bound_vars());
                    }
                }
                PatternElement::Filter(_) => {}
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|v| seen.insert(v.clone()));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projected {
    Var(String),
    Expr(SExpr, String),
}

impl Projected {
    pub fn output(&self) -> &str {
        match self {
            Projected::Var(v) | Projected::Expr(_, v) => v,
        }
    }

    pub fn is_aggregate(&self) -> bool {
        matches!(self, Projected::Expr(e, _) if e.has_aggregate())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderKey {
    pub expr: SExpr,
    pub direction: Direction,
}

/// A SELECT query in the emitted subset of SPARQL 1.1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparqlQuery {
    pub distinct: bool,
    pub projections: Vec<Projected>,
    pub pattern: GroupPattern,
    pub group_by: Vec<String>,
    pub having: Vec<SExpr>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<u64>,
}

impl SparqlQuery {
    pub fn output_vars(&self) -> Vec<String> {
        self.projections.iter().map(|p| p.output().to_string()).collect()
    }

    pub fn has_aggregate(&self) -> bool {
        self.projections.iter().any(Projected::is_aggregate)
            || self.having.iter().any(SExpr::has_aggregate)
            || self.order_by.iter().any(|o| o.expr.has_aggregate())
    }

    /// Whether solutions are grouped (explicitly or by aggregation).
    pub fn is_grouped(&self) -> bool {
        !self.group_by.is_empty() || self.has_aggregate()
    }

    /// Visits this query and every nested query (subqueries, union
    /// branches, EXISTS patterns), outermost first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a SparqlQuery)) {
        f(self);
        fn group<'a>(g: &'a GroupPattern, f: &mut dyn FnMut(&'a SparqlQuery)) {
            for e in &g.elements {
                match e {
                    PatternElement::SubQuery(q) => q.walk(f),
                    PatternElement::Union(branches) => {
                        for b in branches {
                            group(b, f);
                        }
                    }
                    PatternElement::Filter(x) | PatternElement::Bind(x, _) => {
                        for g in x.nested_patterns() {
                            group(g, f);
                        }
                    }
                    PatternElement::Triple(_) => {}
                }
            }
        }
        group(&self.pattern, f);
        for h in &self.having {
            for g in h.nested_patterns() {
                group(g, f);
            }
        }
    }

    /// Every group pattern of this query, including nested ones.
    pub fn all_groups(&self) -> Vec<&GroupPattern> {
        fn collect<'a>(g: &'a GroupPattern, out: &mut Vec<&'a GroupPattern>) {
            out.push(g);
            for e in &g.elements {
                match e {
                    PatternElement::SubQuery(q) => collect(&q.pattern, out),
                    PatternElement::Union(branches) => {
                        for b in branches {
                            collect(b, out);
                        }
                    }
                    PatternElement::Filter(x) | PatternElement::Bind(x, _) => {
                        for n in x.nested_patterns() {
                            collect(n, out);
                        }
                    }
                    PatternElement::Triple(_) => {}
                }
            }
        }
        let mut out = Vec::new();
        collect(&self.pattern, &mut out);
        for h in &self.having {
            for n in h.nested_patterns() {
                collect(n, &mut out);
            }
        }
        out
    }
}
