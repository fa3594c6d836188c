//! Canonical SPARQL text layout.

use std::fmt::Write;

use super::error::SparqlError;
use super::invariants::check_invariants;
use super::model::*;
use crate::mapping::{literal_to_ntriples, RDF_TYPE, XSD};
use crate::mapping::escape_literal;
use crate::sql::Direction;
use crate::value::{format_real, Value};

const INDENT: &str = "  ";

/// How IRIs are written.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum IriStyle {
    /// `<http://...>` everywhere.
    #[default]
    Full,
    /// `PREFIX : <prefix>` header with `:local` names under it.
    Prefixed(String),
}

/// Serializes with full IRIs.
pub fn serialize_sparql(q: &SparqlQuery) -> Result<String, SparqlError> {
    serialize_sparql_with(q, &IriStyle::Full)
}

pub fn serialize_sparql_with(q: &SparqlQuery, style: &IriStyle) -> Result<String, SparqlError> {
    check_invariants(q)?;
    let w = Writer { style };
    let mut out = String::new();
    if let IriStyle::Prefixed(prefix) = style {
        let _ = writeln!(out, "PREFIX : <{prefix}>");
        let _ = writeln!(out, "PREFIX xsd: <{XSD}>");
        out.push('\n');
    }
    w.query(q, 0, &mut out);
    Ok(out)
}

struct Writer<'a> {
    style: &'a IriStyle,
}

fn pad(depth: usize) -> String {
    INDENT.repeat(depth)
}

impl Writer<'_> {
    fn iri(&self, iri: &str) -> String {
        if let IriStyle::Prefixed(prefix) = self.style {
            if let Some(local) = iri.strip_prefix(prefix.as_str()) {
                let plain = !local.is_empty()
                    && local
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '#'))
                    && !local.starts_with('-');
                if plain {
                    return format!(":{}", local.replace('#', "\\#"));
                }
            }
            if let Some(local) = iri.strip_prefix(XSD) {
                return format!("xsd:{local}");
            }
        }
        format!("<{iri}>")
    }

    fn term(&self, t: &PatternTerm) -> String {
        match t {
            PatternTerm::Var(v) => format!("?{v}"),
            PatternTerm::Iri(i) => self.iri(i),
            PatternTerm::Literal(l) => literal_to_ntriples(l),
        }
    }

    fn query(&self, q: &SparqlQuery, depth: usize, out: &mut String) {
        let p = pad(depth);
        let mut select = format!("{p}SELECT");
        if q.distinct {
            select.push_str(" DISTINCT");
        }
        for proj in &q.projections {
            match proj {
                Projected::Var(v) => {
                    let _ = write!(select, " ?{v}");
                }
                Projected::Expr(e, v) => {
                    let _ = write!(select, " ({} AS ?{v})", self.expr(e, depth));
                }
            }
        }
        out.push_str(&select);
        out.push('\n');
        let _ = writeln!(out, "{p}WHERE {{");
        self.elements(&q.pattern, depth + 1, out);
        let _ = writeln!(out, "{p}}}");
        if !q.group_by.is_empty() {
            let vars: Vec<String> = q.group_by.iter().map(|v| format!("?{v}")).collect();
            let _ = writeln!(out, "{p}GROUP BY {}", vars.join(" "));
        }
        if !q.having.is_empty() {
            let conds: Vec<String> = q.having.iter().map(|h| format!("({})", self.expr(h, depth))).collect();
            let _ = writeln!(out, "{p}HAVING {}", conds.join(" "));
        }
        if !q.order_by.is_empty() {
            let keys: Vec<String> = q
                .order_by
                .iter()
                .map(|k| {
                    let dir = match k.direction {
                        Direction::Asc => "ASC",
                        Direction::Desc => "DESC",
                    };
                    format!("{dir}({})", self.expr(&k.expr, depth))
                })
                .collect();
            let _ = writeln!(out, "{p}ORDER BY {}", keys.join(" "));
        }
        if let Some(n) = q.limit {
            let _ = writeln!(out, "{p}LIMIT {n}");
        }
    }

    fn elements(&self, g: &GroupPattern, depth: usize, out: &mut String) {
        let p = pad(depth);
        for e in &g.elements {
            match e {
                PatternElement::Triple(t) => {
                    let predicate = if t.predicate == RDF_TYPE {
                        "a".to_string()
                    } else {
                        self.iri(&t.predicate)
                    };
                    let _ = writeln!(out, "{p}{} {predicate} {} .", self.term(&t.subject), self.term(&t.object));
                }
                PatternElement::Bind(e, v) => {
                    let _ = writeln!(out, "{p}BIND({} AS ?{v})", self.expr(e, depth));
                }
                PatternElement::SubQuery(q) => {
                    let _ = writeln!(out, "{p}{{");
                    self.query(q, depth + 1, out);
                    let _ = writeln!(out, "{p}}}");
                }
                PatternElement::Union(branches) => {
                    for (i, b) in branches.iter().enumerate() {
                        if i > 0 {
                            let _ = writeln!(out, "{p}UNION");
                        }
                        let _ = writeln!(out, "{p}{{");
                        self.elements(b, depth + 1, out);
                        let _ = writeln!(out, "{p}}}");
                    }
                }
                PatternElement::Filter(f) => {
                    let text = match f {
                        SExpr::Exists(_) | SExpr::NotExists(_) => self.expr(f, depth),
                        other => format!("({})", self.expr(other, depth)),
                    };
                    let _ = writeln!(out, "{p}FILTER{}{text}", if text.starts_with('(') { "" } else { " " });
                }
            }
        }
    }

    fn constant(&self, v: &Value) -> String {
        match v {
            Value::Null => "COALESCE()".to_string(),
            Value::Integer(i) => i.to_string(),
            Value::Real(r) => format_real(*r),
            Value::Text(s) => format!("\"{}\"", escape_literal(s)),
            Value::Boolean(b) => b.to_string(),
        }
    }

    /// Operand position: compound expressions are parenthesized.
    fn operand(&self, e: &SExpr, depth: usize) -> String {
        match e {
            SExpr::Cmp(..) | SExpr::And(..) | SExpr::Or(..) | SExpr::Arith(..) | SExpr::In(..) => {
                format!("({})", self.expr(e, depth))
            }
            other => self.expr(other, depth),
        }
    }

    fn group_block(&self, keyword: &str, g: &GroupPattern, depth: usize) -> String {
        let mut s = format!("{keyword} {{\n");
        self.elements(g, depth + 1, &mut s);
        s.push_str(&pad(depth));
        s.push('}');
        s
    }

    fn expr(&self, e: &SExpr, depth: usize) -> String {
        match e {
            SExpr::Var(v) => format!("?{v}"),
            SExpr::Const(v) => self.constant(v),
            SExpr::Cmp(op, a, b) => format!("{} {} {}", self.operand(a, depth), op.symbol(), self.operand(b, depth)),
            SExpr::And(a, b) => format!("{} && {}", self.operand(a, depth), self.operand(b, depth)),
            SExpr::Or(a, b) => format!("{} || {}", self.operand(a, depth), self.operand(b, depth)),
            SExpr::Arith(op, a, b) => {
                format!("{} {} {}", self.operand(a, depth), op.symbol(), self.operand(b, depth))
            }
            SExpr::In(x, list) => {
                let items: Vec<String> = list.iter().map(|i| self.expr(i, depth)).collect();
                format!("{} IN ({})", self.operand(x, depth), items.join(", "))
            }
            SExpr::Regex { text, pattern, flags } => format!(
                "REGEX({}, \"{}\", \"{}\")",
                self.expr(text, depth),
                escape_literal(pattern),
                escape_literal(flags)
            ),
            SExpr::Aggregate(a) => {
                let name = a.func.name().to_ascii_uppercase();
                match &a.arg {
                    None => format!("{name}(*)"),
                    Some(arg) => format!("{name}({})", self.expr(arg, depth)),
                }
            }
            SExpr::Exists(g) => self.group_block("EXISTS", g, depth),
            SExpr::NotExists(g) => self.group_block("NOT EXISTS", g, depth),
            SExpr::CastInteger(x) => format!("{}({})", self.iri(&format!("{XSD}integer")), self.expr(x, depth)),
            SExpr::If(c, a, b) => format!(
                "IF({}, {}, {})",
                self.expr(c, depth),
                self.expr(a, depth),
                self.expr(b, depth)
            ),
            SExpr::Coalesce(list) => {
                let items: Vec<String> = list.iter().map(|i| self.expr(i, depth)).collect();
                format!("COALESCE({})", items.join(", "))
            }
        }
    }
}
