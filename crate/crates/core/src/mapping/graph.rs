use std::collections::BTreeSet;

use crate::value::{format_real, Datatype, Value};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiteralType {
    /// Plain string literal.
    String,
    Integer,
    Decimal,
    Boolean,
}

impl LiteralType {
    pub fn iri(self) -> Option<String> {
        match self {
            LiteralType::String => None,
            LiteralType::Integer => Some(format!("{XSD}integer")),
            LiteralType::Decimal => Some(format!("{XSD}decimal")),
            LiteralType::Boolean => Some(format!("{XSD}boolean")),
        }
    }
}

/// Lexical form plus datatype.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub lexical: String,
    pub datatype: LiteralType,
}

impl Literal {
    /// `None` for null: nulls never become literals.
    pub fn from_value(v: &Value) -> Option<Literal> {
        let (lexical, datatype) = match v {
            Value::Null => return None,
            Value::Integer(i) => (i.to_string(), LiteralType::Integer),
            Value::Real(r) => (format_real(*r), LiteralType::Decimal),
            Value::Text(s) => (s.clone(), LiteralType::String),
            Value::Boolean(b) => (b.to_string(), LiteralType::Boolean),
        };
        Some(Literal { lexical, datatype })
    }

    pub fn to_value(&self) -> Value {
        let dt = match self.datatype {
            LiteralType::String => return Value::Text(self.lexical.clone()),
            LiteralType::Integer => Datatype::Integer,
            LiteralType::Decimal => Datatype::Real,
            LiteralType::Boolean => Datatype::Boolean,
        };
        Value::parse_as(&self.lexical, dt).unwrap_or_else(|| Value::Text(self.lexical.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Term,
}

/// A set of triples; duplicates collapse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph {
            triples: iter.into_iter().collect(),
        }
    }
}
