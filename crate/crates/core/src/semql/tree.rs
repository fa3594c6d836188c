use std::num::NonZeroU64;

use super::error::SemQlError;
use crate::sql::{AggFunc, ArithOp, CmpOp, Direction};
use crate::value::Value;

/// Upper bound on projection items per select.
pub const MAX_PROJECTIONS: usize = 6;

/// Root `Z` of a tree: one query block or a binary set operation.
#[derive(Debug, Clone, PartialEq)]
pub enum SemQlTree {
    Single(Box<RBlock>),
    Intersect(Box<RBlock>, Box<RBlock>),
    Union(Box<RBlock>, Box<RBlock>),
    Except(Box<RBlock>, Box<RBlock>),
}

impl SemQlTree {
    pub fn blocks(&self) -> Vec<&RBlock> {
        match self {
            SemQlTree::Single(r) => vec![r],
            SemQlTree::Intersect(a, b) | SemQlTree::Union(a, b) | SemQlTree::Except(a, b) => {
                vec![a, b]
            }
        }
    }

    pub fn set_op_name(&self) -> Option<&'static str> {
        match self {
            SemQlTree::Single(_) => None,
            SemQlTree::Intersect(..) => Some("intersect"),
            SemQlTree::Union(..) => Some("union"),
            SemQlTree::Except(..) => Some("except"),
        }
    }
}

/// Production `R`: a select with optional filter and ordering. The table
/// list, join path and grouping keys are annotations: they are implied by
/// the column references in plain SemQL and recorded here so emission does
/// not have to guess them.
#[derive(Debug, Clone, PartialEq)]
pub struct RBlock {
    pub select: Projection,
    pub filter: Option<Filter>,
    pub order: Option<OrderClause>,
    /// Table of each slot; `ColRef::slot` indexes this.
    pub tables: Vec<String>,
    pub join_path: Vec<JoinEdge>,
    pub group_by: Vec<ColRef>,
}

impl RBlock {
    pub fn new(tables: Vec<String>, select: Projection) -> RBlock {
        RBlock {
            select,
            filter: None,
            order: None,
            tables,
            join_path: Vec::new(),
            group_by: Vec::new(),
        }
    }

    pub fn with_filter(mut self, filter: Filter) -> RBlock {
        self.filter = Some(filter);
        self
    }

    pub fn with_order(mut self, order: OrderClause) -> RBlock {
        self.order = Some(order);
        self
    }

    pub fn with_join(mut self, edge: JoinEdge) -> RBlock {
        self.join_path.push(edge);
        self
    }

    pub fn with_group_by(mut self, keys: Vec<ColRef>) -> RBlock {
        self.group_by = keys;
        self
    }

    pub fn has_aggregate(&self) -> bool {
        self.select.items.iter().any(AExpr::is_aggregate)
            || self.filter.as_ref().is_some_and(Filter::has_aggregate)
            || self.order.as_ref().is_some_and(|o| o.expr().is_aggregate())
    }

    pub fn is_grouped(&self) -> bool {
        !self.group_by.is_empty() || self.has_aggregate()
    }
}

/// `Select ::= distinct? N` with `N` holding one to six `A` items.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub distinct: bool,
    pub items: Vec<AExpr>,
}

impl Projection {
    pub fn new(distinct: bool, items: Vec<AExpr>) -> Result<Projection, SemQlError> {
        if items.is_empty() {
            return Err(SemQlError::Grammar("select needs at least one item".into()));
        }
        if items.len() > MAX_PROJECTIONS {
            return Err(SemQlError::ProjectionOverflow(items.len()));
        }
        Ok(Projection { distinct, items })
    }
}

/// `(C, T)`: a column of the table in a given slot; `column` is `None` for
/// the `*` of `count(*)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColRef {
    pub column: Option<String>,
    pub table: String,
    pub slot: usize,
}

impl ColRef {
    pub fn new(column: &str, table: &str, slot: usize) -> ColRef {
        ColRef {
            column: Some(column.to_string()),
            table: table.to_string(),
            slot,
        }
    }

    pub fn star(table: &str, slot: usize) -> ColRef {
        ColRef {
            column: None,
            table: table.to_string(),
            slot,
        }
    }
}

/// `Op ::= arith(op, (C,T), (C,T)) | ref(C,T)`
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Ref(ColRef),
    Arith(ArithOp, ColRef, ColRef),
}

impl Op {
    pub fn columns(&self) -> Vec<&ColRef> {
        match self {
            Op::Ref(c) => vec![c],
            Op::Arith(_, a, b) => vec![a, b],
        }
    }
}

/// `A ::= agg(kind, Op) | Op`
#[derive(Debug, Clone, PartialEq)]
pub enum AExpr {
    Agg(AggFunc, Op),
    Plain(Op),
}

impl AExpr {
    pub fn column(c: ColRef) -> AExpr {
        AExpr::Plain(Op::Ref(c))
    }

    pub fn count_star(table: &str, slot: usize) -> AExpr {
        AExpr::Agg(AggFunc::Count, Op::Ref(ColRef::star(table, slot)))
    }

    pub fn is_aggregate(&self) -> bool {
        matches!(self, AExpr::Agg(..))
    }

    pub fn op(&self) -> &Op {
        match self {
            AExpr::Agg(_, op) | AExpr::Plain(op) => op,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Value(Value),
    Query(Box<RBlock>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Filter {
    And(Box<Filter>, Box<Filter>),
    Or(Box<Filter>, Box<Filter>),
    Cmp(CmpOp, AExpr, Operand),
    /// Literal bounds; exactly two in a well-formed tree.
    Between(AExpr, Vec<Value>),
    /// Bounds taken from a single-row subquery projecting (low, high).
    BetweenQuery(AExpr, Box<RBlock>),
    In(AExpr, Box<RBlock>),
    NotIn(AExpr, Box<RBlock>),
    Like(AExpr, String),
}

impl Filter {
    pub fn and(a: Filter, b: Filter) -> Filter {
        Filter::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Filter, b: Filter) -> Filter {
        Filter::Or(Box::new(a), Box::new(b))
    }

    pub fn between(a: AExpr, low: Value, high: Value) -> Filter {
        Filter::Between(a, vec![low, high])
    }

    /// Aggregate anywhere in this filter, not counting nested blocks.
    pub fn has_aggregate(&self) -> bool {
        match self {
            Filter::And(a, b) | Filter::Or(a, b) => a.has_aggregate() || b.has_aggregate(),
            Filter::Cmp(_, a, _)
            | Filter::Between(a, _)
            | Filter::BetweenQuery(a, _)
            | Filter::In(a, _)
            | Filter::NotIn(a, _)
            | Filter::Like(a, _) => a.is_aggregate(),
        }
    }

    /// Top-level conjuncts.
    pub fn conjuncts(&self) -> Vec<&Filter> {
        match self {
            Filter::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            other => vec![other],
        }
    }

    /// Nested blocks directly referenced by this filter.
    pub fn subqueries(&self) -> Vec<&RBlock> {
        match self {
            Filter::And(a, b) | Filter::Or(a, b) => {
                let mut v = a.subqueries();
                v.extend(b.subqueries());
                v
            }
            Filter::Cmp(_, _, Operand::Query(r))
            | Filter::BetweenQuery(_, r)
            | Filter::In(_, r)
            | Filter::NotIn(_, r) => vec![r],
            _ => vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperlativeKind {
    Most,
    Least,
}

impl SuperlativeKind {
    pub fn direction(self) -> Direction {
        match self {
            SuperlativeKind::Most => Direction::Desc,
            SuperlativeKind::Least => Direction::Asc,
        }
    }
}

/// `Order ::= asc(A) | desc(A)`, `Superlative ::= most(V, A) | least(V, A)`
/// where `V` is the number of rows kept.
#[derive(Debug, Clone, PartialEq)]
pub enum OrderClause {
    Order(Direction, AExpr),
    Superlative(SuperlativeKind, NonZeroU64, AExpr),
}

impl OrderClause {
    pub fn expr(&self) -> &AExpr {
        match self {
            OrderClause::Order(_, a) | OrderClause::Superlative(_, _, a) => a,
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            OrderClause::Order(d, _) => *d,
            OrderClause::Superlative(k, _, _) => k.direction(),
        }
    }

    pub fn limit(&self) -> Option<u64> {
        match self {
            OrderClause::Order(..) => None,
            OrderClause::Superlative(_, n, _) => Some(n.get()),
        }
    }
}

/// Foreign-key edge: `column` of the table in `from_slot` references
/// `ref_column` of the table in `to_slot`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JoinEdge {
    pub from_slot: usize,
    pub column: String,
    pub to_slot: usize,
    pub ref_column: String,
}
