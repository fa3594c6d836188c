use std::fmt;

use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetOpKind {
    Union,
    Intersect,
    Except,
}

impl SetOpKind {
    pub fn keyword(self) -> &'static str {
        match self {
            SetOpKind::Union => "UNION",
            SetOpKind::Intersect => "INTERSECT",
            SetOpKind::Except => "EXCEPT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Select(Box<Select>),
    SetOp {
        op: SetOpKind,
        left: Box<Query>,
        right: Box<Query>,
    },
}

impl Query {
    /// Left-most block; its projection names the result columns.
    pub fn first_block(&self) -> &Select {
        match self {
            Query::Select(s) => s,
            Query::SetOp { left, .. } => left.first_block(),
        }
    }

    pub fn arity(&self) -> usize {
        self.first_block().items.len()
    }

    pub fn is_ordered(&self) -> bool {
        match self {
            Query::Select(s) => !s.order_by.is_empty(),
            Query::SetOp { .. } => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Select {
    pub distinct: bool,
    pub items: Vec<SelectItem>,
    pub from: TableRef,
    pub joins: Vec<Join>,
    pub where_clause: Option<Expr>,
    pub group_by: Vec<ColumnRef>,
    pub having: Option<Expr>,
    pub order_by: Vec<OrderItem>,
    pub limit: Option<u64>,
}

impl Select {
    /// FROM table followed by joined tables; a column's `slot` indexes this.
    pub fn slots(&self) -> Vec<&TableRef> {
        std::iter::once(&self.from)
            .chain(self.joins.iter().map(|j| &j.table))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectItem {
    pub expr: Expr,
    pub alias: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRef {
    pub table: String,
    pub alias: Option<String>,
}

impl TableRef {
    /// Name used to qualify this table's columns.
    pub fn qualifier(&self) -> &str {
        self.alias.as_deref().unwrap_or(&self.table)
    }
}

/// Inner join; `on` is absent for comma joins and bare `JOIN`.
#[derive(Debug, Clone, PartialEq)]
pub struct Join {
    pub table: TableRef,
    pub on: Option<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderItem {
    pub expr: Expr,
    pub direction: Direction,
}

/// Column reference. The parser fills `qualifier` and `column`; resolution
/// fills `table`, `slot` and `index` and clears the qualifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColumnRef {
    pub qualifier: Option<String>,
    pub table: String,
    pub column: String,
    pub slot: usize,
    pub index: usize,
}

impl ColumnRef {
    pub fn unresolved(qualifier: Option<String>, column: String) -> ColumnRef {
        ColumnRef {
            qualifier,
            table: String::new(),
            column,
            slot: usize::MAX,
            index: usize::MAX,
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.slot != usize::MAX
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AggFunc {
    Count,
    Sum,
    Avg,
    Min,
    Max,
}

impl AggFunc {
    pub fn from_name(name: &str) -> Option<AggFunc> {
        match name.to_ascii_lowercase().as_str() {
            "count" => Some(AggFunc::Count),
            "sum" => Some(AggFunc::Sum),
            "avg" => Some(AggFunc::Avg),
            "min" => Some(AggFunc::Min),
            "max" => Some(AggFunc::Max),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AggFunc::Count => "count",
            AggFunc::Sum => "sum",
            AggFunc::Avg => "avg",
            AggFunc::Min => "min",
            AggFunc::Max => "max",
        }
    }
}

impl fmt::Display for AggFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AggArg {
    Star,
    Expr(Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }

    /// The operator with its operands swapped (`a < b` iff `b > a`).
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Column(ColumnRef),
    /// `*` or `t.*` in a select list; expanded away by resolution.
    Wildcard(Option<String>),
    Literal(Value),
    Aggregate {
        func: AggFunc,
        arg: AggArg,
    },
    Arith {
        op: ArithOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Compare {
        op: CmpOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Between {
        expr: Box<Expr>,
        low: Box<Expr>,
        high: Box<Expr>,
    },
    InList {
        expr: Box<Expr>,
        list: Vec<Value>,
        negated: bool,
    },
    InSubquery {
        expr: Box<Expr>,
        query: Box<Query>,
        negated: bool,
    },
    Like {
        expr: Box<Expr>,
        pattern: String,
    },
    /// Scalar subquery.
    Subquery(Box<Query>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn is_predicate(&self) -> bool {
        matches!(
            self,
            Expr::Compare { .. }
                | Expr::Between { .. }
                | Expr::InList { .. }
                | Expr::InSubquery { .. }
                | Expr::Like { .. }
                | Expr::And(..)
                | Expr::Or(..)
        )
    }

    /// True if an aggregate occurs outside any nested subquery.
    pub fn contains_aggregate(&self) -> bool {
        let mut found = false;
        self.visit_shallow(&mut |e| {
            if matches!(e, Expr::Aggregate { .. }) {
                found = true;
            }
        });
        found
    }

    /// Pre-order walk that does not descend into subqueries.
    pub fn visit_shallow(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Column(_) | Expr::Wildcard(_) | Expr::Literal(_) | Expr::Subquery(_) => {}
            Expr::Aggregate { arg, .. } => {
                if let AggArg::Expr(e) = arg {
                    e.visit_shallow(f);
                }
            }
            Expr::Arith { left, right, .. } | Expr::Compare { left, right, .. } => {
                left.visit_shallow(f);
                right.visit_shallow(f);
            }
            Expr::Between { expr, low, high } => {
                expr.visit_shallow(f);
                low.visit_shallow(f);
                high.visit_shallow(f);
            }
            Expr::InList { expr, .. } | Expr::InSubquery { expr, .. } | Expr::Like { expr, .. } => {
                expr.visit_shallow(f)
            }
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.visit_shallow(f);
                b.visit_shallow(f);
            }
        }
    }

    /// Column references outside aggregates and subqueries.
    pub fn bare_columns(&self) -> Vec<&ColumnRef> {
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a ColumnRef>) {
            match e {
                Expr::Column(c) => out.push(c),
                Expr::Aggregate { .. } | Expr::Subquery(_) | Expr::Wildcard(_) | Expr::Literal(_) => {}
                Expr::Arith { left, right, .. } | Expr::Compare { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
                Expr::Between { expr, low, high } => {
                    walk(expr, out);
                    walk(low, out);
                    walk(high, out);
                }
                Expr::InList { expr, .. }
                | Expr::InSubquery { expr, .. }
                | Expr::Like { expr, .. } => walk(expr, out),
                Expr::And(a, b) | Expr::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}
