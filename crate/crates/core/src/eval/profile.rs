use std::collections::BTreeSet;

use serde::Serialize;

use crate::semql::{aggregate_kinds, AExpr, Filter, Op, RBlock, SemQlTree};
use crate::sparql::SparqlQuery;

/// Structural complexity of one translated query.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryProfile {
    pub num_projections: usize,
    /// Atomic filter predicates, subqueries included.
    pub num_selections: usize,
    pub comparison_ops: BTreeSet<String>,
    pub has_order_by: bool,
    pub has_math_ops: bool,
    pub has_group_having: bool,
    pub num_set_ops: usize,
    /// Triple patterns across subqueries, union branches and EXISTS.
    pub num_triple_patterns: usize,
    pub num_subqueries: usize,
    pub num_aggregations: usize,
    pub aggregation_types: BTreeSet<String>,
    /// Object-property edges on the join paths.
    pub num_hops: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    SingleHop,
    MultiHop,
    Aggregation,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::SingleHop => "single_hop",
            Category::MultiHop => "multi_hop",
            Category::Aggregation => "aggregation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hardness {
    Easy,
    Medium,
    Hard,
    Extra,
}

impl Hardness {
    pub fn name(self) -> &'static str {
        match self {
            Hardness::Easy => "easy",
            Hardness::Medium => "medium",
            Hardness::Hard => "hard",
            Hardness::Extra => "extra",
        }
    }
}

fn all_blocks(tree: &SemQlTree) -> Vec<&RBlock> {
    fn push<'a>(r: &'a RBlock, out: &mut Vec<&'a RBlock>) {
        out.push(r);
        if let Some(f) = &r.filter {
            for sub in f.subqueries() {
                push(sub, out);
            }
        }
    }
    let mut out = Vec::new();
    for r in tree.blocks() {
        push(r, &mut out);
    }
    out
}

fn atoms<'a>(f: &'a Filter, out: &mut Vec<&'a Filter>) {
    match f {
        Filter::And(a, b) | Filter::Or(a, b) => {
            atoms(a, out);
            atoms(b, out);
        }
        other => out.push(other),
    }
}

fn is_math(a: &AExpr) -> bool {
    matches!(a.op(), Op::Arith(..))
}

pub fn profile_query(tree: &SemQlTree, q: &SparqlQuery) -> QueryProfile {
    let blocks = all_blocks(tree);
    let mut p = QueryProfile {
        num_projections: tree.blocks().first().map_or(0, |r| r.select.items.len()),
        num_set_ops: usize::from(tree.set_op_name().is_some()),
        ..QueryProfile::default()
    };
    for r in &blocks {
        p.num_hops += r.join_path.len();
        if r.order.is_some() {
            p.has_order_by = true;
        }
        if r.select.items.iter().any(is_math) || r.order.as_ref().is_some_and(|o| is_math(o.expr())) {
            p.has_math_ops = true;
        }
        if !r.group_by.is_empty() {
            p.has_group_having = true;
        }
        let Some(f) = &r.filter else { continue };
        p.num_subqueries += f.subqueries().len();
        if f.conjuncts().iter().any(|c| c.has_aggregate()) {
            p.has_group_having = true;
        }
        let mut list = Vec::new();
        atoms(f, &mut list);
        p.num_selections += list.len();
        for atom in list {
            let (a, op) = match atom {
                Filter::Cmp(op, a, _) => (a, op.symbol().to_string()),
                Filter::Between(a, _) | Filter::BetweenQuery(a, _) => (a, "between".to_string()),
                Filter::In(a, _) => (a, "in".to_string()),
                Filter::NotIn(a, _) => (a, "not in".to_string()),
                Filter::Like(a, _) => (a, "like".to_string()),
                Filter::And(..) | Filter::Or(..) => unreachable!("flattened"),
            };
            if is_math(a) {
                p.has_math_ops = true;
            }
            p.comparison_ops.insert(op);
        }
    }
    let kinds = aggregate_kinds(tree);
    p.num_aggregations = kinds.len();
    p.aggregation_types = kinds.iter().map(|k| k.name().to_string()).collect();
    p.num_triple_patterns = q.all_groups().iter().map(|g| g.triples().count()).sum();
    p
}

pub fn categorize(p: &QueryProfile) -> BTreeSet<Category> {
    let mut out = BTreeSet::new();
    if p.num_hops == 0 && p.num_set_ops == 0 {
        out.insert(Category::SingleHop);
    } else {
        out.insert(Category::MultiHop);
    }
    if p.num_aggregations >= 1 {
        out.insert(Category::Aggregation);
    }
    out
}

/// Additive complexity score behind [`hardness`].
pub fn hardness_score(p: &QueryProfile) -> usize {
    p.num_aggregations
        + p.num_set_ops * 2
        + p.num_subqueries * 2
        + p.num_hops.saturating_sub(1)
        + usize::from(p.has_group_having)
        + usize::from(p.has_order_by)
        + p.num_selections.saturating_sub(1)
}

pub fn hardness(p: &QueryProfile) -> Hardness {
    match hardness_score(p) {
        0..=1 => Hardness::Easy,
        2..=3 => Hardness::Medium,
        4..=5 => Hardness::Hard,
        _ => Hardness::Extra,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiers() {
        let base = QueryProfile {
            num_projections: 1,
            num_triple_patterns: 1,
            ..QueryProfile::default()
        };
        assert_eq!(hardness(&base), Hardness::Easy);
        let grouped = QueryProfile {
            num_aggregations: 1,
            has_group_having: true,
            num_hops: 2,
            ..base.clone()
        };
        assert_eq!(hardness(&grouped), Hardness::Medium);
        let heavy = QueryProfile {
            num_set_ops: 1,
            num_subqueries: 1,
            num_aggregations: 2,
            ..base.clone()
        };
        assert_eq!(hardness(&heavy), Hardness::Extra);
    }

    #[test]
    fn categories() {
        let one = QueryProfile {
            num_aggregations: 1,
            ..QueryProfile::default()
        };
        let cats: Vec<_> = categorize(&one).into_iter().collect();
        assert_eq!(cats, vec![Category::SingleHop, Category::Aggregation]);
        let set_op = QueryProfile {
            num_set_ops: 1,
            ..QueryProfile::default()
        };
        assert_eq!(categorize(&set_op).into_iter().collect::<Vec<_>>(), vec![Category::MultiHop]);
    }
}
