use super::error::SparqlError;
use super::model::*;

/// Checks a query and every nested query: non-empty patterns, the SPARQL
/// 1.1 grouping rule, and that every used variable is bound in scope.
pub fn check_invariants(q: &SparqlQuery) -> Result<(), SparqlError> {
    check_query(q)
}

fn violation(msg: String) -> SparqlError {
    SparqlError::InvariantViolation(msg)
}

fn check_query(q: &SparqlQuery) -> Result<(), SparqlError> {
    if q.pattern.elements.is_empty() {
        return Err(violation("empty pattern list".into()));
    }
    if q.projections.is_empty() {
        return Err(violation("empty projection".into()));
    }
    let mut outputs = std::collections::HashSet::new();
    for p in &q.projections {
        if !outputs.insert(p.output()) {
            return Err(violation(format!("?{} projected twice", p.output())));
        }
    }
    let bound = q.pattern.bound_vars();
    let in_scope = |v: &String| bound.contains(v);

    if q.is_grouped() {
        for p in &q.projections {
            let mut free = Vec::new();
            match p {
                Projected::Var(v) => free.push(v.clone()),
                Projected::Expr(e, _) => e.free_vars(&mut free),
            }
            if let Some(v) = free.iter().find(|v| !q.group_by.contains(v)) {
                return Err(violation(format!(
                    "?{v} is projected but neither aggregated nor grouped"
                )));
            }
        }
    }
    for v in &q.group_by {
        if !in_scope(v) {
            return Err(violation(format!("GROUP BY ?{v} is not bound")));
        }
    }
    let mut used = Vec::new();
    for p in &q.projections {
        match p {
            Projected::Var(v) => used.push(v.clone()),
            Projected::Expr(e, _) => e.all_vars(&mut used),
        }
    }
    for h in &q.having {
        h.all_vars(&mut used);
    }
    if let Some(v) = used.iter().find(|v| !in_scope(v)) {
        return Err(violation(format!("?{v} is used but not bound")));
    }
    for k in &q.order_by {
        let mut vars = Vec::new();
        k.expr.all_vars(&mut vars);
        if let Some(v) = vars.iter().find(|v| !in_scope(v) && !outputs.contains(v.as_str())) {
            return Err(violation(format!("ORDER BY ?{v} is not bound")));
        }
    }
    if q.limit == Some(0) {
        return Err(violation("LIMIT 0".into()));
    }
    check_group(&q.pattern, &[])
}

fn check_expr(e: &SExpr, bound: &[String]) -> Result<(), SparqlError> {
    let mut vars = Vec::new();
    e.all_vars(&mut vars);
    if let Some(v) = vars.iter().find(|v| !bound.contains(v)) {
        return Err(violation(format!("?{v} is used but not bound")));
    }
    for g in e.nested_patterns() {
        check_group(g, bound)?;
    }
    Ok(())
}

fn check_group(g: &GroupPattern, outer: &[String]) -> Result<(), SparqlError> {
    let mut bound: Vec<String> = outer.to_vec();
    bound.extend(g.bound_vars());
    for e in &g.elements {
        match e {
            PatternElement::Triple(_) => {}
            PatternElement::Filter(f) | PatternElement::Bind(f, _) => check_expr(f, &bound)?,
            PatternElement::SubQuery(q) => check_query(q)?,
            PatternElement::Union(branches) => {
                for b in branches {
                    if b.elements.is_empty() {
                        return Err(violation("empty union branch".into()));
                    }
                    check_group(b, outer)?;
                }
            }
        }
    }
    Ok(())
}
