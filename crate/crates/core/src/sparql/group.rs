use super::model::{Projected, SparqlQuery};

/// Makes a query conform to the SPARQL 1.1 grouping rule: when it
/// aggregates or groups, every non-aggregated projected variable joins the
/// GROUP BY keys. Projected variables come first (in projection order),
/// followed by the original keys. Idempotent; no other change.
pub fn complete_group_by(q: &SparqlQuery) -> SparqlQuery {
    let mut out = q.clone();
    if !q.has_aggregate() && q.group_by.is_empty() {
        return out;
    }
    let mut keys: Vec<String> = Vec::new();
    for p in &q.projections {
        match p {
            Projected::Var(v) => keys.push(v.clone()),
            Projected::Expr(e, _) if !e.has_aggregate() => e.free_vars(&mut keys),
            Projected::Expr(..) => {}
        }
    }
    keys.extend(q.group_by.iter().cloned());
    let mut seen = std::collections::HashSet::new();
    keys.retain(|k| seen.insert(k.clone()));
    out.group_by = keys;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparql::model::{Aggregate, SExpr};
    use crate::sql::AggFunc;

    fn count_star() -> SExpr {
        SExpr::Aggregate(Aggregate {
            func: AggFunc::Count,
            arg: None,
        })
    }

    #[test]
    fn projected_variable_joins_group_keys() {
        let q = SparqlQuery {
            projections: vec![
                Projected::Var("city".into()),
                Projected::Expr(count_star(), "agg".into()),
            ],
            group_by: vec!["sourceairport".into()],
            ..SparqlQuery::default()
        };
        let done = complete_group_by(&q);
        assert_eq!(done.group_by, vec!["city", "sourceairport"]);
        assert_eq!(complete_group_by(&done), done);
    }

    #[test]
    fn vacuous_cases() {
        let plain = SparqlQuery {
            projections: vec![Projected::Var("x".into())],
            ..SparqlQuery::default()
        };
        assert_eq!(complete_group_by(&plain), plain);
        let all_aggregate = SparqlQuery {
            projections: vec![Projected::Expr(count_star(), "agg".into())],
            ..SparqlQuery::default()
        };
        assert!(complete_group_by(&all_aggregate).group_by.is_empty());
    }
}
