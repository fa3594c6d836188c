use crate::engines::ResultSet;
use crate::value::{row_order, values_equal, Value};

/// Above this size unordered comparison relies on sorting alone.
const MATCHING_LIMIT: usize = 2000;

/// Execution-accuracy equality: same arity, and equal row sequences if
/// either side is ordered, equal row multisets otherwise. Numbers compare
/// under the shared relative tolerance; column names are ignored.
pub fn compare_results(a: &ResultSet, b: &ResultSet) -> bool {
    compare_results_with(a, b, false)
}

/// As [`compare_results`]; `ignore_order` treats both sides as unordered.
pub fn compare_results_with(a: &ResultSet, b: &ResultSet, ignore_order: bool) -> bool {
    if a.arity() != b.arity() || a.rows.len() != b.rows.len() {
        return false;
    }
    if (a.ordered || b.ordered) && !ignore_order {
        return a.rows.iter().zip(&b.rows).all(|(x, y)| rows_equal(x, y));
    }
    let mut x: Vec<&Vec<Value>> = a.rows.iter().collect();
    let mut y: Vec<&Vec<Value>> = b.rows.iter().collect();
    x.sort_by(|p, q| row_order(p, q));
    y.sort_by(|p, q| row_order(p, q));
    if x.iter().zip(&y).all(|(p, q)| rows_equal(p, q)) {
        return true;
    }
    // Values equal only within tolerance can sort apart; fall back to
    // matching rows pairwise.
    if x.len() > MATCHING_LIMIT {
        return false;
    }
    let mut used = vec![false; y.len()];
    'outer: for p in &x {
        for (j, q) in y.iter().enumerate() {
            if !used[j] && rows_equal(p, q) {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn rows_equal(a: &[Value], b: &[Value]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| values_equal(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(rows: Vec<Vec<Value>>, ordered: bool) -> ResultSet {
        let arity = rows.first().map_or(1, Vec::len);
        ResultSet {
            columns: (0..arity).map(|i| format!("c{i}")).collect(),
            rows,
            ordered,
        }
    }

    fn t(s: &str) -> Value {
        Value::Text(s.into())
    }

    #[test]
    fn identity_and_order() {
        let a = rs(vec![vec![Value::Integer(2)]], false);
        assert!(compare_results(&a, &a.clone()));
        let ab = rs(vec![vec![t("a")], vec![t("b")]], false);
        let ba = rs(vec![vec![t("b")], vec![t("a")]], false);
        assert!(compare_results(&ab, &ba));
        let ba_ordered = rs(vec![vec![t("b")], vec![t("a")]], true);
        assert!(!compare_results(&ab, &ba_ordered));
        assert!(compare_results_with(&ab, &ba_ordered, true));
    }

    #[test]
    fn tolerance_and_arity() {
        let a = rs(vec![vec![Value::Real(2.0000000001)]], false);
        let b = rs(vec![vec![Value::Integer(2)]], false);
        assert!(compare_results(&a, &b));
        let wide = rs(vec![vec![Value::Integer(2), Value::Integer(2)]], false);
        assert!(!compare_results(&b, &wide));
    }

    #[test]
    fn multiplicity_matters() {
        let once = rs(vec![vec![t("a")], vec![t("b")]], false);
        let twice = rs(vec![vec![t("a")], vec![t("a")]], false);
        assert!(!compare_results(&once, &twice));
    }
}
