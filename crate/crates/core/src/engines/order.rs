//! Result finalization shared by both engines: ordering with a
//! deterministic tie-break, duplicate removal and truncation.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::sql::Direction;
use crate::value::{reals_equal, row_order, sort_order, SqlKey, Value};

/// Order of two sort-key values; numbers within the real tolerance tie.
pub fn key_order(a: &Value, b: &Value) -> Ordering {
    if let (Some(x), Some(y)) = (a.as_f64(), b.as_f64()) {
        if reals_equal(x, y) {
            return Ordering::Equal;
        }
    }
    sort_order(a, b)
}

/// A candidate output row with the values of its ORDER BY keys.
pub struct Keyed {
    pub keys: Vec<Value>,
    pub row: Vec<Value>,
}

/// Sorts by the keys (ties broken by the projected row, ascending), then
/// drops duplicate rows keeping the first, then applies the limit. Without
/// keys the incoming order is kept.
pub fn finalize(mut rows: Vec<Keyed>, directions: &[Direction], distinct: bool, limit: Option<u64>) -> Vec<Vec<Value>> {
    if !directions.is_empty() {
        rows.sort_by(|a, b| {
            for ((x, y), dir) in a.keys.iter().zip(&b.keys).zip(directions) {
                let o = key_order(x, y);
                let o = match dir {
                    Direction::Asc => o,
                    Direction::Desc => o.reverse(),
                };
                if o != Ordering::Equal {
                    return o;
                }
            }
            row_order(&a.row, &b.row)
        });
    }
    let mut out: Vec<Vec<Value>> = Vec::with_capacity(rows.len());
    let mut seen = HashSet::new();
    for k in rows {
        if distinct && !seen.insert(row_key(&k.row)) {
            continue;
        }
        out.push(k.row);
    }
    if let Some(n) = limit {
        out.truncate(usize::try_from(n).unwrap_or(usize::MAX));
    }
    out
}

pub fn row_key(row: &[Value]) -> Vec<SqlKey> {
    row.iter().map(SqlKey::of).collect()
}
