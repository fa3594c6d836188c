//! Typed cell values shared by the relational side, the graph side and both
//! reference engines.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Relative tolerance used whenever two real numbers are compared for
/// equality (engine predicates and result-set comparison alike).
pub const REAL_TOLERANCE: f64 = 1e-9;

/// Column datatype. The widening lattice is `integer < real < text`;
/// `boolean` sits outside of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    Integer,
    Real,
    Text,
    Boolean,
}

impl Datatype {
    pub fn is_numeric(self) -> bool {
        matches!(self, Datatype::Integer | Datatype::Real)
    }

    /// Parses a datatype name as found in schema documents. A handful of
    /// common SQL spellings are accepted.
    pub fn from_name(name: &str) -> Option<Datatype> {
        match name.trim().to_ascii_lowercase().as_str() {
            "integer" | "int" | "bigint" | "smallint" => Some(Datatype::Integer),
            "real" | "float" | "double" | "decimal" | "numeric" | "number" => Some(Datatype::Real),
            "text" | "string" | "varchar" | "char" => Some(Datatype::Text),
            "boolean" | "bool" => Some(Datatype::Boolean),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Datatype::Integer => "integer",
            Datatype::Real => "real",
            Datatype::Text => "text",
            Datatype::Boolean => "boolean",
        }
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Null,
    Integer(i64),
    Real(f64),
    Text(String),
    Boolean(bool),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn datatype(&self) -> Option<Datatype> {
        match self {
            Value::Null => None,
            Value::Integer(_) => Some(Datatype::Integer),
            Value::Real(_) => Some(Datatype::Real),
            Value::Text(_) => Some(Datatype::Text),
            Value::Boolean(_) => Some(Datatype::Boolean),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Integer(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    /// Parses a cell according to the declared datatype. The empty string is
    /// null; everything else must parse strictly.
    pub fn parse_as(raw: &str, datatype: Datatype) -> Option<Value> {
        if raw.is_empty() {
            return Some(Value::Null);
        }
        match datatype {
            Datatype::Integer => raw.parse::<i64>().ok().map(Value::Integer),
            Datatype::Real => raw
                .parse::<f64>()
                .ok()
                .filter(|r| r.is_finite())
                .map(Value::Real),
            Datatype::Text => Some(Value::Text(raw.to_string())),
            Datatype::Boolean => match raw.to_ascii_lowercase().as_str() {
                "true" | "t" | "1" => Some(Value::Boolean(true)),
                "false" | "f" | "0" => Some(Value::Boolean(false)),
                _ => None,
            },
        }
    }

    /// Text form used in data files and result-set files; null is empty.
    pub fn to_field(&self) -> String {
        match self {
            Value::Null => String::new(),
            Value::Integer(i) => i.to_string(),
            Value::Real(r) => format_real(*r),
            Value::Text(s) => s.clone(),
            Value::Boolean(b) => b.to_string(),
        }
    }

    /// Converts the value into `target`, if that is lossless in spirit
    /// (integers become reals, numeric-looking text becomes numbers).
    pub fn coerce_to(&self, target: Datatype) -> Option<Value> {
        match (self, target) {
            (Value::Null, _) => Some(Value::Null),
            (Value::Integer(_), Datatype::Integer)
            | (Value::Real(_), Datatype::Real)
            | (Value::Text(_), Datatype::Text)
            | (Value::Boolean(_), Datatype::Boolean) => Some(self.clone()),
            (Value::Integer(i), Datatype::Real) => Some(Value::Real(*i as f64)),
            // A real compared against an integer column stays a real.
            (Value::Real(_), Datatype::Integer) => Some(self.clone()),
            (Value::Integer(i), Datatype::Boolean) if *i == 0 || *i == 1 => {
                Some(Value::Boolean(*i == 1))
            }
            (Value::Text(s), Datatype::Integer | Datatype::Real | Datatype::Boolean) => {
                Value::parse_as(s, target).filter(|v| !v.is_null())
            }
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("NULL"),
            other => f.write_str(&other.to_field()),
        }
    }
}

/// Formats a real so that it always reads back as a real (never as an
/// integer) and never uses exponent notation.
pub fn format_real(r: f64) -> String {
    let s = format!("{r}");
    if s.contains('.') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

/// Equality of two reals under [`REAL_TOLERANCE`].
pub fn reals_equal(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= REAL_TOLERANCE * scale
}

/// Equality of two non-null values. Integers and reals compare numerically;
/// values of unrelated types are never equal.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Integer(x), Value::Integer(y)) => x == y,
        (Value::Text(x), Value::Text(y)) => x == y,
        (Value::Boolean(x), Value::Boolean(y)) => x == y,
        (Value::Null, Value::Null) => true,
        _ => match (a.as_f64(), b.as_f64()) {
            (Some(x), Some(y)) => reals_equal(x, y),
            _ => false,
        },
    }
}

/// Ordering between two comparable non-null values; `None` when the types
/// cannot be ordered against each other.
pub fn compare_values(a: &Value, b: &Value) -> Option<Ordering> {
    match (a, b) {
        (Value::Integer(x), Value::Integer(y)) => Some(x.cmp(y)),
        (Value::Text(x), Value::Text(y)) => Some(x.cmp(y)),
        (Value::Boolean(x), Value::Boolean(y)) => Some(x.cmp(y)),
        _ => match (a.as_f64(), b.as_f64()) {
            (Some(x), Some(y)) => {
                if reals_equal(x, y) {
                    Some(Ordering::Equal)
                } else {
                    x.partial_cmp(&y)
                }
            }
            _ => None,
        },
    }
}

/// Total order used for sorting result rows: nulls first, then booleans,
/// numbers, and text.
pub fn sort_order(a: &Value, b: &Value) -> Ordering {
    fn rank(v: &Value) -> u8 {
        match v {
            Value::Null => 0,
            Value::Boolean(_) => 1,
            Value::Integer(_) | Value::Real(_) => 2,
            Value::Text(_) => 3,
        }
    }
    match rank(a).cmp(&rank(b)) {
        Ordering::Equal => match (a, b) {
            (Value::Null, Value::Null) => Ordering::Equal,
            (Value::Integer(x), Value::Integer(y)) => x.cmp(y),
            (Value::Text(x), Value::Text(y)) => x.cmp(y),
            (Value::Boolean(x), Value::Boolean(y)) => x.cmp(y),
            _ => {
                let x = a.as_f64().unwrap_or(0.0);
                let y = b.as_f64().unwrap_or(0.0);
                x.total_cmp(&y)
            }
        },
        other => other,
    }
}

/// Lexicographic [`sort_order`] over rows.
pub fn row_order(a: &[Value], b: &[Value]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match sort_order(x, y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Hashable key identifying a value up to SQL equality: integers and reals
/// with the same numeric value collapse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SqlKey {
    Null,
    Number(u64),
    Text(String),
    Boolean(bool),
}

impl SqlKey {
    pub fn of(v: &Value) -> SqlKey {
        match v {
            Value::Null => SqlKey::Null,
            Value::Integer(i) => SqlKey::Number(normalize_bits(*i as f64)),
            Value::Real(r) => SqlKey::Number(normalize_bits(*r)),
            Value::Text(s) => SqlKey::Text(s.clone()),
            Value::Boolean(b) => SqlKey::Boolean(*b),
        }
    }
}

fn normalize_bits(r: f64) -> u64 {
    if r == 0.0 {
        0.0f64.to_bits()
    } else {
        r.to_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_cells() {
        assert_eq!(Value::parse_as("", Datatype::Integer), Some(Value::Null));
        assert_eq!(Value::parse_as("42", Datatype::Integer), Some(Value::Integer(42)));
        assert_eq!(Value::parse_as("abc", Datatype::Integer), None);
        assert_eq!(Value::parse_as("2.5", Datatype::Real), Some(Value::Real(2.5)));
        assert_eq!(Value::parse_as("inf", Datatype::Real), None);
        assert_eq!(Value::parse_as("T", Datatype::Boolean), Some(Value::Boolean(true)));
        assert_eq!(
            Value::parse_as(" x ", Datatype::Text),
            Some(Value::Text(" x ".into()))
        );
    }

    #[test]
    fn real_formatting_reads_back_as_real() {
        assert_eq!(format_real(3.0), "3.0");
        assert_eq!(format_real(2.5), "2.5");
        assert_eq!(format_real(-0.5), "-0.5");
        assert_eq!(format_real(1e21), "1000000000000000000000.0");
    }

    #[test]
    fn tolerant_equality() {
        assert!(values_equal(&Value::Real(2.0000000001), &Value::Integer(2)));
        assert!(!values_equal(&Value::Real(2.001), &Value::Integer(2)));
        assert!(!values_equal(&Value::Text("2".into()), &Value::Integer(2)));
        assert_eq!(SqlKey::of(&Value::Integer(2)), SqlKey::of(&Value::Real(2.0)));
    }

    #[test]
    fn coercion() {
        assert_eq!(
            Value::Text("5".into()).coerce_to(Datatype::Integer),
            Some(Value::Integer(5))
        );
        assert_eq!(Value::Integer(5).coerce_to(Datatype::Text), None);
        assert_eq!(Value::Integer(5).coerce_to(Datatype::Real), Some(Value::Real(5.0)));
        assert_eq!(Value::Integer(1).coerce_to(Datatype::Boolean), Some(Value::Boolean(true)));
    }
}
