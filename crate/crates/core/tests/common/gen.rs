//! Seeded generators for schemas, instances and dialect queries.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value as Json};

use rdbridge_core::schema::{parse_schema, repair_schema, RelationalInstance, RelationalSchema, Row, Table, TableRows};
use rdbridge_core::value::{Datatype, Value};

#[derive(Debug, Clone, Copy)]
pub struct SchemaOptions {
    pub max_tables: usize,
    /// Nullable data columns.
    pub nulls: bool,
    /// Text and composite primary keys besides the integer `id`.
    pub varied_keys: bool,
}

const TYPES: [Datatype; 4] = [Datatype::Integer, Datatype::Real, Datatype::Text, Datatype::Boolean];
const REALS: [f64; 7] = [0.5, 1.5, 2.25, 3.0, 4.75, -1.5, 10.0];
const TEXTS: [&str; 7] = ["alpha", "beta", "gamma", "delta", "Alpha", "be ta", "épsilon"];
/// Key spellings that need percent-encoding in subject IRIs.
const ODD_KEYS: [&str; 8] = ["a b", "x/y", "100%", "dot.ted", "ünï", "#hash", "q?=&", "plain"];

fn type_name(dt: Datatype) -> &'static str {
    match dt {
        Datatype::Integer => "integer",
        Datatype::Real => "real",
        Datatype::Text => "text",
        Datatype::Boolean => "boolean",
    }
}

/// A repaired schema of tables `r0, r1, ...`. Foreign keys `ref_r{j}` only
/// point at earlier tables with a single-column key.
pub fn random_schema(rng: &mut StdRng, opts: SchemaOptions) -> RelationalSchema {
    let n = rng.gen_range(1..=opts.max_tables.max(1));
    let mut tables: Vec<Json> = Vec::new();
    // (table name, key column, key type) of single-key tables
    let mut keyed: Vec<(String, String, Datatype)> = Vec::new();
    for i in 0..n {
        let name = format!("r{i}");
        let mut columns = Vec::new();
        let mut fks = Vec::new();
        let key_kind = if opts.varied_keys { rng.gen_range(0..4) } else { 0 };
        let primary_key: Vec<String> = match key_kind {
            1 => {
                columns.push(json!({"name": "code", "type": "text", "nullable": false}));
                vec!["code".into()]
            }
            2 => {
                columns.push(json!({"name": "k1", "type": "integer", "nullable": false}));
                columns.push(json!({"name": "k2", "type": "text", "nullable": false}));
                vec!["k1".into(), "k2".into()]
            }
            _ => {
                columns.push(json!({"name": "id", "type": "integer", "nullable": false}));
                vec!["id".into()]
            }
        };
        for (target, key, dt) in &keyed {
            if rng.gen_bool(0.6) {
                let column = format!("ref_{target}");
                columns.push(json!({"name": column, "type": type_name(*dt), "nullable": opts.nulls}));
                fks.push(json!({"column": column, "ref_table": target, "ref_column": key}));
            }
        }
        for k in 0..rng.gen_range(1..=4) {
            let dt = *TYPES.choose(rng).unwrap();
            columns.push(json!({"name": format!("c{k}"), "type": type_name(dt), "nullable": opts.nulls}));
        }
        if primary_key.len() == 1 {
            let dt = if primary_key[0] == "code" { Datatype::Text } else { Datatype::Integer };
            keyed.push((name.clone(), primary_key[0].clone(), dt));
        }
        tables.push(json!({"name": name, "columns": columns, "primary_key": primary_key, "foreign_keys": fks}));
    }
    let doc = json!({"db_id": "random", "tables": tables});
    let schema = parse_schema(&doc.to_string()).expect("generated schema parses");
    repair_schema(&schema, None).expect("generated schema repairs").0
}

pub fn random_value(rng: &mut StdRng, dt: Datatype) -> Value {
    match dt {
        Datatype::Integer => Value::Integer(rng.gen_range(1..=9)),
        Datatype::Real => Value::Real(*REALS.choose(rng).unwrap()),
        Datatype::Text => Value::Text(TEXTS.choose(rng).unwrap().to_string()),
        Datatype::Boolean => Value::Boolean(rng.gen_bool(0.5)),
    }
}

/// Rows for every table, at most `max_rows` each. Foreign-key cells mostly
/// hit an existing row; some dangle. Nullable cells are null one time in
/// ten.
pub fn random_instance(rng: &mut StdRng, schema: &RelationalSchema, max_rows: usize) -> RelationalInstance {
    let mut tables: Vec<TableRows> = Vec::new();
    for table in &schema.tables {
        let n = rng.gen_range(0..=max_rows);
        let mut rows: Vec<Row> = Vec::with_capacity(n);
        for r in 0..n {
            let mut row = Vec::with_capacity(table.columns.len());
            for column in &table.columns {
                let in_key = table.primary_key.contains(&column.name);
                let fk = table.foreign_key(&column.name);
                let value = if in_key {
                    match column.datatype {
                        Datatype::Text => Value::Text(format!("{}{r}", ODD_KEYS[r % ODD_KEYS.len()])),
                        _ => Value::Integer(r as i64 + 1),
                    }
                } else if column.nullable && rng.gen_bool(0.1) {
                    Value::Null
                } else if let Some(fk) = fk {
                    let target = schema.table(&fk.ref_table).expect("fk target exists");
                    let idx = target.column_index(&fk.ref_column).expect("fk column exists");
                    let pool: Vec<&Value> = tables
                        .iter()
                        .find(|t| t.table == target.name)
                        .map(|t| t.rows.iter().map(|row| &row[idx]).collect())
                        .unwrap_or_default();
                    match pool.choose(rng) {
                        Some(v) if rng.gen_bool(0.85) => (*v).clone(),
                        _ => match column.datatype {
                            Datatype::Text => Value::Text("missing".into()),
                            _ => Value::Integer(1000 + rng.gen_range(0..3)),
                        },
                    }
                } else {
                    random_value(rng, column.datatype)
                };
                row.push(value);
            }
            rows.push(row);
        }
        tables.push(TableRows {
            table: table.name.clone(),
            rows,
        });
    }
    RelationalInstance { tables }
}

#[derive(Debug, Clone)]
struct Slot {
    alias: String,
    table: Table,
}

#[derive(Debug, Clone)]
struct Col {
    text: String,
    dt: Datatype,
    slot: usize,
    name: String,
}

fn is_numeric(dt: Datatype) -> bool {
    matches!(dt, Datatype::Integer | Datatype::Real)
}

/// Random SELECT queries within the supported dialect over a schema from
/// [`random_schema`] (integer `id` keys).
pub struct QueryGen<'a> {
    rng: &'a mut StdRng,
    schema: &'a RelationalSchema,
}

impl<'a> QueryGen<'a> {
    pub fn new(rng: &'a mut StdRng, schema: &'a RelationalSchema) -> QueryGen<'a> {
        QueryGen { rng, schema }
    }

    pub fn query(&mut self) -> String {
        match self.rng.gen_range(0..10) {
            0 | 1 => self.set_operation(),
            2 => self.aggregate_only(),
            3..=5 => self.grouped(),
            _ => self.plain(),
        }
    }

    fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items.choose(self.rng).expect("non-empty choice").clone()
    }

    fn literal(&mut self, dt: Datatype) -> String {
        match random_value(self.rng, dt) {
            Value::Integer(i) => i.to_string(),
            Value::Real(r) => format!("{r:?}"),
            Value::Text(s) => format!("'{s}'"),
            Value::Boolean(b) => b.to_string(),
            Value::Null => unreachable!("generator never yields null"),
        }
    }

    /// FROM clause over 1..=max connected tables.
    fn from(&mut self, max: usize) -> (String, Vec<Slot>, Vec<(usize, String, usize)>) {
        let first = self.pick(&self.schema.tables);
        let extra = self.rng.gen_range(0..max);
        let aliased = extra > 0 || self.rng.gen_bool(0.5);
        let alias = |i: usize| if aliased { format!("T{}", i + 1) } else { String::new() };
        let mut slots = vec![Slot {
            alias: alias(0),
            table: first,
        }];
        let mut text = if aliased {
            format!("{} AS T1", slots[0].table.name)
        } else {
            slots[0].table.name.clone()
        };
        // (fk slot, fk column, referenced slot)
        let mut edges = Vec::new();
        for _ in 0..extra {
            // (existing slot, new table, true when the existing slot holds the fk, fk column)
            let mut candidates: Vec<(usize, Table, bool, String)> = Vec::new();
            for (i, s) in slots.iter().enumerate() {
                for fk in &s.table.foreign_keys {
                    let t = self.schema.table(&fk.ref_table).unwrap().clone();
                    candidates.push((i, t, true, fk.column.clone()));
                }
                for t in &self.schema.tables {
                    for fk in &t.foreign_keys {
                        if fk.ref_table == s.table.name {
                            candidates.push((i, t.clone(), false, fk.column.clone()));
                        }
                    }
                }
            }
            let Some((i, table, holder, column)) = candidates.choose(self.rng).cloned() else {
                break;
            };
            let new = slots.len();
            let a = alias(new);
            let on = if holder {
                edges.push((i, column.clone(), new));
                format!("{}.{column} = {a}.{}", slots[i].alias, table.primary_key[0])
            } else {
                edges.push((new, column.clone(), i));
                format!("{a}.{column} = {}.{}", slots[i].alias, slots[i].table.primary_key[0])
            };
            // A sole foreign key may be left for the resolver to infer.
            let links: usize = slots
                .iter()
                .map(|s| {
                    let to = s.table.foreign_keys.iter().filter(|fk| fk.ref_table == table.name).count();
                    let from = table.foreign_keys.iter().filter(|fk| fk.ref_table == s.table.name).count();
                    to + from
                })
                .sum();
            if links == 1 && self.rng.gen_bool(0.3) {
                text.push_str(&format!(" JOIN {} AS {a}", table.name));
            } else {
                text.push_str(&format!(" JOIN {} AS {a} ON {on}", table.name));
            }
            slots.push(Slot { alias: a, table });
        }
        (text, slots, edges)
    }

    fn columns(slots: &[Slot]) -> Vec<Col> {
        let mut out = Vec::new();
        for (i, s) in slots.iter().enumerate() {
            for c in &s.table.columns {
                let text = if s.alias.is_empty() {
                    c.name.clone()
                } else {
                    format!("{}.{}", s.alias, c.name)
                };
                out.push(Col {
                    text,
                    dt: c.datatype,
                    slot: i,
                    name: c.name.clone(),
                });
            }
        }
        out
    }

    fn of_type(cols: &[Col], f: impl Fn(Datatype) -> bool) -> Vec<Col> {
        cols.iter().filter(|c| f(c.dt)).cloned().collect()
    }

    fn cmp_op(&mut self, dt: Datatype) -> &'static str {
        if dt == Datatype::Boolean {
            return self.pick(&["=", "!="]);
        }
        self.pick(&["=", "!=", "<>", "<", "<=", ">", ">="])
    }

    fn arith(&mut self, cols: &[Col]) -> Option<(String, Datatype)> {
        let nums = Self::of_type(cols, is_numeric);
        if nums.is_empty() {
            return None;
        }
        let a = self.pick(&nums);
        let b = self.pick(&nums);
        let op = self.pick(&["+", "-", "*", "/"]);
        let dt = if a.dt == Datatype::Integer && b.dt == Datatype::Integer {
            Datatype::Integer
        } else {
            Datatype::Real
        };
        Some((format!("{} {op} {}", a.text, b.text), dt))
    }

    /// A single-column subquery projecting a value of type `dt`.
    fn member_subquery(&mut self, dt: Datatype) -> Option<String> {
        let tables: Vec<Table> = self
            .schema
            .tables
            .iter()
            .filter(|t| t.columns.iter().any(|c| c.datatype == dt))
            .cloned()
            .collect();
        let table = tables.choose(self.rng)?.clone();
        let slots = vec![Slot {
            alias: String::new(),
            table: table.clone(),
        }];
        let cols = Self::columns(&slots);
        let col = self.pick(&Self::of_type(&cols, |d| d == dt));
        let mut sql = format!("SELECT {} FROM {}", col.text, table.name);
        if self.rng.gen_bool(0.5) {
            let p = self.atom(&cols, 1);
            sql.push_str(&format!(" WHERE {p}"));
        }
        Some(sql)
    }

    /// A subquery returning one aggregate value comparable with `dt`.
    fn scalar_subquery(&mut self, dt: Datatype) -> Option<String> {
        let table = self.pick(&self.schema.tables);
        let slots = vec![Slot {
            alias: String::new(),
            table: table.clone(),
        }];
        let cols = Self::columns(&slots);
        let agg = if is_numeric(dt) {
            let nums = Self::of_type(&cols, is_numeric);
            match (nums.choose(self.rng).cloned(), self.rng.gen_range(0..5)) {
                (Some(c), 0) => format!("avg({})", c.text),
                (Some(c), 1) => format!("sum({})", c.text),
                (Some(c), 2) => format!("min({})", c.text),
                (Some(c), 3) => format!("max({})", c.text),
                _ => "count(*)".to_string(),
            }
        } else if dt == Datatype::Text {
            let texts = Self::of_type(&cols, |d| d == Datatype::Text);
            let c = texts.choose(self.rng)?.clone();
            format!("{}({})", self.pick(&["min", "max"]), c.text)
        } else {
            return None;
        };
        let mut sql = format!("SELECT {agg} FROM {}", table.name);
        if self.rng.gen_bool(0.4) {
            let p = self.atom(&cols, 1);
            sql.push_str(&format!(" WHERE {p}"));
        }
        Some(sql)
    }

    /// One non-aggregate predicate.
    fn atom(&mut self, cols: &[Col], depth: usize) -> String {
        let col = self.pick(cols);
        let kind = self.rng.gen_range(0..12);
        let nested = depth == 0;
        match kind {
            0 if col.dt != Datatype::Boolean => {
                let (lo, hi) = (self.literal(col.dt), self.literal(col.dt));
                format!("{} BETWEEN {lo} AND {hi}", col.text)
            }
            1 => {
                let texts = Self::of_type(cols, |d| d == Datatype::Text);
                if let Some(t) = texts.choose(self.rng) {
                    let pattern = self.pick(&["a%", "%a", "_e%", "%ta", "Al%", "%"]);
                    return format!("{} LIKE '{pattern}'", t.text);
                }
                self.simple_cmp(&col)
            }
            2 => match self.arith(cols) {
                Some((e, dt)) => {
                    let op = self.cmp_op(dt);
                    let lit = self.literal(dt);
                    format!("{e} {op} {lit}")
                }
                None => self.simple_cmp(&col),
            },
            3 | 4 if nested => match self.member_subquery(col.dt) {
                Some(sub) => {
                    let not = if kind == 4 { "NOT " } else { "" };
                    format!("{} {not}IN ({sub})", col.text)
                }
                None => self.simple_cmp(&col),
            },
            5 if nested => match self.scalar_subquery(col.dt) {
                Some(sub) => {
                    let op = self.cmp_op(col.dt);
                    format!("{} {op} ({sub})", col.text)
                }
                None => self.simple_cmp(&col),
            },
            6 => {
                let (a, b) = (self.literal(col.dt), self.literal(col.dt));
                format!("{} IN ({a}, {b})", col.text)
            }
            _ => self.simple_cmp(&col),
        }
    }

    fn simple_cmp(&mut self, col: &Col) -> String {
        let op = self.cmp_op(col.dt);
        let lit = self.literal(col.dt);
        if self.rng.gen_bool(0.1) {
            let flipped = match op {
                "<" => ">",
                "<=" => ">=",
                ">" => "<",
                ">=" => "<=",
                other => other,
            };
            return format!("{lit} {flipped} {}", col.text);
        }
        format!("{} {op} {lit}", col.text)
    }

    fn where_clause(&mut self, cols: &[Col]) -> String {
        match self.rng.gen_range(0..6) {
            0 => String::new(),
            1..=3 => format!(" WHERE {}", self.atom(cols, 0)),
            4 => format!(" WHERE {} AND {}", self.atom(cols, 0), self.atom(cols, 0)),
            _ => format!(" WHERE {} OR {}", self.atom(cols, 0), self.atom(cols, 0)),
        }
    }

    fn aggregate(&mut self, cols: &[Col]) -> (String, Datatype) {
        let c = self.pick(cols);
        match self.rng.gen_range(0..6) {
            0 => ("count(*)".into(), Datatype::Integer),
            1 => (format!("count({})", c.text), Datatype::Integer),
            2 if is_numeric(c.dt) => (format!("sum({})", c.text), c.dt),
            3 if is_numeric(c.dt) => (format!("avg({})", c.text), Datatype::Real),
            4 if c.dt != Datatype::Boolean => (format!("min({})", c.text), c.dt),
            5 if c.dt != Datatype::Boolean => (format!("max({})", c.text), c.dt),
            _ => ("count(*)".into(), Datatype::Integer),
        }
    }

    fn order_limit(&mut self, key: &str) -> String {
        let dir = self.pick(&["", " ASC", " DESC"]);
        let limit = if self.rng.gen_bool(0.5) {
            format!(" LIMIT {}", self.rng.gen_range(1..=4))
        } else {
            String::new()
        };
        format!(" ORDER BY {key}{dir}{limit}")
    }

    fn plain(&mut self) -> String {
        let (from, slots, _) = self.from(3);
        let cols = Self::columns(&slots);
        let mut items = Vec::new();
        let wide = self.rng.gen_bool(0.1);
        let count = if wide { 6 } else { self.rng.gen_range(1..=3) };
        for _ in 0..count {
            match self.arith(&cols) {
                Some((e, _)) if self.rng.gen_bool(0.15) => items.push(e),
                _ => {
                    let c = self.pick(&cols);
                    items.push(c.text);
                }
            }
        }
        let distinct = if self.rng.gen_bool(0.3) { "DISTINCT " } else { "" };
        let mut sql = format!("SELECT {distinct}{} FROM {from}", items.join(", "));
        sql.push_str(&self.where_clause(&cols));
        if self.rng.gen_bool(0.4) {
            let key = if self.rng.gen_bool(0.5) {
                self.pick(&items)
            } else {
                self.pick(&cols).text
            };
            sql.push_str(&self.order_limit(&key));
        }
        sql
    }

    fn aggregate_only(&mut self) -> String {
        let (from, slots, _) = self.from(2);
        let cols = Self::columns(&slots);
        let items: Vec<String> = (0..self.rng.gen_range(1..=3)).map(|_| self.aggregate(&cols).0).collect();
        let mut sql = format!("SELECT {} FROM {from}", items.join(", "));
        sql.push_str(&self.where_clause(&cols));
        sql
    }

    fn grouped(&mut self) -> String {
        let (from, slots, edges) = self.from(3);
        let cols = Self::columns(&slots);
        let mut plain: Vec<String> = Vec::new();
        let group_by: Vec<String>;
        if self.rng.gen_bool(0.5) {
            // Group by a key of one slot and show other columns of it.
            let s = self.rng.gen_range(0..slots.len());
            let key_col = cols
                .iter()
                .find(|c| c.slot == s && slots[s].table.primary_key == [c.name.clone()])
                .unwrap()
                .clone();
            let mut key = key_col.text.clone();
            // A foreign key joined to that key determines it just as well.
            let holders: Vec<&(usize, String, usize)> = edges.iter().filter(|e| e.2 == s).collect();
            if let Some((fs, fc, _)) = holders.choose(self.rng).copied() {
                if self.rng.gen_bool(0.5) {
                    key = cols.iter().find(|c| c.slot == *fs && c.name == *fc).unwrap().text.clone();
                }
            }
            let own: Vec<Col> = cols.iter().filter(|c| c.slot == s).cloned().collect();
            for _ in 0..self.rng.gen_range(0..=2) {
                plain.push(self.pick(&own).text);
            }
            group_by = vec![key];
        } else {
            let mut keys = Vec::new();
            for _ in 0..self.rng.gen_range(1..=2) {
                let c = self.pick(&cols).text;
                if !keys.contains(&c) {
                    keys.push(c);
                }
            }
            for k in &keys {
                if self.rng.gen_bool(0.8) {
                    plain.push(k.clone());
                }
            }
            group_by = keys;
        }
        let mut items = plain.clone();
        let mut aggs = Vec::new();
        for _ in 0..self.rng.gen_range(1..=2) {
            let (a, _) = self.aggregate(&cols);
            aggs.push(a.clone());
            let at = self.rng.gen_range(0..=items.len());
            items.insert(at, a);
        }
        let mut sql = format!("SELECT {} FROM {from}", items.join(", "));
        sql.push_str(&self.where_clause(&cols));
        sql.push_str(&format!(" GROUP BY {}", group_by.join(", ")));
        if self.rng.gen_bool(0.4) {
            let (a, dt) = self.aggregate(&cols);
            let op = self.cmp_op(dt);
            let lit = if a.starts_with("count") {
                self.rng.gen_range(1..=3).to_string()
            } else {
                self.literal(dt)
            };
            sql.push_str(&format!(" HAVING {a} {op} {lit}"));
        }
        if self.rng.gen_bool(0.5) {
            let key = match self.rng.gen_range(0..3) {
                0 if !plain.is_empty() => self.pick(&plain),
                1 => self.aggregate(&cols).0,
                _ => self.pick(&aggs),
            };
            sql.push_str(&self.order_limit(&key));
        }
        sql
    }

    /// A set-operation branch projecting values of `types` (or choosing
    /// them when `None`).
    fn branch(&mut self, types: Option<&[Datatype]>) -> Option<(String, Vec<Datatype>)> {
        let (from, slots, _) = self.from(2);
        let cols = Self::columns(&slots);
        let mut items = Vec::new();
        let mut dts = Vec::new();
        match types {
            None => {
                for _ in 0..self.rng.gen_range(1..=2) {
                    let c = self.pick(&cols);
                    items.push(c.text);
                    dts.push(c.dt);
                }
            }
            Some(types) => {
                for dt in types {
                    let matching = Self::of_type(&cols, |d| d == *dt);
                    let c = matching.choose(self.rng)?.clone();
                    items.push(c.text);
                    dts.push(c.dt);
                }
            }
        }
        let mut sql = format!("SELECT {} FROM {from}", items.join(", "));
        sql.push_str(&self.where_clause(&cols));
        Some((sql, dts))
    }

    fn set_operation(&mut self) -> String {
        let op = self.pick(&["UNION", "INTERSECT", "EXCEPT"]);
        let (left, types) = self.branch(None).expect("free branch");
        for _ in 0..8 {
            if let Some((right, _)) = self.branch(Some(&types)) {
                return format!("{left} {op} {right}");
            }
        }
        format!("{left} {op} {left}")
    }
}
