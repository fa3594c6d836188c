use super::tree::*;
use crate::schema::RelationalSchema;
use crate::sql::AggFunc;

/// Grammar and schema conformance problems of a tree; empty when it is
/// well formed.
pub fn validate_semql(tree: &SemQlTree, schema: &RelationalSchema) -> Vec<String> {
    let mut out = Vec::new();
    let blocks = tree.blocks();
    for (i, r) in blocks.iter().enumerate() {
        validate_block(r, schema, &format!("R{}", i + 1), &mut out);
    }
    if let [a, b] = blocks.as_slice() {
        if a.select.items.len() != b.select.items.len() {
            out.push(format!(
                "{}: branches project {} and {} items",
                tree.set_op_name().unwrap_or("set operation"),
                a.select.items.len(),
                b.select.items.len()
            ));
        }
    }
    out
}

fn validate_block(r: &RBlock, schema: &RelationalSchema, path: &str, out: &mut Vec<String>) {
    let n = r.select.items.len();
    if n == 0 || n > MAX_PROJECTIONS {
        out.push(format!("{path}/select: {n} items, expected 1 to {MAX_PROJECTIONS}"));
    }
    if r.tables.is_empty() {
        out.push(format!("{path}: no tables"));
    }
    for (slot, t) in r.tables.iter().enumerate() {
        if schema.table(t).is_none() {
            out.push(format!("{path}/tables[{slot}]: unknown table '{t}'"));
        }
    }
    for (i, a) in r.select.items.iter().enumerate() {
        validate_a(a, r, schema, &format!("{path}/select[{i}]"), out);
    }
    if let Some(f) = &r.filter {
        validate_filter(f, r, schema, &format!("{path}/filter"), out);
    }
    if let Some(o) = &r.order {
        validate_a(o.expr(), r, schema, &format!("{path}/order"), out);
    }
    for (i, c) in r.group_by.iter().enumerate() {
        validate_col(c, r, schema, false, &format!("{path}/group_by[{i}]"), out);
    }
    validate_join_path(r, schema, path, out);
}

fn validate_join_path(r: &RBlock, schema: &RelationalSchema, path: &str, out: &mut Vec<String>) {
    let mut parent: Vec<usize> = (0..r.tables.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while p[root] != root {
            root = p[root];
        }
        root
    }
    for (i, e) in r.join_path.iter().enumerate() {
        let (Some(from), Some(to)) = (r.tables.get(e.from_slot), r.tables.get(e.to_slot)) else {
            out.push(format!("{path}/join_path[{i}]: slot out of range"));
            continue;
        };
        let declared = schema
            .table(from)
            .and_then(|t| t.foreign_key(&e.column))
            .is_some_and(|fk| fk.ref_table == *to && fk.ref_column == e.ref_column);
        if !declared {
            out.push(format!(
                "{path}/join_path[{i}]: {from}.{} -> {to}.{} is not a declared foreign key",
                e.column, e.ref_column
            ));
        }
        let (a, b) = (find(&mut parent, e.from_slot), find(&mut parent, e.to_slot));
        parent[a] = b;
    }
    for slot in 1..r.tables.len() {
        if find(&mut parent, slot) != find(&mut parent, 0) {
            out.push(format!(
                "{path}/join_path: table '{}' in slot {slot} is not connected",
                r.tables[slot]
            ));
        }
    }
}

fn validate_col(
    c: &ColRef,
    r: &RBlock,
    schema: &RelationalSchema,
    star_ok: bool,
    path: &str,
    out: &mut Vec<String>,
) {
    match r.tables.get(c.slot) {
        None => out.push(format!("{path}: slot {} out of range", c.slot)),
        Some(t) if *t != c.table => out.push(format!(
            "{path}: slot {} holds '{t}', not '{}'",
            c.slot, c.table
        )),
        _ => {}
    }
    let Some(table) = schema.table(&c.table) else {
        out.push(format!("{path}: unknown table '{}'", c.table));
        return;
    };
    match &c.column {
        None if !star_ok => out.push(format!("{path}: '*' outside count")),
        Some(name) if table.column(name).is_none() => {
            out.push(format!("{path}: unknown column '{}.{name}'", c.table))
        }
        _ => {}
    }
}

fn validate_a(a: &AExpr, r: &RBlock, schema: &RelationalSchema, path: &str, out: &mut Vec<String>) {
    let star_ok = matches!(a, AExpr::Agg(AggFunc::Count, Op::Ref(_)));
    match a.op() {
        Op::Ref(c) => validate_col(c, r, schema, star_ok, path, out),
        Op::Arith(_, x, y) => {
            for c in [x, y] {
                validate_col(c, r, schema, false, path, out);
                let numeric = c
                    .column
                    .as_ref()
                    .and_then(|name| schema.column_type(&c.table, name))
                    .is_some_and(|t| t.is_numeric());
                if !numeric {
                    out.push(format!("{path}: arithmetic over a non-numeric column"));
                }
            }
        }
    }
}

fn validate_filter(f: &Filter, r: &RBlock, schema: &RelationalSchema, path: &str, out: &mut Vec<String>) {
    let nested = |q: &RBlock, width: usize, label: &str, out: &mut Vec<String>| {
        let p = format!("{path}/{label}");
        validate_block(q, schema, &p, out);
        if q.select.items.len() != width {
            out.push(format!(
                "{p}: subquery projects {} items, expected {width}",
                q.select.items.len()
            ));
        }
    };
    match f {
        Filter::And(a, b) | Filter::Or(a, b) => {
            validate_filter(a, r, schema, &format!("{path}/0"), out);
            validate_filter(b, r, schema, &format!("{path}/1"), out);
        }
        Filter::Cmp(_, a, operand) => {
            validate_a(a, r, schema, path, out);
            if let Operand::Query(q) = operand {
                nested(q, 1, "cmp", out);
            }
        }
        Filter::Between(a, bounds) => {
            validate_a(a, r, schema, path, out);
            if bounds.len() != 2 {
                out.push(format!("{path}/between: {} bounds, expected 2", bounds.len()));
            }
        }
        Filter::BetweenQuery(a, q) => {
            validate_a(a, r, schema, path, out);
            nested(q, 2, "between", out);
        }
        Filter::In(a, q) => {
            validate_a(a, r, schema, path, out);
            nested(q, 1, "in", out);
        }
        Filter::NotIn(a, q) => {
            validate_a(a, r, schema, path, out);
            nested(q, 1, "not_in", out);
        }
        Filter::Like(a, _) => validate_a(a, r, schema, path, out),
    }
}
