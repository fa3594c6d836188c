use super::graph::{Graph, Literal, Term, Triple};

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

pub fn literal_to_ntriples(literal: &Literal) -> String {
    let lexical = escape_literal(&literal.lexical);
    match literal.datatype.iri() {
        None => format!("\"{lexical}\""),
        Some(dt) => format!("\"{lexical}\"^^<{dt}>"),
    }
}

pub fn triple_to_ntriples(triple: &Triple) -> String {
    let object = match &triple.object {
        Term::Iri(iri) => format!("<{iri}>"),
        Term::Literal(l) => literal_to_ntriples(l),
    };
    format!("<{}> <{}> {object} .", triple.subject, triple.predicate)
}

/// N-Triples text with lines sorted bytewise. Every IRI is written in full
/// angle-bracket form; an empty graph gives an empty string.
pub fn serialize_graph(graph: &Graph) -> String {
    let mut lines: Vec<String> = graph.iter().map(triple_to_ntriples).collect();
    lines.sort();
    let mut out = String::new();
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}
