use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use serde::Serialize;

use super::compare::compare_results_with;
use super::profile::{categorize, hardness, profile_query, Category, Hardness};
use crate::engines::{eval_sparql, eval_sql};
use crate::mapping::{Graph, Ontology};
use crate::pipeline::translate;
use crate::schema::{RelationalInstance, RelationalSchema};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusQuery {
    pub id: String,
    pub sql: String,
}

/// Reads a corpus: a directory of `*.sql` files (id = file stem, sorted by
/// name) or a file with one query per non-empty line (ids `q1, q2, ...`;
/// lines starting with `--` are skipped).
pub fn load_corpus(path: &Path) -> std::io::Result<Vec<CorpusQuery>> {
    if path.is_dir() {
        let mut files: Vec<_> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "sql"))
            .collect();
        files.sort();
        return files
            .into_iter()
            .map(|p| {
                Ok(CorpusQuery {
                    id: p.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
                    sql: std::fs::read_to_string(&p)?.trim().to_string(),
                })
            })
            .collect();
    }
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("--"))
        .enumerate()
        .map(|(i, l)| CorpusQuery {
            id: format!("q{}", i + 1),
            sql: l.to_string(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    /// Refused as an unsupported construct.
    Rejected,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryRecord {
    pub id: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub hardness: Option<Hardness>,
    pub categories: Vec<Category>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub total: usize,
    pub correct: usize,
    pub rejected: usize,
    pub failed: usize,
}

impl Tally {
    fn add(&mut self, v: Verdict) {
        self.total += 1;
        match v {
            Verdict::Correct => self.correct += 1,
            Verdict::Rejected => self.rejected += 1,
            Verdict::Failed => self.failed += 1,
        }
    }

    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub total: usize,
    pub correct: usize,
    pub rejected: usize,
    pub failed: usize,
    /// correct / total; 1.0 for an empty corpus.
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub by_hardness: BTreeMap<Hardness, Tally>,
    pub by_category: BTreeMap<Category, Tally>,
    pub records: Vec<QueryRecord>,
}

impl AccuracyReport {
    fn from_records(records: Vec<QueryRecord>) -> AccuracyReport {
        let mut all = Tally::default();
        let mut by_hardness: BTreeMap<Hardness, Tally> = BTreeMap::new();
        let mut by_category: BTreeMap<Category, Tally> = BTreeMap::new();
        for r in &records {
            all.add(r.verdict);
            if let Some(h) = r.hardness {
                by_hardness.entry(h).or_default().add(r.verdict);
            }
            for c in &r.categories {
                by_category.entry(*c).or_default().add(r.verdict);
            }
        }
        assert_eq!(all.total, all.correct + all.rejected + all.failed, "tallies must sum to the total");
        AccuracyReport {
            total: all.total,
            correct: all.correct,
            rejected: all.rejected,
            failed: all.failed,
            accuracy: all.accuracy(),
            note: (all.total == 0).then(|| "empty corpus".to_string()),
            by_hardness,
            by_category,
            records,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text summary table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<14} {:>6} {:>8} {:>9} {:>7} {:>9}", "group", "total", "correct", "rejected", "failed", "accuracy");
        let mut line = |name: &str, t: &Tally| {
            let _ = writeln!(
                out,
                "{:<14} {:>6} {:>8} {:>9} {:>7} {:>9.4}",
                name,
                t.total,
                t.correct,
                t.rejected,
                t.failed,
                t.accuracy()
            );
        };
        line(
            "all",
            &Tally {
                total: self.total,
                correct: self.correct,
                rejected: self.rejected,
                failed: self.failed,
            },
        );
        for (h, t) in &self.by_hardness {
            line(h.name(), t);
        }
        for (c, t) in &self.by_category {
            line(c.name(), t);
        }
        if let Some(n) = &self.note {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

/// Runs every query through translation and both engines and tallies the
/// verdicts. Never fails: problems land in the per-query records.
pub fn execution_accuracy(
    corpus: &[CorpusQuery],
    schema: &RelationalSchema,
    instance: &RelationalInstance,
    graph: &Graph,
    ontology: &Ontology,
) -> AccuracyReport {
    execution_accuracy_with(corpus, schema, instance, graph, ontology, false)
}

/// As [`execution_accuracy`]; `ignore_order` compares every pair of
/// results as unordered.
pub fn execution_accuracy_with(
    corpus: &[CorpusQuery],
    schema: &RelationalSchema,
    instance: &RelationalInstance,
    graph: &Graph,
    ontology: &Ontology,
    ignore_order: bool,
) -> AccuracyReport {
    let records = corpus
        .iter()
        .map(|q| evaluate_one(q, schema, instance, graph, ontology, ignore_order))
        .collect();
    AccuracyReport::from_records(records)
}

fn evaluate_one(
    q: &CorpusQuery,
    schema: &RelationalSchema,
    instance: &RelationalInstance,
    graph: &Graph,
    ontology: &Ontology,
    ignore_order: bool,
) -> QueryRecord {
    let mut record = QueryRecord {
        id: q.id.clone(),
        verdict: Verdict::Failed,
        error: None,
        hardness: None,
        categories: Vec::new(),
    };
    let t = match translate(&q.sql, schema, ontology) {
        Ok(t) => t,
        Err(e) => {
            record.verdict = if e.is_rejection() {
                Verdict::Rejected
            } else {
                Verdict::Failed
            };
            record.error = Some(e.to_string());
            return record;
        }
    };
    let profile = profile_query(&t.tree, &t.sparql);
    record.hardness = Some(hardness(&profile));
    record.categories = categorize(&profile).into_iter().collect();
    let outcome = eval_sql(&t.resolved, instance).and_then(|a| Ok((a, eval_sparql(&t.sparql, graph)?)));
    match outcome {
        Err(e) => record.error = Some(e.to_string()),
        Ok((a, b)) if compare_results_with(&a, &b, ignore_order) => record.verdict = Verdict::Correct,
        Ok((a, b)) => {
            record.error = Some(format!(
                "result mismatch: SQL returned {} rows, SPARQL returned {}",
                a.rows.len(),
                b.rows.len()
            ))
        }
    }
    record
}
