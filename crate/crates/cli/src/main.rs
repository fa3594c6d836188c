//! `rdbridge`: direct mapping, SQL to SPARQL transpilation and
//! execution-accuracy checks from the command line.
//!
//! Exit codes: 0 success, 1 bad input, 2 query outside the supported
//! dialect, 3 internal error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rdbridge_core::engines::{eval_sparql, eval_sql, EngineError};
use rdbridge_core::eval::{categorize, execution_accuracy_with, hardness, load_corpus, profile_query};
use rdbridge_core::mapping::{derive_ontology, ontology_prompt_summary, serialize_graph};
use rdbridge_core::pipeline::{translate, Dataset, LoadError, PipelineError};
use rdbridge_core::schema::{load_hints, load_schema, repair_schema, RelationalSchema, RepairReport};
use rdbridge_core::semql::{to_sexpr, SemQlError};
use rdbridge_core::sparql::{serialize_sparql_with, IriStyle, SparqlError};

const DEFAULT_PREFIX: &str = "http://valuenet/ontop/";

#[derive(Debug, Parser)]
#[command(name = "rdbridge", version, about = "Relational data as RDF, SQL as SPARQL")]
struct Cli {
    /// Namespace for classes, properties and entity IRIs.
    #[arg(long, global = true, env = "RDBRIDGE_PREFIX", default_value = DEFAULT_PREFIX)]
    prefix: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Repair the schema and print the derived ontology as JSON.
    Map {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the database as sorted N-Triples.
    Materialize {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the materialization report (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Translate one SQL query into SPARQL.
    Transpile {
        #[command(flatten)]
        schema: SchemaArgs,
        /// File holding the SQL query.
        #[arg(long)]
        sql: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the SemQL tree as an s-expression.
        #[arg(long)]
        semql: Option<PathBuf>,
        /// Write `PREFIX :` and prefixed names instead of full IRIs.
        #[arg(long)]
        emit_prefixed_iris: bool,
    },
    /// Execute one SQL query on either engine and write the result as CSV.
    Run {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        sql: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Sparql)]
        engine: Engine,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execution accuracy of a corpus: SQL answers against SPARQL answers.
    Eval {
        #[command(flatten)]
        schema: SchemaArgs,
        /// Directory of `*.sql` files or a file with one query per line.
        #[arg(long)]
        corpus: PathBuf,
        /// Report file (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare every result as a multiset, even under ORDER BY.
        #[arg(long)]
        order_insensitive: bool,
    },
    /// Complexity profile and hardness of every query in a corpus.
    Analyze {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        corpus: PathBuf,
        /// Profiles as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the ontology summary used to prompt a language model.
    Prompt {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Sql,
    Sparql,
}

#[derive(Debug, Args)]
struct SchemaArgs {
    /// Schema document, or a directory holding `schema.json`, an optional
    /// `hints.json` and a `data/` directory.
    #[arg(long)]
    schema: PathBuf,
    /// Repair hints (JSON).
    #[arg(long)]
    hints: Option<PathBuf>,
    /// Directory with one CSV file per table.
    #[arg(long)]
    data: Option<PathBuf>,
}

/// Resolved input locations.
struct Inputs {
    schema: PathBuf,
    hints: Option<PathBuf>,
    data: Option<PathBuf>,
}

impl SchemaArgs {
    fn resolve(&self) -> Inputs {
        if self.schema.is_dir() {
            let dir = &self.schema;
            let hints = dir.join("hints.json");
            let data = dir.join("data");
            return Inputs {
                schema: dir.join("schema.json"),
                hints: self.hints.clone().or_else(|| hints.is_file().then_some(hints)),
                data: self.data.clone().or_else(|| data.is_dir().then_some(data)),
            };
        }
        Inputs {
            schema: self.schema.clone(),
            hints: self.hints.clone(),
            data: self.data.clone(),
        }
    }
}

/// A failure together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Failure {
        Failure::input(e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Failure {
        let code = if e.is_rejection() {
            2
        } else {
            match &e {
                PipelineError::Sql(_) => 1,
                PipelineError::SemQl(SemQlError::Grammar(_))
                | PipelineError::Sparql(
                    SparqlError::EmissionBug(_) | SparqlError::InvariantViolation(_) | SparqlError::UnknownProperty(_),
                ) => 3,
                _ => 1,
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        match e {
            EngineError::UnsupportedSparql(_) => Failure::internal(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

fn check_prefix(prefix: &str) -> Result<(), Failure> {
    let parsed = url::Url::parse(prefix).map_err(|e| Failure::input(format!("InvalidPrefix: '{prefix}': {e}")))?;
    if parsed.cannot_be_a_base() || !(prefix.ends_with('/') || prefix.ends_with('#')) {
        return Err(Failure::input(format!(
            "InvalidPrefix: '{prefix}' must be an absolute IRI ending in '/' or '#'"
        )));
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

/// Writes to `out` when given, otherwise to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::internal(e.to_string()))
}

/// The repaired schema alone; enough for commands that never touch rows.
fn repaired_schema(inputs: &Inputs) -> Result<(RelationalSchema, RepairReport), Failure> {
    let raw = load_schema(&inputs.schema).map_err(|e| Failure::input(e.to_string()))?;
    let hints = match &inputs.hints {
        Some(p) => Some(load_hints(p).map_err(|e| Failure::input(e.to_string()))?),
        None => None,
    };
    repair_schema(&raw, hints.as_ref()).map_err(|e| Failure::input(e.to_string()))
}

fn dataset(inputs: &Inputs, prefix: &str) -> Result<Dataset, Failure> {
    let data = inputs
        .data
        .as_deref()
        .ok_or_else(|| Failure::input("--data is required for this command"))?;
    Ok(Dataset::load(&inputs.schema, inputs.hints.as_deref(), data, prefix)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    check_prefix(&cli.prefix)?;
    let prefix = cli.prefix.as_str();
    match cli.command {
        Command::Map { schema, out } => {
            let (schema, report) = repaired_schema(&schema.resolve())?;
            for change in &report.changes {
                eprintln!("repair: {change:?}");
            }
            let ontology = derive_ontology(&schema, prefix).map_err(|e| Failure::input(e.to_string()))?;
            emit(out.as_deref(), &to_json(&ontology)?)
        }
        Command::Materialize { schema, out, report } => {
            let data = dataset(&schema.resolve(), prefix)?;
            for skipped in &data.materialization.skipped_references {
                eprintln!("skipped reference: {skipped:?}");
            }
            if let Some(path) = &report {
                emit(Some(path), &to_json(&data.materialization)?)?;
            }
            emit(out.as_deref(), &serialize_graph(&data.graph))?;
            if out.is_some() {
                println!("{} triples", data.graph.len());
            }
            Ok(())
        }
        Command::Transpile {
            schema,
            sql,
            out,
            semql,
            emit_prefixed_iris,
        } => {
            let (schema, _) = repaired_schema(&schema.resolve())?;
            let ontology = derive_ontology(&schema, prefix).map_err(|e| Failure::input(e.to_string()))?;
            let text = read_text(&sql)?;
            let t = translate(text.trim(), &schema, &ontology)?;
            let style = if emit_prefixed_iris {
                IriStyle::Prefixed(prefix.to_string())
            } else {
                IriStyle::Full
            };
            let sparql = serialize_sparql_with(&t.sparql, &style).map_err(|e| Failure::internal(e.to_string()))?;
            if let Some(path) = &semql {
                emit(Some(path), &format!("{}\n", to_sexpr(&t.tree)))?;
            }
            emit(out.as_deref(), &sparql)
        }
        Command::Run { schema, sql, engine, out } => {
            let data = dataset(&schema.resolve(), prefix)?;
            let text = read_text(&sql)?;
            let t = data.translate(text.trim())?;
            let result = match engine {
                Engine::Sql => eval_sql(&t.resolved, &data.instance)?,
                Engine::Sparql => eval_sparql(&t.sparql, &data.graph)?,
            };
            emit(out.as_deref(), &result.to_csv())?;
            if out.is_some() {
                println!("{} rows", result.rows.len());
            }
            Ok(())
        }
        Command::Eval {
            schema,
            corpus,
            out,
            order_insensitive,
        } => {
            let data = dataset(&schema.resolve(), prefix)?;
            let queries =
                load_corpus(&corpus).map_err(|e| Failure::input(format!("cannot read {}: {e}", corpus.display())))?;
            let report = execution_accuracy_with(
                &queries,
                &data.schema,
                &data.instance,
                &data.graph,
                &data.ontology,
                order_insensitive,
            );
            for r in report.records.iter().filter(|r| r.error.is_some()) {
                eprintln!("{}: {}", r.id, r.error.as_deref().unwrap_or_default());
            }
            if let Some(path) = &out {
                emit(Some(path), &report.to_json())?;
            }
            print!("{}", report.to_table());
            Ok(())
        }
        Command::Analyze { schema, corpus, out } => {
            let (schema, _) = repaired_schema(&schema.resolve())?;
            let ontology = derive_ontology(&schema, prefix).map_err(|e| Failure::input(e.to_string()))?;
            let queries =
                load_corpus(&corpus).map_err(|e| Failure::input(format!("cannot read {}: {e}", corpus.display())))?;
            let mut table = String::new();
            let _ = writeln!(table, "{:<32} {:<8} {:<5} categories", "id", "hardness", "score");
            let mut records = Vec::new();
            for q in &queries {
                match translate(&q.sql, &schema, &ontology) {
                    Ok(t) => {
                        let p = profile_query(&t.tree, &t.sparql);
                        let h = hardness(&p);
                        let cats: Vec<&str> = categorize(&p).iter().map(|c| c.name()).collect();
                        let score = rdbridge_core::eval::hardness_score(&p);
                        let _ = writeln!(table, "{:<32} {:<8} {:<5} {}", q.id, h.name(), score, cats.join(","));
                        records.push(json!({"id": q.id, "hardness": h, "score": score, "categories": cats, "profile": p}));
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", q.id);
                        let _ = writeln!(table, "{:<32} {:<8} {:<5} -", q.id, "-", "-");
                        records.push(json!({"id": q.id, "error": e.to_string()}));
                    }
                }
            }
            if let Some(path) = &out {
                emit(Some(path), &to_json(&records)?)?;
            }
            print!("{table}");
            Ok(())
        }
        Command::Prompt { schema, out } => {
            let (schema, _) = repaired_schema(&schema.resolve())?;
            let ontology = derive_ontology(&schema, prefix).map_err(|e| Failure::input(e.to_string()))?;
            emit(out.as_deref(), &ontology_prompt_summary(&ontology))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage mistakes are input errors; 2 is reserved for rejections.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
