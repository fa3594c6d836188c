//! Execution accuracy, corpus reports and query profiling.

mod compare;
mod profile;
mod report;

pub use compare::{compare_results, compare_results_with};
pub use profile::{categorize, hardness, hardness_score, profile_query, Category, Hardness, QueryProfile};
pub use report::{
    execution_accuracy, execution_accuracy_with, load_corpus, AccuracyReport, CorpusQuery, QueryRecord, Tally,
    Verdict,
};
