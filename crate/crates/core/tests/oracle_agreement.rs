//! Both engines must agree on every accepted random query.

mod common;

#[test]
fn random_queries_agree_across_engines() {
    let stats = common::run_oracle_corpus(7, 60, 10);
    let shown = |v: &[String]| v.iter().take(5).cloned().collect::<Vec<_>>().join("\n\n");
    assert!(stats.errors.is_empty(), "{} errors:\n{}", stats.errors.len(), shown(&stats.errors));
    assert!(
        stats.disagreements.is_empty(),
        "{} of {} disagree:\n{}",
        stats.disagreements.len(),
        stats.total,
        shown(&stats.disagreements)
    );
    assert!(stats.group_violations.is_empty(), "{}", shown(&stats.group_violations));
    // The generator stays inside the dialect often enough to mean something.
    assert!(stats.non_empty * 2 >= stats.agreed, "only {} non-empty results", stats.non_empty);
    assert!(stats.agreed * 10 >= stats.total * 8, "only {} of {} accepted", stats.agreed, stats.total);
}
