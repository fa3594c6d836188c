use super::ontology::Ontology;

fn quoted_list(mut names: Vec<&str>) -> String {
    names.sort_unstable();
    let items: Vec<String> = names.iter().map(|n| format!("'{n}'")).collect();
    format!("[{}]", items.join(", "))
}

/// Compact ontology description for inclusion in a query-generation prompt:
/// the prefix declaration followed by sorted class, object property and data
/// property local names.
pub fn ontology_prompt_summary(ontology: &Ontology) -> String {
    let classes = quoted_list(ontology.classes.iter().map(|c| c.local_name.as_str()).collect());
    let objects = quoted_list(
        ontology
            .object_properties
            .iter()
            .map(|p| p.local_name.as_str())
            .collect(),
    );
    let data = quoted_list(
        ontology
            .data_properties
            .iter()
            .map(|p| p.local_name.as_str())
            .collect(),
    );
    format!(
        "PREFIX : <{}>\n\n'classes': {classes}\n\n'object_properties': {objects}\n\n'data_properties': {data}\n",
        ontology.prefix
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::ontology::DEFAULT_PREFIX;

    #[test]
    fn empty_ontology_has_three_empty_lists() {
        let o = Ontology {
            prefix: DEFAULT_PREFIX.into(),
            classes: vec![],
            data_properties: vec![],
            object_properties: vec![],
        };
        let text = ontology_prompt_summary(&o);
        assert!(text.starts_with("PREFIX : <http://valuenet/ontop/>\n"));
        assert!(text.contains("'classes': []"));
        assert!(text.contains("'object_properties': []"));
        assert!(text.contains("'data_properties': []"));
    }
}
