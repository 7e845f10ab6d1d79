//! Split rules files: `{task: {source_dataset: {doc_type: {subject_id: split}}}}`
//! where `doc_type` and `subject_id` may be `"*"` and a split may be
//! `"exclude"`. An optional top-level `"version"` number is ignored.

use std::path::Path;

use padbench_core::dataset::{DocType, RuleTarget, SourceDataset, SplitRules, Task};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::fsutil::read_to_string;

/// Subject enumerations of the print task for MIDV-2020 and DLC-2021.
pub const PRINT_RULES: &str = include_str!("../rules/print.json");
/// Subject enumerations of the screen task for MIDV-2020 and DLC-2021.
pub const SCREEN_RULES: &str = include_str!("../rules/screen.json");

pub fn builtin_rules(task: Task) -> SplitRules {
    let text = match task {
        Task::Print => PRINT_RULES,
        Task::Screen => SCREEN_RULES,
    };
    parse_rules(text, Path::new("<builtin>")).expect("shipped rules parse")
}

fn object<'a>(v: &'a Value, path: &Path, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse(path, format!("{at}: expected an object")))
}

pub fn parse_rules(text: &str, path: &Path) -> Result<SplitRules> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::parse(path, e))?;
    let mut rules = SplitRules::new();
    for (task_key, sources) in object(&root, path, "rules")? {
        if task_key == "version" {
            continue;
        }
        let task = Task::parse(task_key).ok_or_else(|| Error::parse(path, format!("unknown task {task_key:?}")))?;
        for (source_key, docs) in object(sources, path, task_key)? {
            let at = format!("{task_key}.{source_key}");
            let source = SourceDataset::parse(source_key)
                .ok_or_else(|| Error::parse(path, format!("{at}: unknown source dataset")))?;
            for (doc_key, subjects) in object(docs, path, &at)? {
                let at = format!("{at}.{doc_key}");
                let doc = match doc_key.as_str() {
                    "*" => None,
                    d => Some(DocType::parse(d).ok_or_else(|| Error::parse(path, format!("{at}: unknown doc type")))?),
                };
                for (subject, target) in object(subjects, path, &at)? {
                    let at = format!("{at}.{subject}");
                    let target = target
                        .as_str()
                        .and_then(RuleTarget::parse)
                        .ok_or_else(|| Error::parse(path, format!("{at}: expected train, validation, test or exclude")))?;
                    let subject = (subject != "*").then_some(subject.as_str());
                    rules.insert(task, source, doc, subject, target);
                }
            }
        }
    }
    Ok(rules)
}

pub fn read_rules(path: &Path) -> Result<SplitRules> {
    parse_rules(&read_to_string(path)?, path)
}
