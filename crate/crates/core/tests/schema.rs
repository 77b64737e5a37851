//! The shipped JSON schema and sample scenarios agree with the parser.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde_json::Value;

use lofock::scenario::{Experiment, Scenario};

fn root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn schema() -> Value {
    let text = fs::read_to_string(root().join("schema/scenario.schema.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn variants(schema: &Value) -> Vec<Value> {
    schema["properties"]["experiment"]["oneOf"]
        .as_array()
        .unwrap()
        .clone()
}

#[test]
fn schema_lists_every_kind() {
    let kinds: Vec<String> = variants(&schema())
        .iter()
        .map(|v| {
            v["properties"]["kind"]["const"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(kinds, Experiment::KINDS);
}

#[test]
fn schema_fields_and_defaults_match_the_parser() {
    for variant in variants(&schema()) {
        let kind = variant["properties"]["kind"]["const"].as_str().unwrap();
        assert_eq!(
            variant["additionalProperties"],
            Value::Bool(false),
            "{kind}"
        );
        let defaults = serde_json::to_value(Experiment::default_for(kind).unwrap()).unwrap();
        let parsed: BTreeSet<&String> = defaults.as_object().unwrap().keys().collect();
        let declared: BTreeSet<&String> =
            variant["properties"].as_object().unwrap().keys().collect();
        assert_eq!(parsed, declared, "{kind}");
        for (field, spec) in variant["properties"].as_object().unwrap() {
            if field != "kind" {
                assert_eq!(spec["default"], defaults[field], "{kind}.{field}");
            }
        }
    }
}

#[test]
fn top_level_fields_match() {
    let s = schema();
    assert_eq!(s["additionalProperties"], Value::Bool(false));
    let declared: BTreeSet<&String> = s["properties"].as_object().unwrap().keys().collect();
    let example = serde_json::to_value(Scenario::new(
        "x",
        0,
        Experiment::default_for("ns_demo").unwrap(),
    ))
    .unwrap();
    let parsed: BTreeSet<&String> = example.as_object().unwrap().keys().collect();
    assert_eq!(declared, parsed);
}

#[test]
fn sample_scenarios_parse_and_cover_every_kind() {
    let mut kinds = BTreeSet::new();
    for entry in fs::read_dir(root().join("scenarios")).unwrap() {
        let path = entry.unwrap().path();
        let s = Scenario::from_json(&fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        kinds.insert(s.experiment.kind());
    }
    assert_eq!(kinds, Experiment::KINDS.into_iter().collect());
}
