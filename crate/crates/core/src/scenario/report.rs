use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Scenario;
use crate::error::{Error, Result};

/// A named number, optionally checked against an expected value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    pub name: String,
    pub value: f64,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl Scalar {
    pub fn checked(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Scalar {
            name: name.into(),
            value,
            expected: Some(expected),
            tolerance: Some(tolerance),
            pass: Some((value - expected).abs() <= tolerance),
        }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Scalar {
            name: name.into(),
            value,
            expected: None,
            tolerance: None,
            pass: None,
        }
    }
}

/// A table of numbers; a missing value is `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Series {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    HeraldImpossible,
    Uncorrectable,
    Annotation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub message: String,
}

/// Run information that is not part of the reproducible payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub elapsed_seconds: f64,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: Scenario,
    pub scalars: Vec<Scalar>,
    pub series: BTreeMap<String, Series>,
    pub events: Vec<Event>,
    pub metadata: Metadata,
}

#[derive(Serialize)]
struct Payload<'a> {
    scenario: &'a Scenario,
    scalars: &'a [Scalar],
    series: &'a BTreeMap<String, Series>,
    events: &'a [Event],
}

impl Report {
    /// Everything except [`Metadata`], serialized. Two runs of one scenario
    /// give identical payloads.
    pub fn numeric_payload(&self) -> String {
        serde_json::to_string(&Payload {
            scenario: &self.scenario,
            scalars: &self.scalars,
            series: &self.series,
            events: &self.events,
        })
        .expect("report serializes")
    }

    pub fn scalar(&self, name: &str) -> Option<&Scalar> {
        self.scalars.iter().find(|s| s.name == name)
    }

    /// Checked scalars outside their tolerance.
    pub fn violations(&self) -> Vec<&Scalar> {
        self.scalars
            .iter()
            .filter(|s| s.pass == Some(false))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// CSV text of one series: a header line, then one line per row. Numbers use
/// the shortest representation (`Debug` form) that parses back to the same `f64`; missing
/// values are empty cells.
pub fn emit_figure_data(report: &Report, series: &str) -> Result<String> {
    let Some(s) = report.series.get(series) else {
        let available: Vec<&str> = report.series.keys().map(String::as_str).collect();
        return Err(Error::Config(format!(
            "unknown series {series:?}; available: {}",
            available.join(", ")
        )));
    };
    let mut out = s.columns.join(",");
    out.push('\n');
    for row in &s.rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if let Some(v) = v {
                write!(out, "{v:?}").expect("write to string");
            }
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Experiment;

    fn report() -> Report {
        let mut s = Series::new(&["theta", "coincidence_probability"]);
        s.push(vec![Some(0.0), Some(1.0)]);
        s.push(vec![Some(0.1), None]);
        s.push(vec![Some(std::f64::consts::FRAC_PI_4), Some(1.2e-33)]);
        Report {
            scenario: Scenario::new("t", 0, Experiment::default_for("hom_scan").unwrap()),
            scalars: vec![
                Scalar::checked("a", 0.25, 0.25, 1e-9),
                Scalar::checked("b", 0.2, 0.25, 1e-9),
            ],
            series: [("hom_scan".to_string(), s)].into_iter().collect(),
            events: vec![],
            metadata: Metadata {
                tool: "lofock".into(),
                version: "0".into(),
                elapsed_seconds: 1.0,
                threads: 1,
            },
        }
    }

    #[test]
    fn csv_has_header_and_round_trip_numbers() {
        let csv = emit_figure_data(&report(), "hom_scan").unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "theta,coincidence_probability");
        assert_eq!(lines[2], "0.1,");
        let pi4: f64 = lines[3].split(',').next().unwrap().parse().unwrap();
        assert_eq!(pi4, std::f64::consts::FRAC_PI_4);
        let tiny: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(tiny, 1.2e-33);
        assert_eq!(csv, emit_figure_data(&report(), "hom_scan").unwrap());
    }

    #[test]
    fn unknown_series_lists_alternatives() {
        let Err(Error::Config(m)) = emit_figure_data(&report(), "nope") else {
            panic!()
        };
        assert!(m.contains("hom_scan"));
    }

    #[test]
    fn payload_ignores_metadata() {
        let a = report();
        let mut b = report();
        b.metadata.elapsed_seconds = 99.0;
        assert_eq!(a.numeric_payload(), b.numeric_payload());
        assert_eq!(a.violations().len(), 1);
    }
}
