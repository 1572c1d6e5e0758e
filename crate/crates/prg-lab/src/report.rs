//! Experiment reports: JSON lines out, CSV summaries.
//!
//! Reports carry exact integer counters plus derived statistics; everything
//! in a report is a pure function of (config, seed), so reruns are
//! byte-identical.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stamp {
    pub package: String,
    pub version: String,
    /// Echo of the full configuration the report was produced from.
    pub config: serde_json::Value,
}

impl Stamp {
    pub fn new(config: serde_json::Value) -> Self {
        Stamp {
            package: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub label: String,
    /// Exact event counter (failures, mismatches, ...).
    pub numerator: u64,
    /// Exact trial counter.
    pub denominator: u64,
    pub p_hat: f64,
    /// Two-sided 99% Clopper-Pearson interval for the event probability.
    pub ci99: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub informative: Option<bool>,
    pub verdict: Verdict,
    pub stamp: Stamp,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub const CSV_HEADER: &'static str =
        "experiment,label,numerator,denominator,p_hat,ci99_lo,ci99_hi,bound,informative,verdict";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.label,
            self.numerator,
            self.denominator,
            self.p_hat,
            self.ci99[0],
            self.ci99[1],
            self.bound.map_or(String::new(), |b| b.to_string()),
            self.informative.map_or(String::new(), |b| b.to_string()),
            match self.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
            },
        )
    }
}

pub fn write_jsonl(out: &mut impl Write, reports: &[ExperimentReport]) -> std::io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(input: &mut impl BufRead) -> std::io::Result<Vec<ExperimentReport>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

pub fn write_csv(out: &mut impl Write, reports: &[ExperimentReport]) -> std::io::Result<()> {
    writeln!(out, "{}", ExperimentReport::CSV_HEADER)?;
    for r in reports {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> ExperimentReport {
        ExperimentReport {
            experiment: "switch".into(),
            label: "cell-a".into(),
            numerator: 3,
            denominator: 1000,
            p_hat: 0.003,
            ci99: [0.0005, 0.01],
            bound: Some(0.25),
            informative: Some(true),
            verdict: Verdict::Pass,
            stamp: Stamp::new(serde_json::json!({"p": 0.015625})),
            details: serde_json::Value::Null,
        }
    }

    #[test]
    fn jsonl_roundtrip() {
        let reports = vec![sample_report(), sample_report()];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &reports).unwrap();
        let back = read_jsonl(&mut buf.as_slice()).unwrap();
        assert_eq!(back, reports);
    }

    #[test]
    fn csv_shape() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[sample_report()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), ExperimentReport::CSV_HEADER);
        let row = lines.next().unwrap();
        assert!(row.starts_with("switch,cell-a,3,1000,"));
        assert!(row.ends_with(",pass"));
    }
}
