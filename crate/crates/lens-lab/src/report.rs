//! Experiment reports: scalars, tabular series and verdicts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{LabError, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything an experiment produced. Wall-clock time is kept out of the
/// report (see [`write_report`]) so that reruns are byte-identical.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: BTreeMap<String, String>,
    pub scalars: BTreeMap<String, Value>,
    pub series: BTreeMap<String, Series>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: BTreeMap<String, String>) -> Self {
        Self {
            experiment: experiment.to_string(),
            config,
            scalars: BTreeMap::new(),
            series: BTreeMap::new(),
            verdicts: Vec::new(),
            passed: true,
        }
    }

    pub fn scalar(&mut self, name: &str, value: impl Into<Value>) {
        self.scalars.insert(name.to_string(), value.into());
    }

    pub fn add_series(&mut self, name: &str, series: Series) {
        self.series.insert(name.to_string(), series);
    }

    pub fn verdict(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.verdicts.push(Verdict {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }
}

/// Files written by [`write_report`].
#[derive(Clone, Debug)]
pub struct WrittenFiles {
    pub report: PathBuf,
    pub series: Vec<PathBuf>,
    pub timing: PathBuf,
}

/// Writes `<experiment>.report.json`, one `<experiment>.<series>.csv` per
/// series and the wall-clock time to `<experiment>.timing.json`.
pub fn write_report(report: &ExperimentReport, dir: &Path, elapsed: Duration) -> Result<WrittenFiles> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let write = |path: PathBuf, text: &str| -> Result<PathBuf> {
        std::fs::write(&path, text).map_err(|e| LabError::io(&path, e))?;
        Ok(path)
    };
    let name = &report.experiment;
    let report_path = write(dir.join(format!("{name}.report.json")), &report.to_json_string())?;
    let mut series = Vec::new();
    for (s, data) in &report.series {
        series.push(write(dir.join(format!("{name}.{s}.csv")), &data.to_csv())?);
    }
    let timing = serde_json::json!({ "experiment": name, "wall_clock_seconds": elapsed.as_secs_f64() });
    let timing = write(dir.join(format!("{name}.timing.json")), &format!("{timing}\n"))?;
    Ok(WrittenFiles {
        report: report_path,
        series,
        timing,
    })
}
