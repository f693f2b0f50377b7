//! Structured experiment output: JSON reports and CSV trial tables.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measure::McEstimate;
use crate::Vector;

pub fn serialize_vector<S: Serializer>(v: &Vector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

/// Fixed 17-significant-digit rendering used in every CSV file.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Int(i64),
    Real(f64),
}

impl Cell {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Bool(b) => b as u8 as f64,
            Cell::Int(i) => i as f64,
            Cell::Real(x) => x,
        }
    }

    fn render(&self) -> String {
        match *self {
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format_real(x),
        }
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}
impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}
impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

/// Per-trial records with a fixed column order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl TrialTable {
    pub fn new(columns: &[&str]) -> Self {
        TrialTable { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match columns");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    /// Concatenates tables with identical columns.
    pub fn extend(&mut self, other: &TrialTable) -> Result<()> {
        if self.columns.is_empty() {
            self.columns = other.columns.clone();
        } else if self.columns != other.columns {
            return Err(Error::Config("cannot merge trial tables with different columns".into()));
        }
        self.rows.extend(other.rows.iter().cloned());
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for r in &self.rows {
            out.write_record(r.iter().map(Cell::render))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(path)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub count: usize,
    pub min: f64,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    pub max: f64,
    pub mean: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(xs: &[f64], p: f64) -> f64 {
    let h = p * (xs.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut xs = values.to_vec();
        xs.sort_by(f64::total_cmp);
        Some(Quantiles {
            count: xs.len(),
            min: xs[0],
            q05: quantile_sorted(&xs, 0.05),
            q25: quantile_sorted(&xs, 0.25),
            median: quantile_sorted(&xs, 0.5),
            q75: quantile_sorted(&xs, 0.75),
            q95: quantile_sorted(&xs, 0.95),
            max: xs[xs.len() - 1],
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
        })
    }
}

/// An empirical probability with its binomial standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    pub estimate: f64,
    pub standard_error: f64,
    pub successes: u64,
    pub trials: usize,
}

impl Probability {
    pub fn from_flags(flags: impl IntoIterator<Item = bool>) -> Self {
        let (mut s, mut t) = (0u64, 0usize);
        for f in flags {
            s += f as u64;
            t += 1;
        }
        Self::from(McEstimate::from_hits(s, t.max(1)), s, t)
    }

    fn from(e: McEstimate, successes: u64, trials: usize) -> Self {
        if trials == 0 {
            return Probability { estimate: 0.0, standard_error: 0.0, successes: 0, trials: 0 };
        }
        Probability { estimate: e.estimate, standard_error: e.standard_error, successes, trials }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub quantiles: BTreeMap<String, Quantiles>,
    pub probabilities: BTreeMap<String, Probability>,
    pub estimates: BTreeMap<String, McEstimate>,
    pub fitted: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        }
    }
}

/// One checked inequality: both sides, the slack granted and the verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl InequalityCheck {
    /// lhs ≤ rhs + slack
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let holds = lhs <= rhs + slack;
        InequalityCheck { name: name.into(), lhs, relation: Relation::Le, rhs, slack, holds }
    }

    /// lhs + slack ≥ rhs
    pub fn ge(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let holds = lhs + slack >= rhs;
        InequalityCheck { name: name.into(), lhs, relation: Relation::Ge, rhs, slack, holds }
    }

    /// |lhs − rhs| ≤ slack
    pub fn eq(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let holds = (lhs - rhs).abs() <= slack;
        InequalityCheck { name: name.into(), lhs, relation: Relation::Eq, rhs, slack, holds }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub trials: TrialTable,
    pub summary: Summary,
    pub checks: Vec<InequalityCheck>,
    pub notes: Vec<String>,
    pub wall_time_secs: f64,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: serde_json::Value, seed: u64, trials: TrialTable) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            config,
            seed,
            trials,
            summary: Summary::default(),
            checks: Vec::new(),
            notes: Vec::new(),
            wall_time_secs: 0.0,
        }
    }

    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failed_checks(&self) -> Vec<&InequalityCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `report.json` and `trials.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join("report.json");
        let csv = dir.join("trials.csv");
        let mut f = BufWriter::new(File::create(&json)?);
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        f.flush()?;
        self.trials.write_csv_file(&csv)?;
        Ok((json, csv))
    }
}

pub const PLOT_COLUMNS: [&str; 5] = ["trial", "diameter", "success", "n", "k"];
pub const PLOT_SUMMARY_COLUMNS: [&str; 10] =
    ["n", "k", "n_over_k", "trials", "min", "q05", "median", "q95", "max", "success_rate"];

/// Path of the sweep summary written next to `path`.
pub fn summary_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    path.with_file_name(format!("{stem}_summary.csv"))
}

/// Writes the (trial, diameter, success, n, k) table to `path` and one
/// quantile row per (n, k) to the sibling `<stem>_summary.csv`.
pub fn emit_plot_data(report: &ExperimentReport, path: &Path) -> Result<PathBuf> {
    let t = &report.trials;
    let idx: Vec<Option<usize>> = PLOT_COLUMNS.iter().map(|c| t.column_index(c)).collect();
    if !t.is_empty() && idx.iter().any(Option::is_none) {
        return Err(Error::Config(format!(
            "report '{}' lacks the plot columns {:?}",
            report.experiment, PLOT_COLUMNS
        )));
    }
    let mut table = TrialTable::new(&PLOT_COLUMNS);
    let mut groups: BTreeMap<(i64, i64), (Vec<f64>, Vec<bool>)> = BTreeMap::new();
    for r in &t.rows {
        let row: Vec<Cell> = idx.iter().map(|i| r[i.unwrap()].clone()).collect();
        let key = (row[3].as_f64() as i64, row[4].as_f64() as i64);
        let g = groups.entry(key).or_default();
        g.0.push(row[1].as_f64());
        g.1.push(row[2].as_f64() != 0.0);
        table.push(row);
    }
    table.write_csv_file(path)?;

    let mut summary = TrialTable::new(&PLOT_SUMMARY_COLUMNS);
    for ((n, k), (d, s)) in groups {
        let q = Quantiles::of(&d).expect("non-empty group");
        let rate = s.iter().filter(|&&b| b).count() as f64 / s.len() as f64;
        summary.push(vec![
            Cell::Int(n),
            Cell::Int(k),
            Cell::Real(n as f64 / k as f64),
            q.count.into(),
            q.min.into(),
            q.q05.into(),
            q.median.into(),
            q.q95.into(),
            q.max.into(),
            rate.into(),
        ]);
    }
    let sp = summary_path(path);
    summary.write_csv_file(&sp)?;
    Ok(sp)
}
