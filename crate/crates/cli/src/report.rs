//! Check records, data tables and their JSON/CSV serialization.

use crate::error::Result;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// How `measured` is compared with `predicted`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `measured <= predicted`
    AtMost,
    /// `measured >= predicted`
    AtLeast,
    /// `|measured - predicted| <= tolerance |predicted|`
    RelWithin,
    /// `|measured - predicted| <= tolerance`
    AbsWithin,
    /// Informational; never fails.
    Recorded,
}

impl Relation {
    pub fn holds(self, measured: f64, predicted: f64, tolerance: f64) -> bool {
        match self {
            Relation::AtMost => measured <= predicted,
            Relation::AtLeast => measured >= predicted,
            Relation::RelWithin => (measured - predicted).abs() <= tolerance * predicted.abs(),
            Relation::AbsWithin => (measured - predicted).abs() <= tolerance,
            Relation::Recorded => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    /// Anchor naming the estimate under test, e.g. `lplq-decay-slope`.
    pub id: String,
    pub parameters: BTreeMap<String, Value>,
    pub measured: f64,
    pub predicted: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(id: impl Into<String>, measured: f64, relation: Relation, predicted: f64) -> Self {
        Self {
            id: id.into(),
            parameters: BTreeMap::new(),
            measured,
            predicted,
            relation,
            tolerance: 0.0,
            pass: relation.holds(measured, predicted, 0.0),
            seed: None,
            note: None,
        }
    }

    pub fn at_most(id: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(id, measured, Relation::AtMost, bound)
    }

    pub fn at_least(id: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(id, measured, Relation::AtLeast, bound)
    }

    pub fn rel_within(id: impl Into<String>, measured: f64, predicted: f64, tolerance: f64) -> Self {
        Self::new(id, measured, Relation::RelWithin, predicted).tolerance(tolerance)
    }

    pub fn abs_within(id: impl Into<String>, measured: f64, predicted: f64, tolerance: f64) -> Self {
        Self::new(id, measured, Relation::AbsWithin, predicted).tolerance(tolerance)
    }

    pub fn recorded(id: impl Into<String>, measured: f64) -> Self {
        Self::new(id, measured, Relation::Recorded, f64::NAN)
    }

    fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.relation.holds(self.measured, self.predicted, tolerance);
        self
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Recomputes the flag from the stored fields.
    pub fn recompute(&self) -> bool {
        self.relation.holds(self.measured, self.predicted, self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64.
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => quote(s),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// RFC 4180: CRLF line ends, header first.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.header.iter().map(|h| quote(h)).collect();
        let _ = write!(out, "{}\r\n", header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = write!(out, "{}\r\n", cells.join(","));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub kind: String,
    pub environment: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// CSV files written next to the JSON report.
    pub tables: Vec<String>,
    #[serde(skip)]
    pub data: Vec<Table>,
}

impl Report {
    pub fn new(experiment: &str, kind: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            kind: kind.to_string(),
            environment: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            tables: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn env(&mut self, key: &str, value: impl Serialize) {
        self.environment
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn table(&mut self, table: Table) {
        self.tables.push(format!("{}-{}.csv", self.experiment, table.name));
        self.data.push(table);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Writes `<experiment>.json` plus one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json = dir.join(format!("{}.json", self.experiment));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&json, text)?;
        written.push(json);
        for (name, table) in self.tables.iter().zip(&self.data) {
            let path = dir.join(name);
            std::fs::write(&path, table.to_csv())?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_is_recomputable() {
        let checks = [
            Check::at_most("a", 1.0, 2.0),
            Check::at_least("b", 1.0, 2.0),
            Check::rel_within("c", 1.04, 1.0, 0.05),
            Check::abs_within("d", 0.5, 0.0, 0.1),
            Check::recorded("e", f64::NAN),
        ];
        let flags: Vec<bool> = checks.iter().map(|c| c.pass).collect();
        assert_eq!(flags, [true, false, true, false, true]);
        assert!(checks.iter().all(|c| c.recompute() == c.pass));
        assert!(!Check::at_most("nan", f64::NAN, 1.0).pass);
    }

    #[test]
    fn csv_quoting_and_number_format() {
        let mut t = Table::new("x", &["a", "b,c"]);
        t.push(vec![Cell::Num(0.1), Cell::from("say \"hi\"")]);
        assert_eq!(t.to_csv(), "a,\"b,c\"\r\n1.0000000000000001e-1,\"say \"\"hi\"\"\"\r\n");
    }
}
