use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::{Error, Result};

/// `x` with 17 significant digits, so equal bits print equal text.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Compact JSON whose floats carry 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, x: f64) -> std::io::Result<()> {
        w.write_all(format!("{x:.16e}").as_bytes())
    }
}

pub fn to_json(v: &impl Serialize) -> Result<String> {
    let mut out = Vec::new();
    v.serialize(&mut serde_json::Serializer::with_formatter(&mut out, Sig17))?;
    String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => fmt_f64(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u32> for Cell {
    fn from(i: u32) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Build a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::suites::Cell::from($x)),*]
    };
}

/// The evidence table and verdict of one verification battery.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    /// Largest residual the battery compares against its tolerance.
    pub max_residual: f64,
    pub summary: BTreeMap<String, Value>,
    pub first_failure: Option<Value>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl SuiteReport {
    pub(crate) fn new(suite: &str, seed: u64, header: &[&str]) -> Self {
        SuiteReport {
            suite: suite.into(),
            seed,
            pass: true,
            max_residual: 0.0,
            summary: BTreeMap::new(),
            first_failure: None,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub(crate) fn residual(&mut self, r: f64) {
        if r.is_nan() || r > self.max_residual {
            self.max_residual = r;
        }
    }

    /// Record a failed assertion; only the first counterexample is kept.
    pub(crate) fn fail(&mut self, detail: Value) {
        self.pass = false;
        if self.first_failure.is_none() {
            self.first_failure = Some(detail);
        }
    }

    pub(crate) fn check(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        if !ok {
            self.fail(detail());
        }
    }

    pub(crate) fn note(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    /// `{suite, seed, max_residual, pass, ...summary, first_failure}`.
    pub fn summary_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("suite".into(), self.suite.clone().into());
        m.insert("seed".into(), self.seed.into());
        m.insert("max_residual".into(), Value::from(self.max_residual));
        m.insert("pass".into(), self.pass.into());
        for (k, v) in &self.summary {
            m.insert(k.clone(), v.clone());
        }
        m.insert("first_failure".into(), self.first_failure.clone().unwrap_or(Value::Null));
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut v = self.summary_json();
                v["header"] = serde_json::to_value(&self.header)?;
                v["rows"] = serde_json::to_value(&self.rows)?;
                Ok(to_json(&v)? + "\n")
            }
        }
    }

    /// One line per battery: `PASS|FAIL suite max_residual=...`.
    pub fn verdict_line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("{verdict} {} max_residual={}", self.suite, fmt_f64(self.max_residual))
    }
}
