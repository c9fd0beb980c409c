//! Tabular reports shared by every verification routine and the CLI.
//!
//! CSV output is a single `# {json}` header line followed by comma-separated
//! numeric rows printed with C's `%.17g` conventions, so a table re-read from
//! disk reproduces every `f64` bit-for-bit.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format `{other}` (expected csv|json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportTable {
    pub table: String,
    pub meta: Map<String, Value>,
    pub columns: Vec<String>,
    pub checks: Vec<Check>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct CsvHeader {
    table: String,
    meta: Map<String, Value>,
    columns: Vec<String>,
    checks: Vec<Check>,
}

impl ReportTable {
    pub fn new(table: impl Into<String>, columns: &[&str]) -> Self {
        ReportTable {
            table: table.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("metadata is serializable");
        self.meta.insert(key.to_string(), v);
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width mismatch in {}", self.table);
        self.rows.push(row);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let header = CsvHeader {
            table: self.table.clone(),
            meta: self.meta.clone(),
            columns: self.columns.clone(),
            checks: self.checks.clone(),
        };
        let mut out = String::from("# ");
        out.push_str(&serde_json::to_string(&header).expect("header serializes"));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_g17(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes") + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn write_to(&self, w: &mut impl Write, format: Format) -> Result<()> {
        w.write_all(self.render(format).as_bytes())?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let json = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::Parse("CSV is missing the `# {json}` header".into()))?;
        let header: CsvHeader =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("bad CSV header: {e}")))?;
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let row = line.split(',').map(parse_g).collect::<Result<Vec<f64>>>()?;
            if row.len() != header.columns.len() {
                return Err(Error::Parse(format!(
                    "row has {} cells, header declares {} columns",
                    row.len(),
                    header.columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(ReportTable {
            table: header.table,
            meta: header.meta,
            columns: header.columns,
            checks: header.checks,
            rows,
        })
    }

    /// Parses the JSON metadata of a CSV header line without reading the rows.
    pub fn header_meta(text: &str) -> Result<Map<String, Value>> {
        let first = text.lines().next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let json = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::Parse("CSV is missing the `# {json}` header".into()))?;
        let header: CsvHeader =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("bad CSV header: {e}")))?;
        Ok(header.meta)
    }
}

fn parse_g(s: &str) -> Result<f64> {
    match s.trim() {
        "nan" | "-nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse::<f64>().map_err(|e| Error::Parse(format!("bad number `{t}`: {e}"))),
    }
}

/// Formats `x` exactly like C's `printf("%.17g", x)`.
pub fn fmt_g17(x: f64) -> String {
    const P: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -4 || exp >= P {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
