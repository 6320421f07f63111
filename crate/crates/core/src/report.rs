//! Tables emitted by experiments, with CSV and JSON encodings.
//!
//! Cells print deterministically: integers in decimal, rationals as `a/b`,
//! floats with 15 significant digits. CSV uses LF line endings and always
//! has a header row.

use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::arith::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(BigInt),
    Rational(Rational),
    Float(f64),
    Text(String),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v.into())
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v.into())
    }
}

impl From<BigInt> for Cell {
    fn from(v: BigInt) -> Self {
        Cell::Int(v)
    }
}

impl From<Rational> for Cell {
    fn from(v: Rational) -> Self {
        Cell::Rational(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
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

/// 15 significant digits; plain notation for moderate magnitudes.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into a new leading digit, e.g. 9.99.. -> 10.0..
        let digits = s.bytes().filter(u8::is_ascii_digit).count();
        let leading_zeros = s
            .trim_start_matches('-')
            .bytes()
            .take_while(|&b| b == b'0' || b == b'.')
            .filter(|&b| b == b'0')
            .count();
        if digits - leading_zeros > 15 && decimals > 0 {
            let d = decimals - 1;
            return format!("{x:.d$}");
        }
        s
    } else {
        format!("{x:.14e}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Rational(q) => f.write_str(&format_rational(q)),
            Cell::Float(x) => f.write_str(&format_float(*x)),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(v) {
                Ok(i) => json!(i),
                Err(_) => json!(v.to_string()),
            },
            Cell::Rational(q) => json!(format_rational(q)),
            Cell::Float(x) => {
                let shown: f64 = format_float(*x).parse().unwrap_or(*x);
                serde_json::Number::from_f64(shown).map_or(Value::Null, Value::Number)
            }
            Cell::Text(s) => json!(s),
        }
    }

    /// Parses `s` as a cell of the same variant as `self`.
    pub fn parse_like(&self, s: &str) -> Result<Cell> {
        let bad = || Error::Parse(format!("bad cell {s:?}"));
        Ok(match self {
            Cell::Int(_) => Cell::Int(s.parse().map_err(|_| bad())?),
            Cell::Rational(_) => Cell::Rational(parse_rational(s)?),
            Cell::Float(_) => Cell::Float(s.parse().map_err(|_| bad())?),
            Cell::Text(_) => Cell::Text(s.to_string()),
        })
    }
}

/// A named table with parameters, a fixed header and rows of cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub schema: String,
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &str, columns: &[&str]) -> Self {
        Table {
            schema: schema.to_string(),
            params: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        };
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string())).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("cells are UTF-8")
    }

    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        json!({
            "schema": self.schema,
            "params": params,
            "columns": self.columns,
            "rows": self.rows.iter()
                .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
                .collect::<Vec<_>>(),
        })
    }

    /// Reads CSV written by [`Table::write_csv`], typing cells after `template`'s rows.
    pub fn read_csv_like(template: &Table, text: &str) -> Result<Table> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = r
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let mut out = Table {
            schema: template.schema.clone(),
            params: template.params.clone(),
            columns: header,
            rows: Vec::new(),
        };
        for (rec, tmpl) in r.records().zip(&template.rows) {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let row = tmpl
                .iter()
                .zip(rec.iter())
                .map(|(c, s)| c.parse_like(s))
                .collect::<Result<_>>()?;
            out.rows.push(row);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn float_digits() {
        assert_eq!(format_float(1.6449340668482264), "1.64493406684823");
        assert_eq!(format_float(82.24670334241132), "82.2467033424113");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(9.999999999999999), "10.0000000000000");
        assert_eq!(format_float(1e20), "1.00000000000000e20");
        assert_eq!(format_float(-0.5), "-0.500000000000000");
    }

    #[test]
    fn csv_shape() {
        let mut t = Table::new("demo", &["T", "count", "ratio", "q"]);
        assert_eq!(t.to_csv(), "T,count,ratio,q\n");
        t.push(vec![10u64.into(), 87u64.into(), 1.0578.into(), ratio(3, 8).into()]);
        assert_eq!(t.to_csv(), "T,count,ratio,q\n10,87,1.05780000000000,3/8\n");
        let j = t.to_json();
        assert_eq!(j["columns"][1], "count");
        assert_eq!(j["rows"][0][3], "3/8");
    }
}
