use std::io::Write;

use serde::{Deserialize, Serialize, Serializer};

/// One table cell. Floats are rounded to 12 significant digits on output.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
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
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

impl Cell {
    pub fn to_text(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Float(x) => Some(x),
            Cell::Int(i) => Some(i as f64),
            _ => None,
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Float(x) if x.is_finite() => s.serialize_f64(round_sig(*x)),
            Cell::Float(_) | Cell::Null => s.serialize_unit(),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// `%.12g`-style formatting: fixed notation for exponents in `[-5, 12)`,
/// scientific otherwise, trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_owned()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn round_sig(x: f64) -> f64 {
    format_float(x).parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("row {row} has {got} cells, expected {want}")]
    Ragged { row: usize, got: usize, want: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ResultTable {
    pub fn new(metadata: Metadata, columns: &[&str]) -> Self {
        Self {
            metadata,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn check(&self) -> Result<(), EmitError> {
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != self.columns.len() {
                return Err(EmitError::Ragged {
                    row: i,
                    got: r.len(),
                    want: self.columns.len(),
                });
            }
        }
        Ok(())
    }

    /// RFC 4180 CSV: header row, CRLF line endings, quoting where needed.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EmitError> {
        self.check()?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::to_text))?;
        }
        w.flush()?;
        Ok(())
    }

    /// `{metadata, columns, rows}`, pretty-printed with a trailing newline.
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), EmitError> {
        self.check()?;
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata {
            tool: "hashrep".into(),
            version: "0".into(),
            command: "test".into(),
            seed: 1,
            config_hash: "00".into(),
        }
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.985075), "0.985075");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(7.186e-8), "7.186e-8");
        assert_eq!(format_float(3356.123456789012), "3356.12345679");
        assert_eq!(format_float(1e12), "1e12");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(9.999999999999995), "10");
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable::new(meta(), &["a", "b,c"]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,\"b,c\"\r\n");
    }

    #[test]
    fn csv_quotes_per_rfc_4180() {
        let mut t = ResultTable::new(meta(), &["x", "label"]);
        t.push(vec![0.5.into(), "say \"hi\"".into()]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,label\r\n0.5,\"say \"\"hi\"\"\"\r\n"
        );
    }

    #[test]
    fn json_round_trip() {
        let mut t = ResultTable::new(meta(), &["n", "f", "ok", "name", "missing"]);
        t.push(vec![3u64.into(), 0.25.into(), true.into(), "a".into(), Cell::Null]);
        t.push(vec![4u64.into(), 1.0.into(), false.into(), "b".into(), Cell::Null]);
        let mut buf = Vec::new();
        t.write_json(&mut buf).unwrap();
        let back: ResultTable = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = ResultTable::new(meta(), &["a", "b"]);
        t.rows.push(vec![1u64.into()]);
        assert!(matches!(t.write_csv(Vec::new()), Err(EmitError::Ragged { .. })));
    }
}
