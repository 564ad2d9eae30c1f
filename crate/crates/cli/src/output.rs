//! Record sinks: CSV with a fixed header, or one JSON object per line with
//! the same keys.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

/// One cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Float(v) => float_text(*v),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
            Field::Missing => "NA".into(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Int(v) => Value::Number((*v).into()),
            Field::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Field::Text(s) => Value::String(s.clone()),
            Field::Bool(b) => Value::Bool(*b),
            Field::Missing => Value::Null,
        }
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.into())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(v: Option<T>) -> Self {
        v.map_or(Field::Missing, Into::into)
    }
}

/// 17 significant digits.
pub fn float_text(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub struct Sink<'a> {
    columns: Vec<&'static str>,
    csv: Option<csv::Writer<&'a mut dyn Write>>,
    out: Option<&'a mut dyn Write>,
    rows: u64,
}

impl<'a> Sink<'a> {
    /// Writes the CSV header immediately, so empty outputs still carry it.
    pub fn new(format: Format, columns: &[&'static str], out: &'a mut dyn Write) -> io::Result<Self> {
        let mut sink = Sink {
            columns: columns.to_vec(),
            csv: None,
            out: None,
            rows: 0,
        };
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().from_writer(out);
                w.write_record(columns)?;
                sink.csv = Some(w);
            }
            Format::Jsonl => sink.out = Some(out),
        }
        Ok(sink)
    }

    pub fn row(&mut self, fields: Vec<Field>) -> io::Result<()> {
        assert_eq!(fields.len(), self.columns.len(), "row width");
        self.rows += 1;
        if let Some(w) = self.csv.as_mut() {
            w.write_record(fields.iter().map(Field::csv))?;
        } else if let Some(out) = self.out.as_mut() {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .zip(&fields)
                .map(|(k, f)| (k.to_string(), f.json()))
                .collect();
            serde_json::to_writer(&mut *out, &Value::Object(obj))?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    pub fn finish(mut self) -> io::Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.flush()?;
        }
        if let Some(out) = self.out.as_mut() {
            out.flush()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_jsonl_rows() {
        let mut buf = Vec::new();
        let mut s = Sink::new(Format::Csv, &["a", "b", "c"], &mut buf).unwrap();
        s.row(vec![1u64.into(), 0.5.into(), Field::Missing]).unwrap();
        s.finish().unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b,c\n1,5.0000000000000000e-1,NA\n");

        let mut buf = Vec::new();
        let mut s = Sink::new(Format::Jsonl, &["a", "b"], &mut buf).unwrap();
        s.row(vec!["x".into(), Field::Missing]).unwrap();
        s.finish().unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "{\"a\":\"x\",\"b\":null}\n");
    }
}
