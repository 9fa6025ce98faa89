use clap::ValueEnum;
use ncqm_core::report::DataTable;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A flat result: ordered named fields.
#[derive(Debug, Default)]
pub struct Record {
    fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new(command: &str, status: &str) -> Self {
        let mut r = Self::default();
        r.push("command", command);
        r.push("status", status);
        r
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let keys: Vec<&str> = self.fields.iter().map(|(k, _)| k.as_str()).collect();
                let values: Vec<String> = self.fields.iter().map(|(_, v)| csv_field(v)).collect();
                format!("{}\n{}\n", keys.join(","), values.join(","))
            }
            Format::Json => {
                let map: Map<String, Value> = self.fields.iter().cloned().collect();
                let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => csv_field(&Value::String(other.to_string())),
    }
}

pub fn render_table(table: &DataTable, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = table.to_json();
            s.push('\n');
            s
        }
    }
}

/// Records sharing the same keys, one CSV line each.
pub fn render_records(records: &[Record], format: Format) -> String {
    match format {
        Format::Csv => {
            let Some(first) = records.first() else {
                return String::new();
            };
            let keys: Vec<&str> = first.fields.iter().map(|(k, _)| k.as_str()).collect();
            let mut out = keys.join(",");
            out.push('\n');
            for r in records {
                let values: Vec<String> = r.fields.iter().map(|(_, v)| csv_field(v)).collect();
                out.push_str(&values.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let list: Vec<Value> = records
                .iter()
                .map(|r| Value::Object(r.fields.iter().cloned().collect()))
                .collect();
            let mut s = serde_json::to_string_pretty(&list).expect("serializable");
            s.push('\n');
            s
        }
    }
}
