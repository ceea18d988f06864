use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1.0";

/// Rows of a tabular payload. Exact rationals are strings, floats are numbers.
#[derive(Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.headers.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>()))
            .collect();
        Value::Array(rows)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// What a command produced, before it is wrapped in the envelope.
#[derive(Debug)]
pub struct Report {
    pub results: Value,
    pub table: Option<Table>,
    pub provenance: Vec<String>,
    /// Set when a check ran but did not hold.
    pub failure: Option<String>,
}

impl Report {
    pub fn new(results: Value, provenance: &[&str]) -> Self {
        Self { results, table: None, provenance: provenance.iter().map(|s| s.to_string()).collect(), failure: None }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

pub fn envelope(command: &str, params: Value, report: &Report) -> Value {
    let mut results = report.results.clone();
    if let (Some(t), Value::Object(map)) = (&report.table, &mut results) {
        map.insert("rows".into(), t.to_json());
    }
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": params,
        "results": results,
        "provenance": report.provenance,
    })
}
