//! Serialization of command results.
//!
//! JSON documents are pretty-printed with serde's shortest round-trip float
//! form. CSV output uses one row per `(beta, quantity)` pair under the fixed
//! header `beta,quantity,index,value`; `index` is only set for list-valued
//! quantities and `beta` is empty for temperature-independent ones.

use anyhow::Result;
use serde::Serialize;

pub const CSV_HEADER: [&str; 4] = ["beta", "quantity", "index", "value"];

#[derive(Debug, Default)]
pub struct CsvTable {
    rows: Vec<[String; 4]>,
}

impl CsvTable {
    pub fn scalar(&mut self, beta: Option<f64>, quantity: &str, value: f64) {
        self.rows.push([
            fmt_opt(beta),
            quantity.to_string(),
            String::new(),
            fmt(value),
        ]);
    }

    pub fn list(&mut self, beta: Option<f64>, quantity: &str, values: &[f64]) {
        for (i, &v) in values.iter().enumerate() {
            self.rows
                .push([fmt_opt(beta), quantity.to_string(), i.to_string(), fmt(v)]);
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(w.into_inner()?)
    }
}

/// Shortest representation that parses back to the same `f64`.
fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}
