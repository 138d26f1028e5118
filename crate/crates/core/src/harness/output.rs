//! Plot-ready output. Every numeric cell is written with 17 significant
//! digits, which round-trips any f64 exactly. The effective configuration is
//! echoed as a `# config: {json}` line at the top of CSV files and as the
//! `config` member of JSON files.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::pipeline::Comparison;
use crate::error::{Error, Result};
use crate::prediction::Theory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

/// Column order of sweep tables.
pub const SWEEP_COLUMNS: [&str; 18] = [
    "value",
    "omega_m",
    "omega_sn",
    "eps2",
    "n",
    "t_p",
    "T_wait",
    "temperature_K",
    "Q",
    "P0_QM",
    "P0_SN",
    "P0_CWL",
    "P0_SN_exact",
    "p0_thermal",
    "thermal_regime_ok",
    "sn_regime_ok",
    "cwl_regime_ok",
    "T_over_Q_max_K",
];

/// A numeric table with named columns. Flags are stored as 0/1 and missing
/// values as NaN.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::param("row", format!("expected {} cells, got {}", self.columns.len(), row.len())));
        }
        self.rows.push(row);
        Ok(())
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn sweep_row(value: f64, c: &Comparison) -> Vec<f64> {
    let p = &c.params;
    let sn = c.prediction(Theory::Sn);
    let cwl = c.prediction(Theory::Cwl);
    vec![
        value,
        p.omega_m,
        p.omega_sn,
        p.eps2,
        f64::from(p.pulse.n),
        p.pulse.t_p,
        p.pulse.t_wait,
        p.temperature,
        p.q_factor,
        c.prediction(Theory::Qm).p0,
        sn.p0,
        cwl.p0,
        c.sn_p0_exact,
        c.thermal.p0_th,
        flag(c.thermal.regime_ok),
        flag(sn.diagnostics.regime_ok),
        flag(cwl.diagnostics.regime_ok),
        c.feasibility.map_or(f64::NAN, |f| f.t_over_q_max_k),
    ]
}

pub fn sweep_table(results: &[(f64, Comparison)]) -> Table {
    Table { columns: SWEEP_COLUMNS.iter().map(|c| c.to_string()).collect(), rows: results.iter().map(|(v, c)| sweep_row(*v, c)).collect() }
}

/// A single comparison as a one-row table: the sweep columns without `value`.
pub fn comparison_table(c: &Comparison) -> Table {
    Table { columns: SWEEP_COLUMNS[1..].iter().map(|c| c.to_string()).collect(), rows: vec![sweep_row(f64::NAN, c)[1..].to_vec()] }
}

/// Format with 17 significant digits.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn json_number(v: f64) -> Value {
    // serde_json has no NaN; missing values become null
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn emit<W: Write>(table: &Table, format: Format, config: &Value, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "# config: {}", serde_json::to_string(config)?)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|&v| format_number(v)))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Object(table.columns.iter().cloned().zip(r.iter().map(|&v| json_number(v))).collect()))
                .collect();
            let doc = serde_json::json!({ "config": config, "columns": table.columns, "rows": rows });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Read back a table written by [`emit`].
pub fn read_table<R: Read>(format: Format, input: R) -> Result<Table> {
    match format {
        Format::Csv => {
            let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
            let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
            let mut rows = vec![];
            for rec in r.records() {
                let rec = rec?;
                let row = rec
                    .iter()
                    .map(|s| s.parse::<f64>().map_err(|e| Error::param("csv", format!("bad number `{s}`: {e}"))))
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
            }
            Ok(Table { columns, rows })
        }
        Format::Json => {
            let doc: Value = serde_json::from_reader(input)?;
            let columns: Vec<String> = serde_json::from_value(doc["columns"].clone())?;
            let rows = doc["rows"]
                .as_array()
                .ok_or_else(|| Error::param("json", "missing rows"))?
                .iter()
                .map(|r| columns.iter().map(|c| r[c].as_f64().unwrap_or(f64::NAN)).collect())
                .collect();
            Ok(Table { columns, rows })
        }
    }
}
