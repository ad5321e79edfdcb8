//! Serialization of results: versioned JSON documents and CSV tables.
//!
//! Floating-point numbers are written with 9 significant digits so that
//! reruns are byte-identical across platforms.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::Result;
use crate::lattice::SparseOperator;
use crate::scalar::Real;

pub const SCHEMA_VERSION: &str = "o3sim/1";
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float")
}

/// Rounds every non-integer number in a JSON tree.
pub fn round_value(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| Number::from_f64(round_significant(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// A number as it appears in CSV cells: shortest round-trip form of the
/// rounded value, `NaN`/`inf` spelled out.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        Number::from_f64(round_significant(x)).expect("finite").to_string()
    }
}

/// `{"schema", "kind", "config", "result"}` with rounded numbers.
pub fn document<C: Serialize, T: Serialize>(kind: &str, config: &C, result: &T) -> Result<Value> {
    let mut map = Map::new();
    map.insert("schema".into(), Value::String(SCHEMA_VERSION.into()));
    map.insert("kind".into(), Value::String(kind.into()));
    map.insert("config".into(), round_value(serde_json::to_value(config)?));
    map.insert("result".into(), round_value(serde_json::to_value(result)?));
    Ok(Value::Object(map))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(value: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes a CSV table preceded by a `# schema=… config=…` comment line.
pub fn write_csv<W: Write, C: Serialize>(
    mut out: W,
    config: &C,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let config = serde_json::to_string(&round_value(serde_json::to_value(config)?))?;
    writeln!(out, "# schema={SCHEMA_VERSION} config={config}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Numeric cells of a row.
pub fn cells<R: Real>(values: &[R]) -> Vec<String> {
    values.iter().map(|v| format_number(v.to_f64_lossy())).collect()
}

/// Coordinate-list dump `(row, col, re, im)`, sorted row-major, at full
/// precision. Meant for debugging; the layout is not a stable format.
pub fn write_operator_coo<W: Write, R: Real>(mut out: W, op: &SparseOperator<R>) -> Result<()> {
    writeln!(out, "# dimension={} nnz={}", op.dimension(), op.nnz())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "re", "im"])?;
    for (r, c, v) in op.entries() {
        w.write_record([
            r.to_string(),
            c.to_string(),
            format!("{:e}", v.re.to_f64_lossy()),
            format!("{:e}", v.im.to_f64_lossy()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
