//! Report envelope and serialization helpers. Reports carry the artifact
//! version, the effective configuration, and (in JSON) a timestamp; the
//! payload below those fields is byte-stable for a fixed seed regardless
//! of worker count.

use serde::Serialize;
use serde_json::{json, Value};
use std::time::{SystemTime, UNIX_EPOCH};

use rawcode_core::interval::IntervalSet;
use rawcode_core::rational::{format_rational, to_f64, Rational};

pub fn envelope(command: &str, config: Value, result: Value) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "generated_at_unix_ms": SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0),
        "config": config,
        "result": result,
    })
}

/// CSV header comments: version and config, no timestamp (CSV output is
/// fully byte-stable).
pub fn csv_header(command: &str, config: &Value) -> String {
    format!(
        "# version={} command={command} config={config}\n",
        env!("CARGO_PKG_VERSION")
    )
}

pub fn rational_value(r: &Rational) -> Value {
    json!({ "exact": format_rational(r), "value": to_f64(r) })
}

pub fn interval_set_value(s: &IntervalSet) -> Value {
    Value::Array(
        s.spans()
            .iter()
            .map(|iv| json!([format_rational(iv.lo()), format_rational(iv.hi())]))
            .collect(),
    )
}

pub fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize")
}
