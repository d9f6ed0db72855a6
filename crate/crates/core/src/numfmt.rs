//! Fixed number formatting for CSV and JSON output: 17 significant digits,
//! so values round-trip exactly and output is byte-stable.

use serde_json::{Number, Value};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number with the same digits as [`num`]; non-finite values become null.
pub fn json_num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    serde_json::from_str::<Number>(&num(x)).map(Value::Number).unwrap_or(Value::Null)
}
