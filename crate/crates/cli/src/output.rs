//! Canonical JSON: sorted keys, floats rounded to 12 significant digits.

use serde::Serialize;
use serde_json::Value;

pub const SIG_DIGITS: usize = 12;

pub fn round_sig(f: f64) -> f64 {
    if !f.is_finite() || f == 0.0 {
        return f;
    }
    format!("{:.*e}", SIG_DIGITS - 1, f).parse().unwrap_or(f)
}

fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = round_sig(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(f).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        // serde_json's default map is ordered by key.
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

pub fn to_canonical<T: Serialize>(t: &T) -> String {
    let v = serde_json::to_value(t).expect("report serializes");
    let mut s = serde_json::to_string_pretty(&canonical(v)).expect("value serializes");
    s.push('\n');
    s
}
