//! Versioned JSON envelopes, fixed-precision floats and output routing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

/// Rounds every float in `v` to `digits` significant digits.
pub fn round_floats(v: Value, digits: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let rounded: f64 = format!("{x:.prec$e}", prec = digits.saturating_sub(1))
                .parse()
                .unwrap_or(x);
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(|x| round_floats(x, digits)).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, x)| (k, round_floats(x, digits))).collect()),
        other => other,
    }
}

/// `{"schema": 1, "command": ..., "seed": ..., "passed": ..., <body>}`.
pub fn envelope<T: Serialize>(command: &str, seed: u64, passed: bool, body: &T, digits: usize) -> Result<Value> {
    let mut m = Map::new();
    m.insert("schema".into(), Value::from(SCHEMA_VERSION));
    m.insert("command".into(), Value::from(command));
    m.insert("seed".into(), Value::from(seed));
    m.insert("passed".into(), Value::from(passed));
    match serde_json::to_value(body)? {
        Value::Object(fields) => m.extend(fields),
        other => {
            m.insert("report".into(), other);
        }
    }
    Ok(round_floats(Value::Object(m), digits))
}

/// Destination of a report: an explicit path, `<dir>/<command>.json` under
/// the default output directory, or stdout.
pub fn destination(out: Option<&Path>, out_dir: Option<&Path>, command: &str) -> Option<PathBuf> {
    match (out, out_dir) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(format!("{command}.json"))),
        (None, None) => None,
    }
}

pub fn emit(value: &Value, dest: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match dest {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_integers_and_strings() {
        let v = serde_json::json!({"a": 0.1234567891234567, "b": 3, "c": "x", "d": [1.0e-20, -2.5]});
        let r = round_floats(v, 6);
        assert_eq!(r["a"], serde_json::json!(0.123457));
        assert_eq!(r["b"], serde_json::json!(3));
        assert_eq!(r["c"], serde_json::json!("x"));
        assert_eq!(r["d"][1], serde_json::json!(-2.5));
    }

    #[test]
    fn destination_precedence() {
        let d = Path::new("/tmp/out");
        assert_eq!(destination(None, Some(d), "optimize"), Some(d.join("optimize.json")));
        assert_eq!(destination(Some(Path::new("x.json")), Some(d), "optimize"), Some(PathBuf::from("x.json")));
        assert_eq!(destination(None, None, "optimize"), None);
    }
}
