//! JSON and plain-table renderings of command results.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::CliError;

/// Prints `value` as pretty JSON or as an aligned key/value table.
pub fn emit<T: Serialize>(value: &T, format: Format) -> Result<(), CliError> {
    let v = serde_json::to_value(value)?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&v)? + "\n",
        Format::Table => table(&v),
    };
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn table(v: &Value) -> String {
    let Value::Object(map) = v else { return format!("{}\n", scalar(v)) };
    let mut out = String::new();
    let is_nested = |val: &Value| matches!(val, Value::Array(rows) if rows.iter().any(Value::is_object));
    let width = map.iter().filter(|(_, v)| !is_nested(v)).map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut nested = Vec::new();
    for (k, val) in map {
        match val {
            Value::Array(rows) if is_nested(val) => nested.push((k, rows)),
            Value::Array(rows) if rows.iter().any(Value::is_array) => {
                out.push_str(&format!("{k:<width$}\n"));
                for r in rows {
                    out.push_str(&format!("{:<width$}  {}\n", "", scalar(r)));
                }
            }
            _ => out.push_str(&format!("{k:<width$}  {}\n", scalar(val))),
        }
    }
    for (k, rows) in nested {
        out.push_str(&format!("\n{k}\n"));
        let cols: Vec<String> = match rows.first() {
            Some(Value::Object(m)) => m.keys().cloned().collect(),
            _ => continue,
        };
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| cols.iter().map(|c| r.get(c).map(scalar).unwrap_or_default()).collect())
            .collect();
        let widths: Vec<usize> =
            (0..cols.len()).map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(0).max(cols[j].len())).collect();
        let line = |r: &[String]| r.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ");
        out.push_str(&line(&cols));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn table_layout() {
        let t = table(&json!({"a": 1.5, "bb": [1, 2], "rows": [{"x": 1, "y": "p"}, {"x": 22, "y": "q"}]}));
        assert!(t.starts_with("a   1.5\nbb  1 2\n"), "{t}");
        assert!(t.contains("\nrows\n x  y\n 1  p\n22  q\n"), "{t}");
    }
}
