//! Canonical JSON: sorted keys, two-space indentation, floats with 17
//! significant digits, non-finite floats as strings.

use std::fmt::Write;

use serde_json::{Number, Value};

pub fn to_canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn number(n: &Number) -> String {
    if let Some(i) = n.as_i64() {
        return i.to_string();
    }
    if let Some(u) = n.as_u64() {
        return u.to_string();
    }
    float(n.as_f64().unwrap_or(f64::NAN))
}

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("\"{x}\"")
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&number(n)),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, x, depth);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(depth + 1), Value::String((*k).clone()));
                write_value(out, &map[*k], depth + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

/// Aligned `key  value` lines; nested objects use dotted keys and arrays of
/// records with an `id` become tables.
pub fn to_text(v: &Value) -> String {
    let mut lines: Vec<(String, String)> = Vec::new();
    let mut tables = String::new();
    flatten("", v, &mut lines, &mut tables);
    let width = lines.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, val) in &lines {
        let _ = writeln!(out, "{k:<width$}  {val}");
    }
    out.push_str(&tables);
    out
}

fn is_matrix(v: &Value) -> bool {
    v.get("rows").is_some() && v.get("cols").is_some() && v.get("re").is_some()
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn matrix_text(v: &Value) -> String {
    let rows = v["re"].as_array().cloned().unwrap_or_default();
    let im = v.get("im").and_then(Value::as_array).cloned();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        out.push_str("\n    ");
        for (j, x) in row.as_array().into_iter().flatten().enumerate() {
            let re = x.as_f64().unwrap_or(f64::NAN);
            match im.as_ref().and_then(|m| m[i][j].as_f64()) {
                Some(b) if b != 0.0 => {
                    let _ = write!(out, "{:>12.6}{:+.6}i ", re, b);
                }
                _ => {
                    let _ = write!(out, "{re:>12.6} ");
                }
            }
        }
    }
    out
}

fn flatten(prefix: &str, v: &Value, lines: &mut Vec<(String, String)>, tables: &mut String) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) if is_matrix(v) => {
            let label = format!("{}x{}", map["rows"], map["cols"]);
            lines.push((prefix.to_string(), format!("{label}{}", matrix_text(v))));
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for k in keys {
                flatten(&key(k), &map[k], lines, tables);
            }
        }
        Value::Array(items) if !items.is_empty() && items.iter().all(|x| x.get("id").is_some()) => {
            table(prefix, items, tables);
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, lines, tables);
            }
        }
        Value::Array(items) => {
            let vals: Vec<String> = items.iter().map(scalar_text).collect();
            lines.push((prefix.to_string(), vals.join(" ")));
        }
        other => lines.push((prefix.to_string(), scalar_text(other))),
    }
}

fn table(title: &str, rows: &[Value], out: &mut String) {
    let mut cols: Vec<String> = vec!["id".into()];
    for r in rows {
        if let Some(map) = r.as_object() {
            let mut keys: Vec<&String> = map.keys().filter(|k| *k != "id" && *k != "description").collect();
            keys.sort();
            for k in keys {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    let cells: Vec<Vec<String>> =
        rows.iter().map(|r| cols.iter().map(|c| r.get(c).map(scalar_text).unwrap_or_default()).collect()).collect();
    let widths: Vec<usize> = (0..cols.len())
        .map(|j| cells.iter().map(|row| row[j].len()).chain([cols[j].len()]).max().unwrap_or(0))
        .collect();
    let _ = writeln!(out, "\n{title}");
    let line = |row: &[String]| {
        row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(&cols));
    for row in &cells {
        let _ = writeln!(out, "{}", line(row));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_keys_and_fixed_floats() {
        let v = json!({"b": 0.8, "a": [1, 2.5], "c": {"z": true, "y": null}});
        let s = to_canonical(&v);
        assert_eq!(
            s,
            "{\n  \"a\": [1, 2.5000000000000000e0],\n  \"b\": 8.0000000000000004e-1,\n  \"c\": {\n    \"y\": null,\n    \"z\": true\n  }\n}\n"
        );
    }

    #[test]
    fn text_tables() {
        let v = json!({"pass": true, "properties": [{"id": "a", "pass": true}, {"id": "bb", "pass": false}]});
        let t = to_text(&v);
        assert!(t.starts_with("pass  true\n"));
        assert!(t.contains("bb  false"));
    }
}
