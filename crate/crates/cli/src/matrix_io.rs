//! JSON matrix files: `{"rows": m, "cols": n, "re": [[...]], "im": [[...]]}`
//! with `im` optional.

use std::path::Path;

use num_complex::Complex;
use serde_json::{json, Map, Value};
use twoproj::Mat;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{origin}: {source}")]
    Io { origin: String, source: std::io::Error },
    #[error("{origin}:{line}:{column}: {message}")]
    Syntax { origin: String, line: usize, column: usize, message: String },
    #[error("{origin}: {message}")]
    Format { origin: String, message: String },
    #[error("{origin}:{line}: {message}")]
    Shape { origin: String, line: usize, message: String },
}

pub fn parse_matrix(path: &Path) -> Result<Mat, InputError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io { origin: origin.clone(), source })?;
    parse_matrix_str(&text, &origin)
}

/// Parses matrix JSON; `origin` names the source in error messages.
pub fn parse_matrix_str(text: &str, origin: &str) -> Result<Mat, InputError> {
    let value: Value = serde_json::from_str(text).map_err(|e| InputError::Syntax {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let fail = |message: String| InputError::Format { origin: origin.to_string(), message };
    let obj = value.as_object().ok_or_else(|| fail("expected a JSON object".into()))?;
    let dim = |key: &str| -> Result<usize, InputError> {
        obj.get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| fail(format!("\"{key}\" must be a nonnegative integer")))
    };
    let rows = dim("rows")?;
    let cols = dim("cols")?;
    let re = obj.get("re").ok_or_else(|| fail("missing \"re\"".into()))?;
    let located = |key: &str, (row, message): (Option<usize>, String)| match row.and_then(|i| row_line(text, key, i)) {
        Some(line) => InputError::Shape { origin: origin.to_string(), line, message },
        None => fail(message),
    };
    let re = read_block(re, "re", rows, cols).map_err(|e| located("re", e))?;
    let im = match obj.get("im") {
        None | Some(Value::Null) => vec![0.0; rows * cols],
        Some(v) => read_block(v, "im", rows, cols).map_err(|e| located("im", e))?,
    };
    Ok(Mat::from_fn(rows, cols, |i, j| Complex::new(re[i * cols + j], im[i * cols + j])))
}

/// 1-based line of the `i`-th row of the array stored under `key`.
fn row_line(text: &str, key: &str, i: usize) -> Option<usize> {
    let start = text.find(&format!("\"{key}\""))?;
    let mut depth = 0usize;
    let mut seen = 0usize;
    for (off, ch) in text[start..].char_indices() {
        match ch {
            '[' => {
                depth += 1;
                if depth == 2 {
                    if seen == i {
                        return Some(text[..start + off].matches('\n').count() + 1);
                    }
                    seen += 1;
                }
            }
            ']' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    None
}

type BlockError = (Option<usize>, String);

fn read_block(v: &Value, key: &str, rows: usize, cols: usize) -> Result<Vec<f64>, BlockError> {
    let outer = v.as_array().ok_or_else(|| (None, format!("\"{key}\" must be an array of rows")))?;
    if outer.len() != rows {
        return Err((None, format!("\"{key}\" has {} rows, expected {rows}", outer.len())));
    }
    let mut out = Vec::with_capacity(rows * cols);
    for (i, row) in outer.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| (Some(i), format!("\"{key}\" row {i} is not an array")))?;
        if row.len() != cols {
            return Err((Some(i), format!("\"{key}\" row {i} has {} entries, expected {cols}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            let x = x.as_f64().ok_or_else(|| (Some(i), format!("\"{key}\"[{i}][{j}] is not a number")))?;
            if !x.is_finite() {
                return Err((Some(i), format!("\"{key}\"[{i}][{j}] is not finite")));
            }
            out.push(x);
        }
    }
    Ok(out)
}

/// Matrix in the file format; `im` is omitted when every imaginary part is zero.
pub fn matrix_json(m: &Mat) -> Value {
    let block = |f: fn(&Complex<f64>) -> f64| -> Value {
        Value::Array(
            (0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| json!(f(&m[(i, j)]))).collect())).collect(),
        )
    };
    let mut obj = Map::new();
    obj.insert("rows".into(), json!(m.nrows()));
    obj.insert("cols".into(), json!(m.ncols()));
    obj.insert("re".into(), block(|z| z.re));
    if m.iter().any(|z| z.im != 0.0) {
        obj.insert("im".into(), block(|z| z.im));
    }
    Value::Object(obj)
}
