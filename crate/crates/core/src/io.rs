//! File formats.
//!
//! JSON is canonical. A complex number is a `[re, im]` pair and a matrix is a
//! row-major array of rows:
//!
//! ```text
//! {"dimension": 2, "matrix": [[[1, 0], [0.3, -0.1]], [[0.3, 0.1], [1, 0]]]}
//! ```
//!
//! Density matrices use the key `"rho"`. Floats are written in shortest
//! round-trip form, so writing and re-reading is exact. CSV is accepted for
//! channel matrices: one row per line, entries `a`, `bi`, `a+bi` or `a-bi`
//! with optional whitespace (`j` is accepted for `i`).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::extremal::EnvironmentModel;
use crate::linalg::{CMatrix, CVector};
use crate::markov::LindbladData;
use crate::symmetry::SymmetrySpec;

/// A malformed input, with the place it was found.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub location: String,
    pub message: String,
}

impl ParseError {
    fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { location: location.into(), message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// `.csv` paths are CSV; anything else is JSON.
    pub fn from_path(path: &str) -> Self {
        if path.to_ascii_lowercase().ends_with(".csv") {
            Format::Csv
        } else {
            Format::Json
        }
    }

    /// JSON when the first non-blank character opens an object.
    pub fn sniff(text: &str) -> Self {
        if text.trim_start().starts_with('{') {
            Format::Json
        } else {
            Format::Csv
        }
    }
}

fn parse_json(text: &str) -> Result<Value, ParseError> {
    serde_json::from_str(text)
        .map_err(|e| ParseError::new(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value, ParseError> {
    let map = obj.as_object().ok_or_else(|| ParseError::new("document", "expected a JSON object"))?;
    map.get(key).ok_or_else(|| ParseError::new(format!("field `{key}`"), "missing"))
}

fn number(v: &Value, loc: &str) -> Result<f64, ParseError> {
    let x = v.as_f64().ok_or_else(|| ParseError::new(loc, format!("expected a number, found {v}")))?;
    if !x.is_finite() {
        return Err(ParseError::new(loc, "value is not finite"));
    }
    Ok(x)
}

fn count(v: &Value, loc: &str) -> Result<usize, ParseError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| ParseError::new(loc, format!("expected a non-negative integer, found {v}")))
}

fn array<'a>(v: &'a Value, loc: &str) -> Result<&'a Vec<Value>, ParseError> {
    v.as_array().ok_or_else(|| ParseError::new(loc, "expected an array"))
}

fn complex(v: &Value, loc: &str) -> Result<Complex64, ParseError> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Complex64::new(number(re, loc)?, number(im, loc)?)),
        _ => Err(ParseError::new(loc, format!("expected a [re, im] pair, found {v}"))),
    }
}

fn complex_vector(v: &Value, loc: &str) -> Result<CVector, ParseError> {
    let items = array(v, loc)?;
    let entries = items
        .iter()
        .enumerate()
        .map(|(i, x)| complex(x, &format!("{loc}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CVector::from_vec(entries))
}

fn complex_matrix(v: &Value, loc: &str) -> Result<CMatrix, ParseError> {
    let rows = array(v, loc)?;
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, row)| complex_vector(row, &format!("{loc}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let cols = parsed.first().map_or(0, |r| r.len());
    if let Some(i) = parsed.iter().position(|r| r.len() != cols) {
        return Err(ParseError::new(format!("{loc}[{i}]"), format!("row has {} entries, expected {cols}", parsed[i].len())));
    }
    Ok(CMatrix::from_fn(parsed.len(), cols, |i, j| parsed[i][j]))
}

fn real_matrix(v: &Value, loc: &str) -> Result<DMatrix<f64>, ParseError> {
    let rows = array(v, loc)?;
    let mut parsed = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let items = array(row, &format!("{loc}[{i}]"))?;
        let r = items
            .iter()
            .enumerate()
            .map(|(j, x)| number(x, &format!("{loc}[{i}][{j}]")))
            .collect::<Result<Vec<_>, _>>()?;
        parsed.push(r);
    }
    let cols = parsed.first().map_or(0, Vec::len);
    if let Some(i) = parsed.iter().position(|r| r.len() != cols) {
        return Err(ParseError::new(format!("{loc}[{i}]"), format!("row has {} entries, expected {cols}", parsed[i].len())));
    }
    Ok(DMatrix::from_fn(parsed.len(), cols, |i, j| parsed[i][j]))
}

fn square_with_dimension(doc: &Value, key: &str) -> Result<CMatrix, ParseError> {
    let n = count(field(doc, "dimension")?, "field `dimension`")?;
    let m = complex_matrix(field(doc, key)?, key)?;
    if m.nrows() != n || m.ncols() != n {
        return Err(ParseError::new(
            "field `dimension`",
            format!("declares {n} but `{key}` is {}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(m)
}

/// A complex literal `a`, `bi`, `a+bi`, `a-bi`; whitespace is ignored.
pub fn parse_complex_literal(s: &str) -> Result<Complex64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty entry".into());
    }
    let z = Complex64::from_str(&compact).map_err(|_| format!("`{s}` is not a complex literal"))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(z)
}

fn parse_csv_matrix(text: &str) -> Result<CMatrix, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            ParseError::new(format!("line {line}"), e.to_string())
        })?;
        let line = record.position().map_or(rows.len() as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, s)| parse_complex_literal(s).map_err(|m| ParseError::new(format!("line {line}, entry {}", j + 1), m)))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(ParseError::new(
                    format!("line {line}"),
                    format!("{} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    if rows.len() != cols {
        return Err(ParseError::new("document", format!("{}x{cols} matrix is not square", rows.len())));
    }
    Ok(CMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

/// The raw channel matrix; validity is checked separately.
pub fn parse_channel(text: &str, format: Format) -> Result<CMatrix, ParseError> {
    match format {
        Format::Json => square_with_dimension(&parse_json(text)?, "matrix"),
        Format::Csv => parse_csv_matrix(text),
    }
}

pub fn parse_density(text: &str) -> Result<CMatrix, ParseError> {
    square_with_dimension(&parse_json(text)?, "rho")
}

pub fn complex_to_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn vector_to_value(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| complex_to_value(*z)).collect())
}

/// Row-major `[[[re, im], …], …]`.
pub fn matrix_to_value(m: &CMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_value(m[(i, j)])).collect())).collect())
}

fn real_matrix_to_value(m: &DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| json!(m[(i, j)])).collect())).collect())
}

pub fn channel_to_value(m: &CMatrix) -> Value {
    json!({"dimension": m.nrows(), "matrix": matrix_to_value(m)})
}

pub fn density_to_value(m: &CMatrix) -> Value {
    json!({"dimension": m.nrows(), "rho": matrix_to_value(m)})
}

pub fn write_channel(m: &CMatrix) -> String {
    serde_json::to_string(&channel_to_value(m)).expect("finite values serialize")
}

/// CSV rows of `a+bi` literals in shortest round-trip form.
pub fn write_channel_csv(m: &CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| {
                let z = m[(i, j)];
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                format!("{:?}{sign}{:?}i", z.re, z.im.abs())
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `{"frequencies": [ω_n], "vectors": [l_n as [[re, im], …]]}`.
pub fn parse_lindblad(text: &str) -> Result<LindbladData, ParseError> {
    let doc = parse_json(text)?;
    let freqs = array(field(&doc, "frequencies")?, "frequencies")?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("frequencies[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let vectors = array(field(&doc, "vectors")?, "vectors")?
        .iter()
        .enumerate()
        .map(|(i, x)| complex_vector(x, &format!("vectors[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    LindbladData::from_vectors(freqs, &vectors).map_err(|e| ParseError::new("document", e.to_string()))
}

pub fn lindblad_to_value(data: &LindbladData) -> Value {
    json!({
        "frequencies": data.frequencies(),
        "vectors": (0..data.dimension()).map(|n| vector_to_value(&data.vector(n))).collect::<Vec<_>>(),
    })
}

/// `{"qubits": q, "vectors": [b_0, …, b_q]}`.
pub fn parse_symmetry_spec(text: &str) -> Result<SymmetrySpec, ParseError> {
    let doc = parse_json(text)?;
    let qubits = count(field(&doc, "qubits")?, "field `qubits`")?;
    let vectors = array(field(&doc, "vectors")?, "vectors")?
        .iter()
        .enumerate()
        .map(|(i, x)| complex_vector(x, &format!("vectors[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    SymmetrySpec::new(qubits, vectors).map_err(|e| ParseError::new("document", e.to_string()))
}

pub fn symmetry_spec_to_value(spec: &SymmetrySpec) -> Value {
    json!({"qubits": spec.qubits(), "vectors": spec.vectors().iter().map(vector_to_value).collect::<Vec<_>>()})
}

fn matrix_list(doc: &Value, key: &str) -> Result<Vec<CMatrix>, ParseError> {
    array(field(doc, key)?, key)?
        .iter()
        .enumerate()
        .map(|(i, x)| complex_matrix(x, &format!("{key}[{i}]")))
        .collect()
}

/// Environment model JSON. Keys: `qudit_dimension`, `reservoir_dimension`,
/// `system_a`, `system_b`, `reservoir` (lists of complex matrices),
/// `kappa_a`, `kappa_b` (real matrices), `h_reservoir`, `psi0`, `time`, and
/// an optional diagonal `h_system` (zero when absent).
pub fn parse_environment_model(text: &str) -> Result<EnvironmentModel, ParseError> {
    let doc = parse_json(text)?;
    let d = count(field(&doc, "qudit_dimension")?, "field `qudit_dimension`")?;
    let dr = count(field(&doc, "reservoir_dimension")?, "field `reservoir_dimension`")?;
    let h_system = match doc.get("h_system") {
        Some(v) => complex_matrix(v, "h_system")?,
        None => CMatrix::zeros(d * d, d * d),
    };
    Ok(EnvironmentModel {
        qudit_dimension: d,
        reservoir_dimension: dr,
        system_a: matrix_list(&doc, "system_a")?,
        system_b: matrix_list(&doc, "system_b")?,
        reservoir: matrix_list(&doc, "reservoir")?,
        kappa_a: real_matrix(field(&doc, "kappa_a")?, "kappa_a")?,
        kappa_b: real_matrix(field(&doc, "kappa_b")?, "kappa_b")?,
        h_system,
        h_reservoir: complex_matrix(field(&doc, "h_reservoir")?, "h_reservoir")?,
        psi0: complex_vector(field(&doc, "psi0")?, "psi0")?,
        time: number(field(&doc, "time")?, "field `time`")?,
    })
}

pub fn environment_model_to_value(m: &EnvironmentModel) -> Value {
    let list = |ops: &[CMatrix]| Value::Array(ops.iter().map(matrix_to_value).collect());
    let mut map = Map::new();
    map.insert("qudit_dimension".into(), json!(m.qudit_dimension));
    map.insert("reservoir_dimension".into(), json!(m.reservoir_dimension));
    map.insert("system_a".into(), list(&m.system_a));
    map.insert("system_b".into(), list(&m.system_b));
    map.insert("reservoir".into(), list(&m.reservoir));
    map.insert("kappa_a".into(), real_matrix_to_value(&m.kappa_a));
    map.insert("kappa_b".into(), real_matrix_to_value(&m.kappa_b));
    map.insert("h_system".into(), matrix_to_value(&m.h_system));
    map.insert("h_reservoir".into(), matrix_to_value(&m.h_reservoir));
    map.insert("psi0".into(), vector_to_value(&m.psi0));
    map.insert("time".into(), json!(m.time));
    Value::Object(map)
}
