//! Grid and coefficient files.
//!
//! JSON is canonical: `{"resolution": M, "backend": "exact"|"float", "values": [...]}`
//! with exact values as `"p/q"` strings and float values as numbers. Files
//! written here also carry `schema_version`, `tool_version` and `config`;
//! readers ignore any extra keys.
//!
//! CSV is a lossy view with columns `cell,value,precision`. Exact values are
//! written as decimals; `precision` is `exact` when the decimal is the exact
//! value, `rounded` when it is the nearest `f64`, and `f64` for float grids.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use fejer_core::{Backend, CoeffVector, GridFn, Rational, Resolution, Scalar, SystemId};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Provenance;
use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// `.csv` selects CSV; anything else is JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (expected json or csv)")),
        }
    }
}

/// A grid in either backend, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyGrid {
    Exact(GridFn<Rational>),
    Float(GridFn<f64>),
}

impl AnyGrid {
    pub fn resolution(&self) -> Resolution {
        match self {
            AnyGrid::Exact(g) => g.resolution(),
            AnyGrid::Float(g) => g.resolution(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            AnyGrid::Exact(_) => Backend::Exact,
            AnyGrid::Float(_) => Backend::Float,
        }
    }

    pub fn to_float(&self) -> GridFn<f64> {
        match self {
            AnyGrid::Exact(g) => g.to_float(),
            AnyGrid::Float(g) => g.clone(),
        }
    }
}

impl From<GridFn<Rational>> for AnyGrid {
    fn from(g: GridFn<Rational>) -> Self {
        AnyGrid::Exact(g)
    }
}

impl From<GridFn<f64>> for AnyGrid {
    fn from(g: GridFn<f64>) -> Self {
        AnyGrid::Float(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyCoeffs {
    Exact(CoeffVector<Rational>),
    Float(CoeffVector<f64>),
}

// ---------------------------------------------------------------------------
// scalar text forms

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.375"` exactly.
pub fn parse_rational(s: &str) -> LabResult<Rational> {
    let s = s.trim();
    let bad = || LabError::format(format!("`{s}` is not a rational number"));
    if s.contains('/') {
        let r = Rational::from_str(s).map_err(|_| bad())?;
        return Ok(r);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).map_err(|_| bad())?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Decimal text for `r` and whether it is exact.
pub fn rational_to_decimal(r: &Rational) -> (String, bool) {
    let mut d = r.denom().clone();
    let (two, five) = (BigInt::from(2u32), BigInt::from(5u32));
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    let places = twos.max(fives);
    if !d.is_one() || places > 64 {
        return (format!("{}", Scalar::to_f64(r)), false);
    }
    let scaled = (r.numer().abs() * BigInt::from(10u32).pow(places)) / r.denom();
    let mut digits = scaled.to_string();
    if places > 0 {
        if digits.len() <= places as usize {
            digits = format!("{}{digits}", "0".repeat(places as usize - digits.len() + 1));
        }
        digits.insert(digits.len() - places as usize, '.');
    }
    let sign = if r.is_negative() { "-" } else { "" };
    (format!("{sign}{digits}"), true)
}

fn value_to_rational(v: &Value) -> LabResult<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => Ok(Rational::from_integer(BigInt::from(i))),
            (_, Some(u)) => Ok(Rational::from_integer(BigInt::from(u))),
            _ => Err(LabError::format(format!(
                "exact grids need integer or \"p/q\" values, found {n}"
            ))),
        },
        other => Err(LabError::format(format!("unexpected value {other}"))),
    }
}

fn value_to_f64(v: &Value) -> LabResult<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| LabError::format(format!("unrepresentable number {n}"))),
        Value::String(s) => parse_rational(s)
            .map(|r| Scalar::to_f64(&r))
            .or_else(|_| s.trim().parse::<f64>().map_err(|_| LabError::format(format!("bad number `{s}`")))),
        other => Err(LabError::format(format!("unexpected value {other}"))),
    }
}

fn float_value(v: f64) -> LabResult<Value> {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .ok_or_else(|| LabError::format(format!("non-finite value {v} cannot be written")))
}

fn parse_backend(s: &str) -> LabResult<Backend> {
    match s {
        "exact" => Ok(Backend::Exact),
        "float" => Ok(Backend::Float),
        _ => Err(LabError::format(format!("unknown backend `{s}`"))),
    }
}

fn parse_system(s: &str) -> LabResult<SystemId> {
    SystemId::from_str(s).map_err(LabError::from)
}

fn resolution_for_len(len: usize) -> LabResult<Resolution> {
    if len == 0 || !len.is_power_of_two() {
        return Err(LabError::format(format!("{len} values is not a power of two")));
    }
    Ok(Resolution::new(len.trailing_zeros())?)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize)]
struct GridOut<'a> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    resolution: u32,
    backend: &'static str,
    values: Vec<Value>,
}

#[derive(Deserialize)]
struct GridIn {
    resolution: u32,
    backend: String,
    values: Vec<Value>,
}

#[derive(Serialize)]
struct CoeffsOut<'a> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    resolution: u32,
    backend: &'static str,
    ordering: &'static str,
    coeffs: Vec<Value>,
}

#[derive(Deserialize)]
struct CoeffsIn {
    resolution: u32,
    backend: String,
    ordering: String,
    coeffs: Vec<Value>,
}

fn exact_values(values: &[Rational]) -> Vec<Value> {
    values.iter().map(|r| Value::String(r.to_string())).collect()
}

fn float_values(values: &[f64]) -> LabResult<Vec<Value>> {
    values.iter().map(|&v| float_value(v)).collect()
}

pub fn grid_to_json(grid: &AnyGrid, provenance: &Provenance) -> LabResult<String> {
    let (values, backend) = match grid {
        AnyGrid::Exact(g) => (exact_values(g.values()), "exact"),
        AnyGrid::Float(g) => (float_values(g.values())?, "float"),
    };
    let out = GridOut {
        provenance,
        resolution: grid.resolution().bits(),
        backend,
        values,
    };
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

pub fn grid_from_json(text: &str) -> LabResult<AnyGrid> {
    let doc: GridIn = serde_json::from_str(text)?;
    let res = Resolution::new(doc.resolution)?;
    match parse_backend(&doc.backend)? {
        Backend::Exact => {
            let v = doc.values.iter().map(value_to_rational).collect::<LabResult<Vec<_>>>()?;
            Ok(AnyGrid::Exact(GridFn::new(res, v)?))
        }
        Backend::Float => {
            let v = doc.values.iter().map(value_to_f64).collect::<LabResult<Vec<_>>>()?;
            Ok(AnyGrid::Float(GridFn::new(res, v)?))
        }
    }
}

pub fn coeffs_to_json(coeffs: &AnyCoeffs, provenance: &Provenance) -> LabResult<String> {
    let (values, backend, res, ordering) = match coeffs {
        AnyCoeffs::Exact(c) => (exact_values(c.coeffs()), "exact", c.resolution(), c.ordering()),
        AnyCoeffs::Float(c) => (float_values(c.coeffs())?, "float", c.resolution(), c.ordering()),
    };
    let out = CoeffsOut {
        provenance,
        resolution: res.bits(),
        backend,
        ordering: ordering.as_str(),
        coeffs: values,
    };
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

pub fn coeffs_from_json(text: &str) -> LabResult<AnyCoeffs> {
    let doc: CoeffsIn = serde_json::from_str(text)?;
    let res = Resolution::new(doc.resolution)?;
    let ordering = parse_system(&doc.ordering)?;
    match parse_backend(&doc.backend)? {
        Backend::Exact => {
            let v = doc.coeffs.iter().map(value_to_rational).collect::<LabResult<Vec<_>>>()?;
            Ok(AnyCoeffs::Exact(CoeffVector::new(res, ordering, v)?))
        }
        Backend::Float => {
            let v = doc.coeffs.iter().map(value_to_f64).collect::<LabResult<Vec<_>>>()?;
            Ok(AnyCoeffs::Float(CoeffVector::new(res, ordering, v)?))
        }
    }
}

// ---------------------------------------------------------------------------
// CSV

pub fn grid_to_csv(grid: &AnyGrid, provenance: &Provenance) -> LabResult<String> {
    let mut buf = provenance.comment_lines().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["cell", "value", "precision"])?;
        match grid {
            AnyGrid::Exact(g) => {
                for (u, r) in g.values().iter().enumerate() {
                    let (text, exact) = rational_to_decimal(r);
                    let precision = if exact { "exact" } else { "rounded" };
                    w.write_record([u.to_string(), text, precision.to_string()])?;
                }
            }
            AnyGrid::Float(g) => {
                for (u, v) in g.values().iter().enumerate() {
                    w.write_record([u.to_string(), v.to_string(), "f64".to_string()])?;
                }
            }
        }
        w.flush()?;
    }
    String::from_utf8(buf).map_err(|e| LabError::format(e.to_string()))
}

/// Reads `cell,value[,precision]`. The grid is exact only when every row is
/// marked `exact`.
pub fn grid_from_csv(text: &str) -> LabResult<AnyGrid> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let cell_col = col("cell").ok_or_else(|| LabError::format("missing `cell` column"))?;
    let value_col = col("value").ok_or_else(|| LabError::format("missing `value` column"))?;
    let precision_col = col("precision");

    let mut raw = Vec::new();
    let mut all_exact = precision_col.is_some();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let cell: usize = rec
            .get(cell_col)
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| LabError::format(format!("row {i}: bad cell index")))?;
        if cell != i {
            return Err(LabError::format(format!("row {i}: expected cell {i}, found {cell}")));
        }
        if let Some(pc) = precision_col {
            all_exact &= rec.get(pc) == Some("exact");
        }
        raw.push(rec.get(value_col).unwrap_or("").to_string());
    }
    let res = resolution_for_len(raw.len())?;
    if all_exact {
        let v = raw.iter().map(|s| parse_rational(s)).collect::<LabResult<Vec<_>>>()?;
        Ok(AnyGrid::Exact(GridFn::new(res, v)?))
    } else {
        let v = raw
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| LabError::format(format!("bad number `{s}`"))))
            .collect::<LabResult<Vec<_>>>()?;
        Ok(AnyGrid::Float(GridFn::new(res, v)?))
    }
}

// ---------------------------------------------------------------------------
// files

pub fn read_to_string(path: &Path) -> LabResult<String> {
    let mut s = String::new();
    BufReader::new(File::open(path).map_err(|e| LabError::io(path, e))?)
        .read_to_string(&mut s)
        .map_err(|e| LabError::io(path, e))?;
    Ok(s)
}

pub fn write_string(path: &Path, text: &str) -> LabResult<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| LabError::io(path, e))?);
    w.write_all(text.as_bytes()).map_err(|e| LabError::io(path, e))?;
    w.flush().map_err(|e| LabError::io(path, e))
}

/// Reads a grid, choosing the format by extension.
pub fn read_grid(path: &Path) -> LabResult<AnyGrid> {
    let text = read_to_string(path)?;
    match Format::from_path(path) {
        Format::Json => grid_from_json(&text),
        Format::Csv => grid_from_csv(&text),
    }
}

pub fn render_grid(grid: &AnyGrid, provenance: &Provenance, format: Format) -> LabResult<String> {
    match format {
        Format::Json => grid_to_json(grid, provenance),
        Format::Csv => grid_to_csv(grid, provenance),
    }
}

pub fn read_coeffs(path: &Path) -> LabResult<AnyCoeffs> {
    coeffs_from_json(&read_to_string(path)?)
}
