//! File formats.
//!
//! Fractional assignments: `{"m": 2, "n": 1, "x": [[0.5], [0.5]], "d": [1]}`
//! with `x` row-major; `m`, `n` and `d` are optional (`d` defaults to ones).
//! Numbers may also be strings such as `"1/3"`. The CSV form has one line per
//! matrix row and a line starting with `d` for the weights.
//!
//! Integral assignments: `{"s": [1, 2, ...]}` with one-based rows.
//!
//! Scheduling instances:
//! `{"machines": [{"b": 1.5}, {"b": "inf"}], "jobs": [{"r": 0, "d": 1}]}`.

use std::path::Path;

use serde_json::{json, Value};

use crate::assignment::{FractionalAssignment, IntegralAssignment, WeightVector};
use crate::error::{Error, Result};
use crate::rounding::{ClosingTime, OpenTimes};
use crate::scalar::{scalar_from_json, Scalar};
use crate::scheduling::{Job, SchedulingInstance};

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::file(path, e))
}

pub fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::Parse(format!("missing field {name:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn index(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|k| k as usize)
        .ok_or_else(|| Error::Parse(format!("{what} must be a non-negative integer, found {v}")))
}

fn scalars<S: Scalar>(v: &Value, what: &str) -> Result<Vec<S>> {
    array(v, what)?.iter().map(scalar_from_json).collect()
}

pub fn assignment_from_json<S: Scalar>(v: &Value) -> Result<(FractionalAssignment<S>, WeightVector<S>)> {
    let rows: Vec<Vec<S>> = array(field(v, "x")?, "x")?
        .iter()
        .map(|row| scalars(row, "matrix row"))
        .collect::<Result<_>>()?;
    let x = FractionalAssignment::from_rows(rows)?;
    if let Some(m) = v.get("m") {
        let m = index(m, "m")?;
        if m != x.m() {
            return Err(Error::Dimension(format!("m = {m} but x has {} rows", x.m())));
        }
    }
    if let Some(n) = v.get("n") {
        let n = index(n, "n")?;
        if n != x.n() {
            return Err(Error::Dimension(format!("n = {n} but x has {} columns", x.n())));
        }
    }
    let d = match v.get("d") {
        Some(d) => WeightVector::new(scalars(d, "d")?)?,
        None => WeightVector::ones(x.n()),
    };
    if d.len() != x.n() {
        return Err(Error::Dimension(format!("{} weights for {} columns", d.len(), x.n())));
    }
    Ok((x, d))
}

pub fn assignment_to_json<S: Scalar>(x: &FractionalAssignment<S>, d: &WeightVector<S>) -> Value {
    let rows: Vec<Value> = (0..x.m()).map(|i| Value::Array(x.row(i).iter().map(Scalar::to_json).collect())).collect();
    json!({
        "m": x.m(),
        "n": x.n(),
        "x": rows,
        "d": d.as_slice().iter().map(Scalar::to_json).collect::<Vec<_>>(),
    })
}

pub fn assignment_from_csv<S: Scalar>(text: &str) -> Result<(FractionalAssignment<S>, WeightVector<S>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut weights = None;
    for record in reader.records() {
        let record = record?;
        let mut fields: Vec<&str> = record.iter().collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        if fields[0].eq_ignore_ascii_case("d") {
            fields.remove(0);
            weights = Some(fields.iter().map(|f| S::parse(f)).collect::<Result<Vec<S>>>()?);
        } else {
            rows.push(fields.iter().map(|f| S::parse(f)).collect::<Result<Vec<S>>>()?);
        }
    }
    let x = FractionalAssignment::from_rows(rows)?;
    let d = match weights {
        Some(w) => WeightVector::new(w)?,
        None => WeightVector::ones(x.n()),
    };
    if d.len() != x.n() {
        return Err(Error::Dimension(format!("{} weights for {} columns", d.len(), x.n())));
    }
    Ok((x, d))
}

pub fn assignment_to_csv<S: Scalar>(x: &FractionalAssignment<S>, d: &WeightVector<S>) -> String {
    let join = |vals: &[S]| vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    let mut out = String::new();
    for i in 0..x.m() {
        out.push_str(&join(x.row(i)));
        out.push('\n');
    }
    out.push_str("d,");
    out.push_str(&join(d.as_slice()));
    out.push('\n');
    out
}

/// Reads JSON or, for a `.csv` extension, CSV.
pub fn load_assignment<S: Scalar>(path: &Path) -> Result<(FractionalAssignment<S>, WeightVector<S>)> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        assignment_from_csv(&read_text(path)?)
    } else {
        assignment_from_json(&read_json(path)?)
    }
}

pub fn integral_to_json(y: &IntegralAssignment) -> Value {
    json!({ "s": y.to_one_based() })
}

pub fn integral_from_json(v: &Value, m: usize) -> Result<IntegralAssignment> {
    let rows: Vec<usize> = array(field(v, "s")?, "s")?
        .iter()
        .map(|k| index(k, "row index"))
        .collect::<Result<_>>()?;
    IntegralAssignment::from_one_based(&rows, m)
}

/// `{"a": [...]}`, one-based first usable column per row.
pub fn open_times_from_json(v: &Value, n: usize) -> Result<OpenTimes> {
    let a = array(field(v, "a")?, "a")?
        .iter()
        .map(|k| index(k, "open time"))
        .collect::<Result<_>>()?;
    OpenTimes::new(a, n)
}

fn closing_from_json<S: Scalar>(v: &Value) -> Result<ClosingTime<S>> {
    match v {
        Value::Null => Ok(ClosingTime::Never),
        Value::String(s) if matches!(s.trim().to_ascii_lowercase().as_str(), "inf" | "infinity" | "+inf") => {
            Ok(ClosingTime::Never)
        }
        other => Ok(ClosingTime::At(scalar_from_json(other)?)),
    }
}

/// Jobs are sorted by release time (stable) on load.
pub fn instance_from_json<S: Scalar>(v: &Value) -> Result<SchedulingInstance<S>> {
    let machines = array(field(v, "machines")?, "machines")?
        .iter()
        .map(|mach| closing_from_json(mach.get("b").unwrap_or(&Value::Null)))
        .collect::<Result<Vec<_>>>()?;
    let jobs = array(field(v, "jobs")?, "jobs")?
        .iter()
        .map(|job| Ok(Job::new(scalar_from_json(field(job, "r")?)?, scalar_from_json(field(job, "d")?)?)))
        .collect::<Result<Vec<_>>>()?;
    SchedulingInstance::from_unsorted(machines, jobs)
}

pub fn instance_to_json<S: Scalar>(inst: &SchedulingInstance<S>) -> Value {
    json!({
        "machines": inst.machines().iter().map(|b| json!({ "b": b.to_json() })).collect::<Vec<_>>(),
        "jobs": inst.jobs().iter().map(|j| json!({ "r": j.release.to_json(), "d": j.processing.to_json() })).collect::<Vec<_>>(),
    })
}

pub fn load_instance<S: Scalar>(path: &Path) -> Result<SchedulingInstance<S>> {
    instance_from_json(&read_json(path)?)
}
