//! Input files and output rendering.

use std::fs;
use std::path::Path;

use dlab_core::carleson::{ComplexAtomicMeasure, RadialMeasure};
use dlab_core::geometry::points_from_json;
use dlab_core::weak_product::Factorization;
use dlab_core::{AnalyticPoly, DiskPoint};
use num_complex::Complex64;
use serde_json::Value;

use crate::CliError;

fn read(flag: &str, path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input {
        field: flag.to_string(),
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

fn input_error(flag: &str, path: &Path, detail: impl ToString) -> CliError {
    CliError::Input {
        field: flag.to_string(),
        path: path.display().to_string(),
        detail: detail.to_string(),
    }
}

pub fn coeffs(flag: &str, path: &Path) -> Result<AnalyticPoly, CliError> {
    let text = read(flag, path)?;
    AnalyticPoly::from_json_str(&text).map_err(|e| input_error(flag, path, e))
}

pub fn points(flag: &str, path: &Path) -> Result<Vec<DiskPoint>, CliError> {
    let text = read(flag, path)?;
    points_from_json(&text).map_err(|e| input_error(flag, path, e))
}

/// JSON array of `[re, im]` pairs.
pub fn values(flag: &str, path: &Path) -> Result<Vec<Complex64>, CliError> {
    let text = read(flag, path)?;
    let raw: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| input_error(flag, path, e))?;
    raw.iter()
        .enumerate()
        .map(|(i, [re, im])| {
            if re.is_finite() && im.is_finite() {
                Ok(Complex64::new(*re, *im))
            } else {
                Err(input_error(flag, path, format!("entry {i} is not finite")))
            }
        })
        .collect()
}

pub fn radial_measure(flag: &str, path: &Path) -> Result<RadialMeasure, CliError> {
    let text = read(flag, path)?;
    RadialMeasure::from_json_str(&text).map_err(|e| input_error(flag, path, e))
}

pub fn atomic_measure(flag: &str, path: &Path) -> Result<ComplexAtomicMeasure, CliError> {
    let text = read(flag, path)?;
    ComplexAtomicMeasure::from_json_str(&text).map_err(|e| input_error(flag, path, e))
}

pub fn factorization(flag: &str, path: &Path) -> Result<Factorization, CliError> {
    let text = read(flag, path)?;
    Factorization::from_json_str(&text).map_err(|e| input_error(flag, path, e))
}

/// `start:stop:count` with an optional `:log` suffix.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |detail: &str| CliError::Usage(format!("--grid {spec:?}: {detail}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let log = match parts.as_slice() {
        [_, _, _] => false,
        [_, _, _, "log"] => true,
        _ => return Err(bad("expected start:stop:count(:log)")),
    };
    let start: f64 = parts[0].parse().map_err(|_| bad("start is not a number"))?;
    let stop: f64 = parts[1].parse().map_err(|_| bad("stop is not a number"))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| bad("count is not a positive integer"))?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad("count must be positive and bounds finite"));
    }
    if log && !(start > 0.0 && stop > 0.0) {
        return Err(bad("log grids need positive bounds"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = |j: usize| j as f64 / (count - 1) as f64;
    Ok((0..count)
        .map(|j| {
            if log {
                (start.ln() + (stop.ln() - start.ln()) * step(j)).exp()
            } else {
                start + (stop - start) * step(j)
            }
        })
        .collect())
}

pub fn complex_json(c: Complex64) -> Value {
    serde_json::json!([c.re, c.im])
}

type Row = Vec<(String, Value)>;

fn flatten(prefix: &str, v: &Value, out: &mut Row) {
    match v {
        Value::Object(m) => {
            for (k, inner) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, inner, out);
            }
        }
        other => {
            out.push((prefix.to_string(), other.clone()));
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Rows for CSV output: the `cells` of a sweep, the members of a top-level
/// array, or a single flattened object.
fn rows(v: &Value) -> Vec<Row> {
    let one = |v: &Value, task: Option<&Value>| {
        let mut m = Row::new();
        if let Some(t) = task {
            m.push(("task".into(), t.clone()));
        }
        flatten("", v, &mut m);
        m
    };
    match v {
        Value::Object(m) if m.contains_key("reports") => m["reports"]
            .as_array()
            .into_iter()
            .flatten()
            .flat_map(rows)
            .collect(),
        Value::Object(m) if m.get("cells").is_some_and(Value::is_array) => m["cells"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| one(c, m.get("task")))
            .collect(),
        Value::Array(items) => items.iter().map(|c| one(c, None)).collect(),
        other => vec![one(other, None)],
    }
}

pub fn render(v: &Value, csv_format: bool) -> Result<String, CliError> {
    if !csv_format {
        let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
        s.push('\n');
        return Ok(s);
    }
    let rows = rows(v);
    let mut header: Vec<String> = Vec::new();
    for r in &rows {
        for (k, _) in r {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(&header).map_err(io)?;
    for r in &rows {
        let field = |k: &String| {
            r.iter()
                .find(|(name, _)| name == k)
                .map(|(_, v)| scalar_text(v))
        };
        w.write_record(header.iter().map(|k| field(k).unwrap_or_default()))
            .map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_grid("1e-4:1:5:log").unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[2] - 1e-2).abs() < 1e-15);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:3:lin").is_err());
        assert!(parse_grid("0:1:3:log").is_err());
        assert_eq!(parse_grid("2:5:1").unwrap(), vec![2.0]);
    }

    #[test]
    fn csv_rows_from_cells() {
        let v = serde_json::json!({
            "task": "t",
            "cells": [{"params": {"x": 1}, "values": {"y": [1, 2]}}],
        });
        let s = render(&v, true).unwrap();
        assert_eq!(s, "task,params.x,values.y\nt,1,\"[1,2]\"\n");
    }
}
