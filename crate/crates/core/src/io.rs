//! Plain-text formats for matrices, sample sets and sequences.
//!
//! Matrices are one row per line with comma-separated entries. Samples are
//! `i,j,value` lines with zero-based indices. Sequences hold one value per
//! line. Blank lines are skipped everywhere. Values are written with 17
//! significant digits so they re-parse to the same `f64`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::projections::SampleSet;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_value(field: &str, line: usize) -> Result<f64> {
    let field = field.trim();
    let v: f64 = field
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse {field:?} as a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut cols = None;
    let mut rows = 0;
    let mut data = Vec::new();
    for (line, content) in content_lines(text) {
        let before = data.len();
        for field in content.split(',') {
            data.push(parse_value(field, line)?);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(parse_err(line, format!("row has {width} entries, expected {c}")));
            }
            Some(_) => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_err(0, "no matrix rows"))?;
    Matrix::new(rows, cols, data)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_samples(text: &str, rows: usize, cols: usize) -> Result<SampleSet> {
    let mut entries = Vec::new();
    let mut first_line = std::collections::HashMap::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected i,j,value, got {} fields", fields.len())));
        }
        let index = |f: &str| {
            f.trim()
                .parse::<usize>()
                .map_err(|_| parse_err(line, format!("cannot parse {:?} as an index", f.trim())))
        };
        let (i, j) = (index(fields[0])?, index(fields[1])?);
        if i >= rows || j >= cols {
            return Err(parse_err(line, format!("entry ({i},{j}) outside a {rows}x{cols} matrix")));
        }
        if let Some(prev) = first_line.insert((i, j), line) {
            return Err(parse_err(line, format!("entry ({i},{j}) already sampled on line {prev}")));
        }
        entries.push((i, j, parse_value(fields[2], line)?));
    }
    SampleSet::new(rows, cols, entries)
}

pub fn format_samples(s: &SampleSet) -> String {
    let mut out = String::new();
    for &(i, j, v) in s.entries() {
        writeln!(out, "{i},{j},{v:.16e}").unwrap();
    }
    out
}

pub fn parse_sequence(text: &str) -> Result<Vec<f64>> {
    let values = content_lines(text)
        .map(|(line, content)| parse_value(content, line))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(parse_err(0, "empty sequence"));
    }
    Ok(values)
}

pub fn format_sequence(h: &[f64]) -> String {
    let mut out = String::new();
    for v in h {
        writeln!(out, "{v:.16e}").unwrap();
    }
    out
}
