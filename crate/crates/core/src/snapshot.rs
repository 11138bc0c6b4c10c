//! Plain-text snapshot records.
//!
//! A snapshot file holds one or more records. Each record is a header line
//!
//! ```text
//! # <field> <layout> <dim>... <step>
//! ```
//!
//! followed by one value per line with 17 significant digits, x-fastest for
//! 2D layouts.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sparse::format_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldName {
    Ex,
    Hy,
    E,
    Bx,
    By,
}

impl FieldName {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldName::Ex => "ex",
            FieldName::Hy => "hy",
            FieldName::E => "e",
            FieldName::Bx => "bx",
            FieldName::By => "by",
        }
    }
}

impl FromStr for FieldName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ex" => FieldName::Ex,
            "hy" => FieldName::Hy,
            "e" => FieldName::E,
            "bx" => FieldName::Bx,
            "by" => FieldName::By,
            other => return Err(Error::Parse(format!("unknown field {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Scalar1D,
    Edge1D,
    Scalar2D,
    EdgeX2D,
    EdgeY2D,
}

impl Layout {
    pub fn as_str(self) -> &'static str {
        match self {
            Layout::Scalar1D => "1d-scalar",
            Layout::Edge1D => "1d-edge",
            Layout::Scalar2D => "2d-scalar",
            Layout::EdgeX2D => "2d-edge-x",
            Layout::EdgeY2D => "2d-edge-y",
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Layout::Scalar1D | Layout::Edge1D => 1,
            _ => 2,
        }
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "1d-scalar" => Layout::Scalar1D,
            "1d-edge" => Layout::Edge1D,
            "2d-scalar" => Layout::Scalar2D,
            "2d-edge-x" => Layout::EdgeX2D,
            "2d-edge-y" => Layout::EdgeY2D,
            other => return Err(Error::Parse(format!("unknown layout {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub step: usize,
    pub field: FieldName,
    pub layout: Layout,
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

impl SnapshotRecord {
    pub fn new(step: usize, field: FieldName, layout: Layout, dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if dims.len() != layout.rank() {
            return Err(Error::validation(
                "snapshot.dims",
                format!(
                    "{} needs {} dimensions, got {}",
                    layout.as_str(),
                    layout.rank(),
                    dims.len()
                ),
            ));
        }
        let expected: usize = dims.iter().product();
        if expected != values.len() {
            return Err(Error::validation(
                "snapshot.values",
                format!("{} values for dimensions {dims:?}", values.len()),
            ));
        }
        Ok(Self {
            step,
            field,
            layout,
            dims,
            values,
        })
    }

    pub fn header(&self) -> String {
        let mut h = format!("# {} {}", self.field.as_str(), self.layout.as_str());
        for d in &self.dims {
            write!(h, " {d}").unwrap();
        }
        write!(h, " {}", self.step).unwrap();
        h
    }
}

impl fmt::Display for SnapshotRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header())?;
        for v in &self.values {
            writeln!(f, "{}", format_f64(*v))?;
        }
        Ok(())
    }
}

pub fn render(records: &[SnapshotRecord]) -> String {
    records.iter().map(ToString::to_string).collect()
}

/// Parses every record in a snapshot file.
pub fn parse(text: &str) -> Result<Vec<SnapshotRecord>> {
    let mut records = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((lineno, line)) = lines.next() {
        let Some(header) = line.strip_prefix("# ") else {
            return Err(Error::Parse(format!("line {}: expected a header", lineno + 1)));
        };
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() < 3 {
            return Err(Error::Parse(format!("line {}: short header", lineno + 1)));
        }
        let field: FieldName = parts[0].parse()?;
        let layout: Layout = parts[1].parse()?;
        let numbers = parts[2..]
            .iter()
            .map(|p| p.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        let (step, dims) = numbers.split_last().expect("at least one number");
        let count: usize = dims.iter().product();
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, l) = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("record at line {} is truncated", lineno + 1)))?;
            let v = l
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
            values.push(v);
        }
        records.push(SnapshotRecord::new(*step, field, layout, dims.to_vec(), values)?);
    }
    Ok(records)
}

pub fn file_name(step: usize) -> String {
    format!("snapshot_{step:06}.txt")
}
