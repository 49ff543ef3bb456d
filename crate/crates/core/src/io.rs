//! CSV emitters and loaders. Numbers are written with `P` significant digits
//! in scientific notation, `.` as decimal separator and LF line endings.

use std::io::Write;

use rug::Float;

use crate::error::{Error, Result};
use crate::fields::{FieldSample, SpaceTimePoint};
use crate::precision::{format_sci, parse_real, PrecisionConfig, Real};
use crate::reduction::ProfileSet;

pub const PROFILE_HEADER: [&str; 9] = ["omega", "f", "g", "h", "l", "f1", "g1", "h1", "l1"];
pub const FIELD_HEADER: [&str; 8] = ["x", "y", "z", "t", "u", "v", "w", "p"];
pub const LEVEL_SET_HEADER: [&str; 3] = ["x", "y", "z"];

fn write_row<W: Write + ?Sized>(out: &mut W, cells: &[&Real], digits: u32) -> Result<()> {
    let line: Vec<String> = cells.iter().map(|v| format_sci(v, digits)).collect();
    out.write_all(line.join(",").as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

fn write_header<W: Write + ?Sized>(out: &mut W, header: &[&str]) -> Result<()> {
    out.write_all(header.join(",").as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

/// One row per grid node. With `kernel_only` the `f` column drops the
/// constant tail `c/3 - 2a/3`, leaving `c1 U + c2 M`.
pub fn write_profile_csv<W: Write + ?Sized>(out: &mut W, ps: &ProfileSet, kernel_only: bool, digits: u32) -> Result<()> {
    write_header(out, &PROFILE_HEADER)?;
    let b = ps.f.first().map_or(64, |v| v.prec());
    let tail = ps.params.constant_tail(b);
    for i in 0..ps.len() {
        let f = if kernel_only { Float::with_val(b, &ps.f[i] - &tail) } else { ps.f[i].clone() };
        write_row(
            out,
            &[&ps.omega_grid[i], &f, &ps.g[i], &ps.h[i], &ps.l[i], &ps.f1[i], &ps.g1[i], &ps.h1[i], &ps.l1[i]],
            digits,
        )?;
    }
    Ok(())
}

pub fn write_field_csv<W: Write + ?Sized>(out: &mut W, samples: &[FieldSample], digits: u32) -> Result<()> {
    write_header(out, &FIELD_HEADER)?;
    for s in samples {
        let p = &s.point;
        write_row(out, &[&p.x, &p.y, &p.z, &p.t, &s.u, &s.v, &s.w, &s.p], digits)?;
    }
    Ok(())
}

pub fn write_level_set_csv<W: Write + ?Sized>(out: &mut W, points: &[SpaceTimePoint], digits: u32) -> Result<()> {
    write_header(out, &LEVEL_SET_HEADER)?;
    for p in points {
        write_row(out, &[&p.x, &p.y, &p.z], digits)?;
    }
    Ok(())
}

/// Parsed CSV: the header and the rows, each value at working precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Real>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<&Real>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }
}

/// Read a CSV written by this module. `expected` (if given) must match the
/// header exactly.
pub fn read_csv(text: &str, expected: Option<&[&str]>, prec: &PrecisionConfig) -> Result<Table> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    if let Some(exp) = expected {
        if header.iter().map(String::as_str).ne(exp.iter().copied()) {
            return Err(Error::Parse(format!("unexpected CSV header '{}', want '{}'", header.join(","), exp.join(","))));
        }
    }
    let bits = prec.work_bits();
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<Real> = line.split(',').map(|c| parse_real(c.trim(), bits)).collect::<Result<_>>()?;
        if row.len() != header.len() {
            return Err(Error::Parse(format!("row {} has {} columns, header has {}", n + 2, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}
