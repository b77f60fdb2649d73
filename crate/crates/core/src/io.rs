//! CSV files: one row per point (or direction, or halfspace), comma
//! separated, 17 significant digits. Lines starting with `#` are comments;
//! blank lines are skipped; LF and CRLF both accepted.

use std::fmt::Write as _;
use std::path::Path;

use crate::directions::DirectionSet;
use crate::error::{Error, Result};
use crate::geometry::{Halfspace, PointCloud};

/// Parses rows of floats, all with the same field count.
pub fn parse_rows(text: &str) -> Result<(usize, Vec<f64>)> {
    let mut width = None;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let before = values.len();
        for field in line.split(',') {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("not a number: {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("non-finite value {field:?}"),
                });
            }
            values.push(v);
        }
        let fields = values.len() - before;
        match width {
            None => width = Some(fields),
            Some(w) if w != fields => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected {w} fields, found {fields}"),
                })
            }
            _ => {}
        }
    }
    let width = width.ok_or(Error::Empty("csv file"))?;
    Ok((width, values))
}

pub fn parse_points(text: &str) -> Result<PointCloud> {
    let (dim, values) = parse_rows(text)?;
    PointCloud::new(dim, values)
}

pub fn read_points(path: &Path) -> Result<PointCloud> {
    parse_points(&std::fs::read_to_string(path)?)
}

fn push_row(out: &mut String, row: impl IntoIterator<Item = f64>) {
    for (i, v) in row.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v:.16e}").unwrap();
    }
    out.push('\n');
}

pub fn format_points(cloud: &PointCloud, header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        writeln!(out, "# {h}").unwrap();
    }
    for p in cloud.iter() {
        push_row(&mut out, p.iter().copied());
    }
    out
}

pub fn write_points(path: &Path, cloud: &PointCloud) -> Result<()> {
    std::fs::write(path, format_points(cloud, None))?;
    Ok(())
}

/// Points with one extra trailing column (e.g. relative curvature).
pub fn write_points_with_column(
    path: &Path,
    cloud: &PointCloud,
    indices: &[usize],
    extra: &[f64],
    header: &str,
) -> Result<()> {
    let mut out = format!("# {header}\n");
    for (&i, &x) in indices.iter().zip(extra) {
        push_row(&mut out, cloud.point(i).iter().copied().chain([x]));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Halfspaces as `n` normal columns followed by the offset.
pub fn write_halfspaces(path: &Path, halfspaces: &[Halfspace]) -> Result<()> {
    let mut out = String::from("# normal..., offset\n");
    for h in halfspaces {
        push_row(&mut out, h.normal.iter().copied().chain([h.offset]));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_halfspaces(path: &Path) -> Result<Vec<Halfspace>> {
    let (width, values) = parse_rows(&std::fs::read_to_string(path)?)?;
    if width < 3 {
        return Err(Error::invalid("halfspace file needs at least 3 columns"));
    }
    values
        .chunks_exact(width)
        .map(|row| Halfspace::new(row[..width - 1].to_vec(), row[width - 1], None))
        .collect()
}

pub fn write_directions(path: &Path, dirs: &DirectionSet) -> Result<()> {
    let mut out = String::new();
    for d in dirs.iter() {
        push_row(&mut out, d.iter().copied());
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_directions(path: &Path, seed: u64) -> Result<DirectionSet> {
    let (dim, values) = parse_rows(&std::fs::read_to_string(path)?)?;
    DirectionSet::from_unit_vectors(dim, values, seed)
}
