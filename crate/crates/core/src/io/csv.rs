//! CSV formats: distance matrices (first line `n`, then `n` rows of `n`
//! floats) and point clouds (rows `id,x1,...,xd`).

use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Validation};

/// Read either input format, sniffing by the first line: a single integer
/// means a distance matrix, anything else a point cloud. An optional
/// `metric_pow` snowflakes the ingested metric (`d -> d^q`).
pub fn read_metric_input(
    path: &Path,
    metric_pow: Option<f64>,
    validation: Validation,
) -> Result<FiniteMetricSpace> {
    let text = std::fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into());
    let first = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Parse("empty input file".into()))?;
    let space = if first.trim().parse::<usize>().is_ok() {
        parse_distance_matrix(&text, &label, validation)?
    } else {
        parse_point_cloud(&text, &label, validation)?
    };
    match metric_pow {
        None => Ok(space),
        Some(q) => crate::metric::snowflake(&space, q),
    }
}

fn parse_distance_matrix(
    text: &str,
    label: &str,
    validation: Validation,
) -> Result<FiniteMetricSpace> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .unwrap()
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("matrix header: {e}")))?;
    let mut dist = Vec::with_capacity(n * n);
    for (row, line) in lines.enumerate() {
        if row >= n {
            return Err(Error::Parse(format!("more than {n} matrix rows")));
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {row}: {e}")))
            })
            .collect::<Result<_>>()?;
        if vals.len() != n {
            return Err(Error::Parse(format!(
                "row {row} has {} entries, expected {n}",
                vals.len()
            )));
        }
        dist.extend(vals);
    }
    if dist.len() != n * n {
        return Err(Error::Parse(format!(
            "matrix has {} rows, expected {n}",
            dist.len() / n
        )));
    }
    FiniteMetricSpace::new(label, n, dist, None, validation)
}

fn parse_point_cloud(
    text: &str,
    label: &str,
    validation: Validation,
) -> Result<FiniteMetricSpace> {
    let mut coords = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let _id = parts.next();
        let row: Vec<f64> = parts
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if row.is_empty() {
            return Err(Error::Parse(format!(
                "line {}: point rows are id,x1,...,xd",
                lineno + 1
            )));
        }
        coords.push(row);
    }
    FiniteMetricSpace::from_points(label, coords, validation)
}

/// Write the distance-matrix format.
pub fn write_distance_matrix(path: &Path, space: &FiniteMetricSpace) -> Result<()> {
    let n = space.len();
    let mut out = String::new();
    out.push_str(&format!("{n}\n"));
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{}", space.dist(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Write the point-cloud format; requires coordinates.
pub fn write_point_cloud(path: &Path, space: &FiniteMetricSpace) -> Result<()> {
    let coords = space
        .coords()
        .ok_or_else(|| Error::parameter("space carries no coordinates"))?;
    let mut out = String::new();
    for (i, c) in coords.iter().enumerate() {
        out.push_str(&i.to_string());
        for x in c {
            out.push(',');
            out.push_str(&format!("{x}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a square Gromov-product matrix: first line `n`, then `n` rows;
/// diagonal entries may be `inf`.
pub fn read_gromov_matrix(path: &Path) -> Result<(usize, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty gromov matrix".into()))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("gromov header: {e}")))?;
    let mut vals = Vec::with_capacity(n * n);
    for line in lines {
        for tok in line.split(',') {
            let t = tok.trim();
            vals.push(if t == "inf" {
                f64::INFINITY
            } else {
                t.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?
            });
        }
    }
    if vals.len() != n * n {
        return Err(Error::Parse(format!(
            "gromov matrix has {} values, expected {}",
            vals.len(),
            n * n
        )));
    }
    Ok((n, vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::circle_snowflake;

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let s = crate::gen::tree_metric(12, 3).unwrap();
        write_distance_matrix(&path, &s).unwrap();
        let back = read_metric_input(&path, None, Validation::Full).unwrap();
        assert_eq!(back.len(), 12);
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(back.dist(i, j), s.dist(i, j));
            }
        }
    }

    #[test]
    fn cloud_round_trip_with_pow() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let s = circle_snowflake(64, 1.0).unwrap();
        write_point_cloud(&path, &s).unwrap();
        let back = read_metric_input(&path, Some(0.5), Validation::Off).unwrap();
        assert_eq!(back.len(), 64);
        let expect = s.dist(0, 32).sqrt();
        assert!((back.dist(0, 32) - expect).abs() < 1e-12);
    }
}
