//! Reading and writing point files.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointFormat {
    /// Comma-separated if the first data line has a comma, else whitespace.
    #[default]
    Auto,
    Csv,
    Whitespace,
}

pub fn load_points(path: impl AsRef<Path>, format: PointFormat) -> Result<PointSet> {
    let text = fs::read_to_string(path)?;
    parse_points(&text, format)
}

/// Parses one point per line. Blank lines and lines starting with `#` are
/// skipped; line numbers in errors are 1-based.
pub fn parse_points(text: &str, format: PointFormat) -> Result<PointSet> {
    let mut data = Vec::new();
    let mut dim = None;
    let mut format = format;
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if format == PointFormat::Auto {
            format = if line.contains(',') {
                PointFormat::Csv
            } else {
                PointFormat::Whitespace
            };
        }
        let tokens: Vec<&str> = match format {
            PointFormat::Csv => line.split(',').map(str::trim).collect(),
            _ => line.split_whitespace().collect(),
        };
        let mut row = Vec::with_capacity(tokens.len());
        for tok in tokens {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("not a number: '{tok}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("non-finite value '{tok}'"),
                });
            }
            row.push(v);
        }
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {d} values, found {}", row.len()),
                })
            }
            _ => {}
        }
        data.extend(row);
    }
    let d = dim.ok_or(Error::Parse {
        line: 0,
        msg: "no points in input".into(),
    })?;
    PointSet::new(data, d)
}

/// Writes comma-separated rows using the shortest round-tripping decimal form.
pub fn write_points(path: impl AsRef<Path>, points: &PointSet) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for row in points.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_instance, InstanceSpec};
    use crate::sampling::RandomSource;

    #[test]
    fn parses_csv_and_whitespace() {
        let p = parse_points("0,0\n3,4\n", PointFormat::Auto).unwrap();
        assert_eq!((p.len(), p.dim()), (2, 2));
        assert_eq!(p.point(1), &[3.0, 4.0]);
        let q = parse_points("# header\n1 2 3\n\n4\t5 6\n", PointFormat::Auto).unwrap();
        assert_eq!((q.len(), q.dim()), (2, 3));
    }

    #[test]
    fn reports_the_bad_line() {
        match parse_points("1,2\nnan,3\n", PointFormat::Csv) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_points("1,2\n1,2,3\n", PointFormat::Csv),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_points("1,x\n", PointFormat::Csv),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("", PointFormat::Auto),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_points("inf\n", PointFormat::Auto),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn generated_instance_round_trips_bitwise() {
        let spec: InstanceSpec = "gaussian_mixture:k=4,n=200,d=3,sep=7,scatter=0.3"
            .parse()
            .unwrap();
        let inst = generate_instance(&spec, &mut RandomSource::new(10, 0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("points.csv");
        write_points(&path, &inst.points).unwrap();
        let back = load_points(&path, PointFormat::Auto).unwrap();
        assert_eq!(back.dim(), inst.points.dim());
        for (a, b) in back.as_slice().iter().zip(inst.points.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
