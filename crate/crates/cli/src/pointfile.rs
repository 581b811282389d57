//! Plain-text point files.
//!
//! ```text
//! # comments run to the end of the line
//! 2 3
//! 0.5 0.0
//! -0.25 0.125
//! 0 0
//! ```
//!
//! The header is `D n`, followed by `n` rows of `D` coordinates. Coordinates
//! are written with 17 significant digits so that files round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hypercoreset::{BallPoint, PointSet};
use sha2::{Digest, Sha256};

use crate::CliError;

/// A parsed file together with the SHA-256 of its bytes.
pub struct Loaded {
    pub points: PointSet,
    pub digest: String,
}

pub fn read(path: &Path) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let text =
        std::str::from_utf8(&bytes).map_err(|_| CliError::Parse(format!("{}: not valid UTF-8", path.display())))?;
    let points = parse(text).map_err(|e| CliError::Parse(format!("{}:{e}", path.display())))?;
    Ok(Loaded {
        points,
        digest: digest(&bytes),
    })
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parse error located at a 1-based line.
#[derive(Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.line, self.message)
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

pub fn parse(text: &str) -> Result<PointSet, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let last_line = text.lines().count().max(1);

    let (hline, header) = lines.next().ok_or_else(|| err(last_line, "missing header `D n`"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [d, n] = fields[..] else {
        return Err(err(hline, format!("header must be `D n`, found {header:?}")));
    };
    let dim: usize = d.parse().map_err(|_| err(hline, format!("bad dimension {d:?}")))?;
    let n: usize = n.parse().map_err(|_| err(hline, format!("bad point count {n:?}")))?;
    if dim < 2 {
        return Err(err(hline, format!("dimension must be at least 2, found {dim}")));
    }

    let mut points = Vec::with_capacity(n.min(1 << 20));
    for (line, row) in lines {
        if points.len() == n {
            return Err(err(line, format!("more than the {n} rows declared in the header")));
        }
        let coords = row
            .split_whitespace()
            .map(|t| match t.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(err(line, format!("bad coordinate {t:?}"))),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if coords.len() != dim {
            return Err(err(line, format!("expected {dim} coordinates, found {}", coords.len())));
        }
        points.push(BallPoint::new(coords).map_err(|e| err(line, e.to_string()))?);
    }
    if points.len() != n {
        return Err(err(
            last_line,
            format!("header declares {n} rows, found {}", points.len()),
        ));
    }
    PointSet::new(dim, points).map_err(|e| err(hline, e.to_string()))
}

pub fn render(points: &PointSet) -> String {
    let mut s = format!("{} {}\n", points.dim(), points.len());
    for p in points.iter() {
        for (k, x) in p.coords().iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            write!(s, "{x:.16e}").expect("writing to a string");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let p = parse("# points\n\n2 2 # header\n0.5 0\n\n-0.25 0.125 # last\n").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.get(1).coords(), &[-0.25, 0.125]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(parse("2 1\n0.5 x\n").unwrap_err().line, 2);
        assert_eq!(parse("2 1\n0.5\n").unwrap_err().line, 2);
        assert_eq!(parse("2 1\n1.5 0\n").unwrap_err().line, 2);
        assert_eq!(parse("2 1\n0 0\n0 0\n").unwrap_err().line, 3);
        assert_eq!(parse("\n1 0\n").unwrap_err().line, 2);
        assert!(parse("2 3\n0 0\n").is_err());
        assert!(parse("").is_err());
        assert!(parse("2 1\nNaN 0\n").is_err());
    }

    #[test]
    fn empty_set_round_trips() {
        let p = parse("3 0\n").unwrap();
        assert!(p.is_empty());
        assert_eq!(render(&p), "3 0\n");
    }

    #[test]
    fn render_round_trips_bits() {
        let rows = vec![vec![0.1, -1.0 / 3.0], vec![1e-300, -0.0], vec![0.999_999_999_999, 0.0]];
        let p = PointSet::from_rows(2, rows).unwrap();
        let q = parse(&render(&p)).unwrap();
        for (a, b) in p.iter().zip(q.iter()) {
            let (a, b): (Vec<u64>, Vec<u64>) = (
                a.coords().iter().map(|x| x.to_bits()).collect(),
                b.coords().iter().map(|x| x.to_bits()).collect(),
            );
            assert_eq!(a, b);
        }
    }
}
