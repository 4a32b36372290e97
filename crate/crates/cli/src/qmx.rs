//! QMX: a line-oriented text format for dense complex matrices on labelled subsystems.
//!
//! ```text
//! QMX 1
//! dims: 2 2 3 3
//! order: ABA'B'
//! 1.2500000000000000e-1,0.0000000000000000e0 ...
//! ```
//!
//! Every component is written with 17 significant digits, which round-trips
//! any finite `f64` exactly.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use ppt_metrology::linalg::{ComplexMatrix, Party, SubsystemDims, C64};
use thiserror::Error;

pub const MAGIC: &str = "QMX 1";

#[derive(Debug, Error)]
pub enum QmxError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn parse_err(line: usize, msg: impl Into<String>) -> QmxError {
    QmxError::Parse {
        line,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QmxFile {
    pub dims: SubsystemDims,
    pub matrix: ComplexMatrix,
}

/// Order tags accepted on the `order:` line.
pub const ORDERS: [&str; 3] = ["ABA'B'", "AA'BB'", "AB"];

fn labels_for(tag: &str) -> Option<Vec<Party>> {
    use Party::*;
    match tag {
        "ABA'B'" => Some(vec![A, B, APrime, BPrime]),
        "AA'BB'" => Some(vec![A, APrime, B, BPrime]),
        "AB" => Some(vec![A, B]),
        _ => None,
    }
}

impl QmxFile {
    pub fn new(dims: SubsystemDims, matrix: ComplexMatrix) -> Result<Self, QmxError> {
        let tag = dims.to_string();
        if labels_for(&tag).is_none() {
            return Err(parse_err(0, format!("unsupported subsystem order {tag}")));
        }
        if matrix.rows() != dims.total() || matrix.cols() != dims.total() {
            return Err(parse_err(
                0,
                format!(
                    "matrix is {}x{}, dims give {}",
                    matrix.rows(),
                    matrix.cols(),
                    dims.total()
                ),
            ));
        }
        Ok(Self { dims, matrix })
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        let n = self.matrix.rows();
        let dims: Vec<String> = self.dims.dims().iter().map(|d| d.to_string()).collect();
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "dims: {}", dims.join(" "))?;
        writeln!(w, "order: {}", self.dims)?;
        let mut line = String::new();
        for r in 0..n {
            line.clear();
            for c in 0..n {
                let z = self.matrix[(r, c)];
                if c > 0 {
                    line.push(' ');
                }
                write!(line, "{:.16e},{:.16e}", z.re, z.im).expect("writing to a String");
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self, QmxError> {
        let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| -> Result<(usize, String), QmxError> {
            match lines.next() {
                Some((i, l)) => Ok((i, l?)),
                None => Err(parse_err(
                    0,
                    format!("unexpected end of file, expected {what}"),
                )),
            }
        };

        let (i, magic) = next("header")?;
        if magic.trim() != MAGIC {
            return Err(parse_err(
                i,
                format!("expected `{MAGIC}`, found `{}`", magic.trim()),
            ));
        }
        let (i, dims_line) = next("dims line")?;
        let dims: Vec<usize> = dims_line
            .trim()
            .strip_prefix("dims:")
            .ok_or_else(|| parse_err(i, "expected `dims:`"))?
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| parse_err(i, format!("bad dimension `{t}`: {e}")))
            })
            .collect::<Result<_, _>>()?;
        let (j, order_line) = next("order line")?;
        let tag = order_line
            .trim()
            .strip_prefix("order:")
            .ok_or_else(|| parse_err(j, "expected `order:`"))?
            .trim();
        let labels = labels_for(tag).ok_or_else(|| {
            parse_err(
                j,
                format!("unknown order `{tag}`, expected one of {ORDERS:?}"),
            )
        })?;
        let dims = SubsystemDims::new(dims, labels).map_err(|e| parse_err(i, e.to_string()))?;

        let n = dims.total();
        let mut data = Vec::with_capacity(n * n);
        for row in 0..n {
            let (i, line) = next("matrix row")?;
            let before = data.len();
            for entry in line.split_whitespace() {
                let (re, im) = entry
                    .split_once(',')
                    .ok_or_else(|| parse_err(i, format!("entry `{entry}` is not `re,im`")))?;
                let parse = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|e| parse_err(i, format!("bad number `{s}`: {e}")))
                };
                data.push(C64::new(parse(re)?, parse(im)?));
            }
            if data.len() - before != n {
                return Err(parse_err(
                    i,
                    format!(
                        "row {row} has {} entries, expected {n}",
                        data.len() - before
                    ),
                ));
            }
        }
        for (i, l) in lines {
            if !l?.trim().is_empty() {
                return Err(parse_err(i, "trailing content after the last matrix row"));
            }
        }
        let matrix = ComplexMatrix::new(n, n, data).map_err(|e| parse_err(0, e.to_string()))?;
        Ok(Self { dims, matrix })
    }

    pub fn write_path(&self, path: &std::path::Path) -> std::io::Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()
    }

    pub fn read_path(path: &std::path::Path) -> Result<Self, QmxError> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> QmxFile {
        let dims = SubsystemDims::key_shield(2);
        let m = ComplexMatrix::from_fn(16, 16, |i, j| {
            C64::new(i as f64 / 3.0, -(j as f64) * 1e-300)
        });
        QmxFile::new(dims, m).unwrap()
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("QMX 1"));
        assert_eq!(lines.next(), Some("dims: 2 2 2 2"));
        assert_eq!(lines.next(), Some("order: ABA'B'"));
        assert_eq!(lines.count(), 16);
    }

    #[test]
    fn round_trip_is_exact() {
        let f = sample();
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        assert_eq!(QmxFile::read_from(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let good = {
            let mut buf = Vec::new();
            sample().write_to(&mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let cases = [
            good.replacen("QMX 1", "QMX 2", 1),
            good.replacen("dims: 2 2 2 2", "dims: 2 2 2", 1),
            good.replacen("order: ABA'B'", "order: BA", 1),
            good.replacen("e0,", "e0;", 1),
            good.lines().take(10).collect::<Vec<_>>().join("\n"),
            format!("{good}garbage\n"),
        ];
        for c in cases {
            assert!(
                matches!(
                    QmxFile::read_from(c.as_bytes()),
                    Err(QmxError::Parse { .. })
                ),
                "{c}"
            );
        }
    }
}
