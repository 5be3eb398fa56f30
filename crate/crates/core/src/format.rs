//! Text format shared by matrices and hypergraphs.
//!
//! ```text
//! # optional comment lines
//! n=7 k=3 m=2
//! 0,1,2
//! 2,3,4
//! ```
//!
//! One column per line, indices 0-based and strictly increasing. Lines
//! starting with `#` are ignored wherever they appear.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::gf2::ColumnSet;

/// A parsed instance: dimensions plus columns in file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub n: usize,
    pub k: usize,
    pub columns: Vec<ColumnSet>,
}

pub fn header_line(n: usize, k: usize, m: usize) -> String {
    format!("n={n} k={k} m={m}")
}

pub fn write_instance<W: Write>(mut w: W, n: usize, k: usize, columns: &[ColumnSet]) -> Result<()> {
    writeln!(w, "{}", header_line(n, k, columns.len()))?;
    for c in columns {
        writeln!(w, "{c}")?;
    }
    Ok(())
}

pub fn to_string(n: usize, k: usize, columns: &[ColumnSet]) -> String {
    let mut buf = Vec::new();
    write_instance(&mut buf, n, k, columns).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii")
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize, usize)> {
    let mut n = None;
    let mut k = None;
    let mut m = None;
    for tok in line.split_whitespace() {
        let (key, val) = tok.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected key=value, found {tok:?}"),
        })?;
        let val: usize = val.parse().map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("bad value for {key}: {e}"),
        })?;
        let slot = match key {
            "n" => &mut n,
            "k" => &mut k,
            "m" => &mut m,
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown header key {key:?}"),
                })
            }
        };
        if slot.replace(val).is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate header key {key:?}"),
            });
        }
    }
    match (n, k, m) {
        (Some(n), Some(k), Some(m)) => Ok((n, k, m)),
        _ => Err(Error::Parse {
            line: line_no,
            msg: "header must be \"n=<n> k=<k> m=<m>\"".into(),
        }),
    }
}

pub fn read_instance<R: BufRead>(r: R) -> Result<Instance> {
    let mut header = None;
    let mut columns = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let t = line.trim();
        if t.starts_with('#') {
            continue;
        }
        let Some((n, k, m)) = header else {
            if t.is_empty() {
                continue;
            }
            header = Some(parse_header(t, line_no)?);
            continue;
        };
        if t.is_empty() && columns.len() == m {
            continue;
        }
        if columns.len() == m {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("more than m={m} columns"),
            });
        }
        let col = ColumnSet::parse(n, t).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if col.k() != k {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("column has {} ones, header says k={k}", col.k()),
            });
        }
        columns.push(col);
    }
    let (n, k, m) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    if columns.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header says m={m}, found {} columns", columns.len()),
        });
    }
    Ok(Instance { n, k, columns })
}

pub fn from_str(s: &str) -> Result<Instance> {
    read_instance(s.as_bytes())
}
