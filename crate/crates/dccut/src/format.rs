//! The plain-text instance format.
//!
//! ```text
//! # comment
//! mblp <n> <q> <m>
//! c    <n numbers>
//! d    <q numbers>
//! b    <m numbers>
//! ybar <q numbers>
//! sense <= >= ...        (optional, one entry per row; defaults to <=)
//! <m rows of n + q numbers: the A-part followed by the B-part>
//! ```
//!
//! Labelled lines may come in any order but must precede the rows. Rows
//! marked `>=` are negated on parse, so instances always hold `<=` rows.
//! [`serialize_instance`] writes every number with Rust's shortest
//! round-trip formatting, so parse(serialize(inst)) is bit-exact.

use std::fmt::Write as _;

use dccut_core::{InstanceError, MblpInstance};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: cannot parse {token:?} as a number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: row {row} has {found} entries, expected {expected}")]
    RowLength {
        line: usize,
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("line {line}: `{label}` has {found} entries, expected {expected}")]
    VectorLength {
        line: usize,
        label: &'static str,
        found: usize,
        expected: usize,
    },
    #[error("line {line}: ybar[{index}] = {value} is negative")]
    NegativeUpperBound {
        line: usize,
        index: usize,
        value: f64,
    },
    #[error("expected {expected} constraint rows, found {found}")]
    MissingRows { expected: usize, found: usize },
    #[error("missing `{0}` line")]
    MissingVector(&'static str),
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
}

fn numbers(line: usize, tokens: &[&str]) -> Result<Vec<f64>, FormatError> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| FormatError::BadNumber {
                    line,
                    token: (*t).to_string(),
                })
        })
        .collect()
}

/// Parses the text format, validating every dimension.
pub fn parse_instance(text: &str) -> Result<MblpInstance, FormatError> {
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then_some((i + 1, content))
    });

    let (hline, header) = lines.next().ok_or(FormatError::Syntax {
        line: 1,
        message: "empty input; expected `mblp <n> <q> <m>`".into(),
    })?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "mblp" {
        return Err(FormatError::Syntax {
            line: hline,
            message: format!("expected `mblp <n> <q> <m>`, found {header:?}"),
        });
    }
    let dims: Vec<usize> = h[1..]
        .iter()
        .map(|t| {
            t.parse().map_err(|_| FormatError::Syntax {
                line: hline,
                message: format!("{t:?} is not a non-negative integer"),
            })
        })
        .collect::<Result<_, _>>()?;
    let (n, q, m) = (dims[0], dims[1], dims[2]);

    let mut c = None;
    let mut d = None;
    let mut b = None;
    let mut ybar: Option<(usize, Vec<f64>)> = None;
    let mut sense: Option<Vec<bool>> = None;
    let mut a_rows = Vec::with_capacity(m);
    let mut b_rows = Vec::with_capacity(m);
    let mut negate = Vec::new();

    for (line, content) in lines {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let (label, expected) = match tokens[0] {
            "c" => ("c", n),
            "d" => ("d", q),
            "b" => ("b", m),
            "ybar" => ("ybar", q),
            "sense" => ("sense", m),
            _ => ("", 0),
        };
        if !label.is_empty() {
            if !a_rows.is_empty() {
                return Err(FormatError::Syntax {
                    line,
                    message: format!("`{label}` line after constraint rows"),
                });
            }
            let found = tokens.len() - 1;
            if found != expected {
                return Err(FormatError::VectorLength {
                    line,
                    label,
                    found,
                    expected,
                });
            }
            if label == "sense" {
                let s = tokens[1..]
                    .iter()
                    .map(|t| match *t {
                        "<=" => Ok(false),
                        ">=" => Ok(true),
                        other => Err(FormatError::Syntax {
                            line,
                            message: format!("sense must be `<=` or `>=`, found {other:?}"),
                        }),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                sense = Some(s);
                continue;
            }
            let v = numbers(line, &tokens[1..])?;
            match label {
                "c" => c = Some(v),
                "d" => d = Some(v),
                "b" => b = Some(v),
                _ => ybar = Some((line, v)),
            }
            continue;
        }
        let row = a_rows.len();
        if row == m {
            return Err(FormatError::Syntax {
                line,
                message: format!("more than the declared {m} rows"),
            });
        }
        let v = numbers(line, &tokens)?;
        if v.len() != n + q {
            return Err(FormatError::RowLength {
                line,
                row,
                found: v.len(),
                expected: n + q,
            });
        }
        if negate.is_empty() {
            negate = sense.clone().unwrap_or_else(|| vec![false; m]);
        }
        let sign = if negate[row] { -1.0 } else { 1.0 };
        a_rows.push(v[..n].iter().map(|x| sign * x).collect::<Vec<_>>());
        b_rows.push(v[n..].iter().map(|x| sign * x).collect::<Vec<_>>());
    }

    if a_rows.len() != m {
        return Err(FormatError::MissingRows {
            expected: m,
            found: a_rows.len(),
        });
    }
    let c = c.ok_or(FormatError::MissingVector("c"))?;
    let d = d.unwrap_or_default();
    let mut b = b.ok_or(FormatError::MissingVector("b"))?;
    if let Some(s) = &sense {
        for (bi, &neg) in b.iter_mut().zip(s) {
            if neg {
                *bi = -*bi;
            }
        }
    }
    let ybar = match ybar {
        Some((line, v)) => {
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, v)| **v < 0.0) {
                return Err(FormatError::NegativeUpperBound { line, index, value });
            }
            v
        }
        None if q == 0 => Vec::new(),
        None => return Err(FormatError::MissingVector("ybar")),
    };
    if q > 0 && d.len() != q {
        return Err(FormatError::MissingVector("d"));
    }
    Ok(MblpInstance::new(c, d, a_rows, b_rows, b, ybar)?)
}

fn join(v: &[f64]) -> String {
    let mut s = String::new();
    for x in v {
        let _ = write!(s, " {x}");
    }
    s
}

/// Writes `inst` in the text format (all rows `<=`).
pub fn serialize_instance(inst: &MblpInstance) -> String {
    let mut out = format!("mblp {} {} {}\n", inst.n(), inst.q(), inst.m());
    let _ = writeln!(out, "c{}", join(inst.c()));
    let _ = writeln!(out, "d{}", join(inst.d()));
    let _ = writeln!(out, "b{}", join(inst.b()));
    let _ = writeln!(out, "ybar{}", join(inst.ybar()));
    for i in 0..inst.m() {
        let mut row = inst.a_row(i).to_vec();
        row.extend_from_slice(inst.b_row(i));
        let _ = writeln!(out, "{}", join(&row).trim_start());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX_B: &str = "mblp 2 0 2\nc -1 -1\nd\nb 1 13\nybar\n4 -12\n12 4\n";

    #[test]
    fn ex_b_round_trip() {
        let inst = parse_instance(EX_B).unwrap();
        assert_eq!(inst.a_row(0), &[4.0, -12.0]);
        assert_eq!(inst.b(), &[1.0, 13.0]);
        let again = parse_instance(&serialize_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn pure_binary_may_omit_continuous_lines() {
        let inst = parse_instance("mblp 1 0 1\nc 1\nb 1\n1\n").unwrap();
        assert_eq!(inst.q(), 0);
        assert!(inst.d().is_empty() && inst.ybar().is_empty());
    }

    #[test]
    fn geq_rows_are_negated() {
        let inst = parse_instance("mblp 2 0 1\nc 1 1\nb -3\nsense >=\n-2 -3\n").unwrap();
        assert_eq!(inst.a_row(0), &[2.0, 3.0]);
        assert_eq!(inst.b(), &[3.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_instance("mblp 2 0 2\nc -1 -1\nb 1 13\n4 -12\n12\n").unwrap_err();
        assert_eq!(
            err,
            FormatError::RowLength {
                line: 5,
                row: 1,
                found: 1,
                expected: 2
            }
        );
        let err = parse_instance("mblp 1 1 1\nc 1\nd 1\nb 1\nybar -2\n1 1\n").unwrap_err();
        assert!(matches!(
            err,
            FormatError::NegativeUpperBound {
                line: 5,
                index: 0,
                ..
            }
        ));
        let err = parse_instance("mblp 1 0 1\nc x\nb 1\n1\n").unwrap_err();
        assert!(matches!(err, FormatError::BadNumber { line: 2, .. }));
        let err = parse_instance("# only a comment\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { .. }));
    }

    #[test]
    fn comments_are_ignored() {
        let inst = parse_instance("# hi\nmblp 1 0 1 # dims\nc 2 # cost\nb 1\n\n1 # row\n").unwrap();
        assert_eq!(inst.c(), &[2.0]);
    }
}
