//! A reader for the subset of MPS that maps onto mixed-binary programs.
//!
//! Supported: `NAME`, `ROWS` (`N`, `L`, `G`, `E`), `COLUMNS` with
//! `'MARKER' 'INTORG'`/`'INTEND'` blocks, `RHS`, `BOUNDS` and `ENDATA`.
//! Columns inside a marker block become binaries and must stay within
//! `[0, 1]`; every other column is continuous and needs a finite `UP` bound
//! and a zero lower bound. `G` rows are negated and each `E` row is split into
//! two `<=` rows. Fields are whitespace-separated, so names must not contain
//! spaces.
//!
//! Anything outside the subset (`RANGES`, `SOS`, `OBJSENSE`, general integers,
//! free or negative-bounded columns, a constant on the objective row) yields
//! [`MpsError::Unsupported`] naming the feature.

use std::collections::{HashMap, HashSet};

use dccut_core::{InstanceError, MblpInstance};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpsError {
    #[error("line {line}: unsupported MPS feature: {feature}")]
    Unsupported { line: usize, feature: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown row {name:?}")]
    UnknownRow { line: usize, name: String },
    #[error("line {line}: unknown column {name:?}")]
    UnknownColumn { line: usize, name: String },
    #[error("continuous column {0:?} has no finite upper bound")]
    UnboundedContinuous(String),
    #[error("no objective (N) row")]
    MissingObjective,
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
}

#[derive(Clone, Copy, PartialEq)]
enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Rows,
    Columns,
    Rhs,
    Bounds,
}

struct Column {
    binary: bool,
    entries: Vec<(usize, f64)>,
    cost: f64,
    upper: Option<f64>,
}

fn number(line: usize, tok: &str) -> Result<f64, MpsError> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| MpsError::Syntax {
            line,
            message: format!("cannot parse {tok:?} as a number"),
        })
}

fn unsupported(line: usize, feature: impl Into<String>) -> MpsError {
    MpsError::Unsupported {
        line,
        feature: feature.into(),
    }
}

/// Parses an MPS model. Returns the instance and the model name (empty if the
/// file has no `NAME` line).
pub fn parse_mps(text: &str) -> Result<(MblpInstance, String), MpsError> {
    let mut name = String::new();
    let mut objective: Option<String> = None;
    let mut rows: Vec<(String, Sense)> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut columns: Vec<(String, Column)> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut rhs: HashMap<usize, f64> = HashMap::new();
    let mut free_rows: HashSet<String> = HashSet::new();
    let mut in_marker = false;
    let mut section: Option<Section> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(char::is_whitespace) {
            // Section header.
            match tokens[0] {
                "NAME" => name = tokens.get(1).unwrap_or(&"").to_string(),
                "ROWS" => section = Some(Section::Rows),
                "COLUMNS" => section = Some(Section::Columns),
                "RHS" => section = Some(Section::Rhs),
                "BOUNDS" => section = Some(Section::Bounds),
                "ENDATA" => break,
                other @ ("RANGES" | "SOS" | "OBJSENSE" | "QUADOBJ" | "QSECTION" | "QMATRIX"
                | "QCMATRIX" | "CSECTION" | "INDICATORS" | "OBJNAME") => {
                    return Err(unsupported(line, format!("{other} section")))
                }
                other => {
                    return Err(MpsError::Syntax {
                        line,
                        message: format!("unknown section {other:?}"),
                    })
                }
            }
            continue;
        }
        match section {
            None => {
                return Err(MpsError::Syntax {
                    line,
                    message: "data line before any section".into(),
                })
            }
            Some(Section::Rows) => {
                let [kind, row] = tokens[..] else {
                    return Err(MpsError::Syntax {
                        line,
                        message: "ROWS entries need a type and a name".into(),
                    });
                };
                let sense = match kind {
                    "N" => {
                        // Extra free rows carry no constraint; only the first is the objective.
                        if objective.is_none() {
                            objective = Some(row.to_string());
                        } else {
                            free_rows.insert(row.to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    other => {
                        return Err(MpsError::Syntax {
                            line,
                            message: format!("row type must be N, L, G or E, found {other:?}"),
                        })
                    }
                };
                row_index.insert(row.to_string(), rows.len());
                rows.push((row.to_string(), sense));
            }
            Some(Section::Columns) => {
                if tokens.len() >= 3 && tokens[1].trim_matches('\'') == "MARKER" {
                    match tokens[2].trim_matches('\'') {
                        "INTORG" => in_marker = true,
                        "INTEND" => in_marker = false,
                        other => {
                            return Err(MpsError::Syntax {
                                line,
                                message: format!("unknown marker {other:?}"),
                            })
                        }
                    }
                    continue;
                }
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(MpsError::Syntax {
                        line,
                        message: "COLUMNS entries are `column row value [row value]`".into(),
                    });
                }
                let col = tokens[0];
                let idx = *col_index.entry(col.to_string()).or_insert_with(|| {
                    columns.push((
                        col.to_string(),
                        Column {
                            binary: in_marker,
                            entries: Vec::new(),
                            cost: 0.0,
                            upper: if in_marker { Some(1.0) } else { None },
                        },
                    ));
                    columns.len() - 1
                });
                for pair in tokens[1..].chunks(2) {
                    let value = number(line, pair[1])?;
                    if Some(pair[0]) == objective.as_deref() {
                        columns[idx].1.cost += value;
                    } else if !free_rows.contains(pair[0]) {
                        let r = *row_index.get(pair[0]).ok_or_else(|| MpsError::UnknownRow {
                            line,
                            name: pair[0].to_string(),
                        })?;
                        columns[idx].1.entries.push((r, value));
                    }
                }
            }
            Some(Section::Rhs) => {
                // The set name is optional: an odd token count means it is present.
                let pairs = if tokens.len() % 2 == 1 {
                    &tokens[1..]
                } else {
                    &tokens[..]
                };
                if pairs.is_empty() || pairs.len() > 4 {
                    return Err(MpsError::Syntax {
                        line,
                        message: "RHS entries are `[set] row value [row value]`".into(),
                    });
                }
                for pair in pairs.chunks(2) {
                    if Some(pair[0]) == objective.as_deref() {
                        return Err(unsupported(
                            line,
                            "RHS on the objective row (objective constant)",
                        ));
                    }
                    if free_rows.contains(pair[0]) {
                        continue;
                    }
                    let r = *row_index.get(pair[0]).ok_or_else(|| MpsError::UnknownRow {
                        line,
                        name: pair[0].to_string(),
                    })?;
                    rhs.insert(r, number(line, pair[1])?);
                }
            }
            Some(Section::Bounds) => bound_line(line, &tokens, &col_index, &mut columns)?,
        }
    }

    if objective.is_none() {
        return Err(MpsError::MissingObjective);
    }

    let mut c = Vec::new();
    let mut d = Vec::new();
    let mut ybar = Vec::new();
    // Position of each column within x (binaries) or y (continuous).
    let mut slot = Vec::with_capacity(columns.len());
    for (cname, col) in &columns {
        if col.binary {
            slot.push((true, c.len()));
            c.push(col.cost);
        } else {
            let up = col
                .upper
                .ok_or_else(|| MpsError::UnboundedContinuous(cname.clone()))?;
            slot.push((false, d.len()));
            d.push(col.cost);
            ybar.push(up);
        }
    }

    let mut a_rows = vec![vec![0.0; c.len()]; rows.len()];
    let mut b_rows = vec![vec![0.0; d.len()]; rows.len()];
    for ((_, col), &(binary, k)) in columns.iter().zip(&slot) {
        for &(r, v) in &col.entries {
            if binary {
                a_rows[r][k] += v;
            } else {
                b_rows[r][k] += v;
            }
        }
    }

    let (mut a, mut bm, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for (r, (_, sense)) in rows.iter().enumerate() {
        let rhs_r = rhs.get(&r).copied().unwrap_or(0.0);
        let neg = |v: &Vec<f64>| v.iter().map(|x| -x).collect::<Vec<_>>();
        if matches!(sense, Sense::Le | Sense::Eq) {
            a.push(a_rows[r].clone());
            bm.push(b_rows[r].clone());
            b.push(rhs_r);
        }
        if matches!(sense, Sense::Ge | Sense::Eq) {
            a.push(neg(&a_rows[r]));
            bm.push(neg(&b_rows[r]));
            b.push(-rhs_r);
        }
    }
    Ok((MblpInstance::new(c, d, a, bm, b, ybar)?, name))
}

fn bound_line(
    line: usize,
    tokens: &[&str],
    col_index: &HashMap<String, usize>,
    columns: &mut [(String, Column)],
) -> Result<(), MpsError> {
    let kind = tokens[0];
    let needs_value = matches!(kind, "UP" | "LO" | "FX" | "LI" | "UI" | "SC");
    // `type [set] column [value]`
    let (col, value) = match (needs_value, tokens.len()) {
        (true, 4) => (tokens[2], Some(tokens[3])),
        (true, 3) => (tokens[1], Some(tokens[2])),
        (false, 3) => (tokens[2], None),
        (false, 2) => (tokens[1], None),
        (false, 4) => (tokens[2], Some(tokens[3])),
        _ => {
            return Err(MpsError::Syntax {
                line,
                message: "BOUNDS entries are `type [set] column [value]`".into(),
            })
        }
    };
    let idx = *col_index.get(col).ok_or_else(|| MpsError::UnknownColumn {
        line,
        name: col.to_string(),
    })?;
    let value = value.map(|v| number(line, v)).transpose()?;
    let column = &mut columns[idx].1;
    match (kind, value) {
        ("UP", Some(v)) if column.binary => {
            if v != 1.0 {
                return Err(unsupported(
                    line,
                    format!("general-integer column {col:?} (upper bound {v})"),
                ));
            }
        }
        ("UP", Some(v)) => {
            if v < 0.0 {
                return Err(unsupported(
                    line,
                    format!("negative upper bound on {col:?}"),
                ));
            }
            column.upper = Some(v);
        }
        ("LO", Some(v)) => {
            if v != 0.0 {
                return Err(unsupported(line, format!("nonzero lower bound on {col:?}")));
            }
        }
        ("BV", _) => {
            column.binary = true;
            column.upper = Some(1.0);
        }
        (other, _) => {
            return Err(unsupported(line, format!("{other} bound on {col:?}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
NAME          SMALL
ROWS
 N  COST
 L  LIM1
 G  LIM2
 E  MYEQN
COLUMNS
    MARKER                 'MARKER'                 'INTORG'
    X1        COST         1.0   LIM1         1.0
    X1        LIM2         1.0
    MARKER                 'MARKER'                 'INTEND'
    Y1        COST         2.0   LIM1         1.0
    Y1        MYEQN       -1.0
RHS
    RHS       LIM1         4.0   LIM2         1.0
    RHS       MYEQN        7.0
BOUNDS
 UP BND       Y1           4.0
ENDATA
";

    #[test]
    fn parses_the_supported_subset() {
        let (inst, name) = parse_mps(SMALL).unwrap();
        assert_eq!(name, "SMALL");
        assert_eq!((inst.n(), inst.q(), inst.m()), (1, 1, 4));
        assert_eq!(inst.c(), &[1.0]);
        assert_eq!(inst.d(), &[2.0]);
        assert_eq!(inst.ybar(), &[4.0]);
        // LIM1 <=, LIM2 negated, MYEQN split in two.
        assert_eq!(inst.b(), &[4.0, -1.0, 7.0, -7.0]);
        assert_eq!(inst.a_row(1), &[-1.0]);
        assert_eq!(inst.b_row(2), &[-1.0]);
        assert_eq!(inst.b_row(3), &[1.0]);
    }

    #[test]
    fn unsupported_features_are_named() {
        let with_ranges = SMALL.replace("BOUNDS", "RANGES\n    RNG       LIM1   2.0\nBOUNDS");
        let err = parse_mps(&with_ranges).unwrap_err();
        assert!(
            matches!(&err, MpsError::Unsupported { feature, .. } if feature.contains("RANGES"))
        );

        let general = SMALL.replace(
            " UP BND       Y1           4.0",
            " UP BND       Y1           4.0\n UP BND       X1           3.0",
        );
        let err = parse_mps(&general).unwrap_err();
        assert!(
            matches!(&err, MpsError::Unsupported { feature, .. } if feature.contains("general-integer"))
        );

        let obj_rhs = SMALL.replace(
            "    RHS       MYEQN        7.0",
            "    RHS       COST         7.0",
        );
        assert!(matches!(
            parse_mps(&obj_rhs).unwrap_err(),
            MpsError::Unsupported { .. }
        ));

        let free = SMALL.replace(" UP BND       Y1           4.0", " FR BND       Y1");
        assert!(matches!(
            parse_mps(&free).unwrap_err(),
            MpsError::Unsupported { .. }
        ));
    }

    #[test]
    fn continuous_columns_need_an_upper_bound() {
        let unbounded = SMALL.replace(" UP BND       Y1           4.0\n", "");
        assert_eq!(
            parse_mps(&unbounded).unwrap_err(),
            MpsError::UnboundedContinuous("Y1".into())
        );
    }

    #[test]
    fn binary_bounds_are_accepted() {
        let bv = SMALL.replace(
            " UP BND       Y1           4.0",
            " UP BND       Y1           4.0\n BV BND       X1",
        );
        assert!(parse_mps(&bv).is_ok());
    }
}
