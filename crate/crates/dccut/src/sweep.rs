//! Benchmark sweeps over algorithms and L&P cut budgets.
//!
//! Every `(algo, nlap)` cell is solved under its own time budget and becomes
//! one CSV row `nlap,algo,clgap,gap,ub,time_s`. A cell whose solve fails is
//! still written, with `NA` in the metric columns, and the sweep moves on.

use std::io::Write;
use std::time::Instant;

use dccut_core::{Algorithm, MblpInstance, SolverConfig};

pub const DEFAULT_CELL_BUDGET_S: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub nlap: usize,
    pub algo: Algorithm,
    pub clgap: Option<f64>,
    pub gap: Option<f64>,
    pub ub: Option<f64>,
    pub time_s: f64,
}

/// Solves every `(algo, nlap)` pair, algorithms in the outer loop.
pub fn run_sweep(
    inst: &MblpInstance,
    base: &SolverConfig,
    algos: &[Algorithm],
    nlaps: &[usize],
    budget_s: f64,
) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(algos.len() * nlaps.len());
    for &algo in algos {
        for &nlap in nlaps {
            let cfg = SolverConfig {
                algo,
                nlap,
                time_limit: Some(base.time_limit.map_or(budget_s, |t| t.min(budget_s))),
                ..base.clone()
            };
            let start = Instant::now();
            let row = match crate::solve(inst, &cfg) {
                Ok(rep) => SweepRow {
                    nlap,
                    algo,
                    clgap: rep.clgap,
                    gap: Some(rep.gap),
                    ub: Some(rep.ub),
                    time_s: rep.wall_time,
                },
                Err(e) => {
                    log::warn!("sweep cell algo={} nlap={nlap} failed: {e}", algo.as_str());
                    SweepRow {
                        nlap,
                        algo,
                        clgap: None,
                        gap: None,
                        ub: None,
                        time_s: start.elapsed().as_secs_f64(),
                    }
                }
            };
            rows.push(row);
        }
    }
    rows
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let na = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| v.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["nlap", "algo", "clgap", "gap", "ub", "time_s"])?;
    for r in rows {
        w.write_record([
            r.nlap.to_string(),
            r.algo.as_str().to_string(),
            na(r.clgap),
            na(r.gap),
            na(r.ub),
            format!("{:.6}", r.time_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> MblpInstance {
        MblpInstance::binary(
            vec![-1.0, -1.0],
            vec![vec![4.0, -12.0], vec![12.0, 4.0]],
            vec![1.0, 13.0],
        )
        .unwrap()
    }

    #[test]
    fn one_row_per_cell() {
        let rows = run_sweep(
            &toy(),
            &SolverConfig::default(),
            &[Algorithm::LapCut],
            &[1, 3],
            5.0,
        );
        assert_eq!(rows.len(), 2);
        assert_eq!(rows.iter().map(|r| r.nlap).collect::<Vec<_>>(), vec![1, 3]);
        assert!(rows.iter().all(|r| r.ub == Some(-1.0)));
    }

    #[test]
    fn clgap_is_one_at_the_optimum() {
        let cfg = SolverConfig {
            fbest: Some(-1.0),
            ..SolverConfig::default()
        };
        let rows = run_sweep(&toy(), &cfg, &[Algorithm::DcCut], &[1], 5.0);
        assert!(rows[0].clgap.unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn failed_cells_become_na() {
        let cfg = SolverConfig {
            eps: -1.0,
            ..SolverConfig::default()
        };
        let rows = run_sweep(&toy(), &cfg, &[Algorithm::DcCut], &[1], 5.0);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("nlap,algo,clgap,gap,ub,time_s"));
        assert!(lines.next().unwrap().starts_with("1,dccut,NA,NA,NA,"));
    }
}
