//! Run records and their renderings.
//!
//! A [`RunRecord`] is the versioned, self-describing output of one solve: the
//! instance name, the configuration that produced it, the final report and the
//! per-iteration bound trace. JSON has no infinities, so non-finite bounds are
//! written as the strings `"inf"` / `"-inf"`.

use std::io::{self, Write};

use dccut_core::{Point, SolveReport, SolverConfig, TraceRow};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Serde adapter for `f64` values that may be infinite.
mod extended {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!(
                    "expected a number or inf, found {other:?}"
                ))),
            },
        }
    }
}

/// The user-facing subset of [`SolverConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub algo: String,
    pub t: f64,
    pub eps: f64,
    pub nlap: usize,
    pub workers: usize,
    pub time_limit: Option<f64>,
    pub seed: u64,
    pub fbest: Option<f64>,
}

impl From<&SolverConfig> for ConfigEcho {
    fn from(cfg: &SolverConfig) -> Self {
        Self {
            algo: cfg.algo.as_str().to_string(),
            t: cfg.t,
            eps: cfg.eps,
            nlap: cfg.nlap,
            workers: cfg.workers,
            time_limit: cfg.time_limit,
            seed: cfg.seed,
            fbest: cfg.fbest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    #[serde(with = "extended")]
    pub lb: f64,
    #[serde(with = "extended")]
    pub ub: f64,
    pub cuts_added: usize,
}

impl From<&TraceRow> for TraceEntry {
    fn from(r: &TraceRow) -> Self {
        Self {
            iteration: r.iteration,
            lb: r.lb,
            ub: r.ub,
            cuts_added: r.cuts_added,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: u32,
    pub instance: String,
    pub config: ConfigEcho,
    pub status: String,
    #[serde(with = "extended")]
    pub ub: f64,
    #[serde(with = "extended")]
    pub lb: f64,
    #[serde(with = "extended")]
    pub gap: f64,
    pub clgap: Option<f64>,
    pub f0: Option<f64>,
    pub iterations: usize,
    pub cut_dc1: usize,
    pub cut_dc2: usize,
    pub cut_lap: usize,
    pub wall_time: f64,
    pub u_opt: Option<Point>,
    pub trace: Vec<TraceEntry>,
}

impl RunRecord {
    pub fn new(instance: &str, cfg: &SolverConfig, report: &SolveReport) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            instance: instance.to_string(),
            config: cfg.into(),
            status: report.status.as_str().to_string(),
            ub: report.ub,
            lb: report.lb,
            gap: report.gap,
            clgap: report.clgap,
            f0: report.f0,
            iterations: report.iterations,
            cut_dc1: report.cut_dc1,
            cut_dc2: report.cut_dc2,
            cut_lap: report.cut_lap,
            wall_time: report.wall_time,
            u_opt: report.u_opt.clone(),
            trace: report.trace.iter().map(TraceEntry::from).collect(),
        }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v}"));
        writeln!(out, "instance    {}", self.instance)?;
        writeln!(
            out,
            "config      algo={} t={} eps={} nlap={} workers={} seed={}",
            self.config.algo,
            self.config.t,
            self.config.eps,
            self.config.nlap,
            self.config.workers,
            self.config.seed
        )?;
        writeln!(out, "status      {}", self.status)?;
        writeln!(out, "ub          {}", self.ub)?;
        writeln!(out, "lb          {}", self.lb)?;
        writeln!(out, "gap         {}", self.gap)?;
        writeln!(out, "clgap       {}", opt(self.clgap))?;
        writeln!(out, "f0          {}", opt(self.f0))?;
        writeln!(out, "iterations  {}", self.iterations)?;
        writeln!(
            out,
            "cuts        dc1={} dc2={} lap={}",
            self.cut_dc1, self.cut_dc2, self.cut_lap
        )?;
        writeln!(out, "time_s      {:.3}", self.wall_time)?;
        if let Some(u) = &self.u_opt {
            writeln!(out, "x           {:?}", u.x)?;
            if !u.y.is_empty() {
                writeln!(out, "y           {:?}", u.y)?;
            }
        }
        Ok(())
    }

    /// The bound trace as CSV: `iteration,lb,ub,cuts_added`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "lb", "ub", "cuts_added"])?;
        for r in &self.trace {
            w.write_record([
                r.iteration.to_string(),
                r.lb.to_string(),
                r.ub.to_string(),
                r.cuts_added.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dccut_core::SolveStatus;

    fn report() -> SolveReport {
        SolveReport {
            status: SolveStatus::LimitReached,
            ub: f64::INFINITY,
            lb: -3.5,
            u_opt: None,
            gap: f64::INFINITY,
            clgap: None,
            f0: Some(-4.0),
            iterations: 2,
            cut_dc1: 0,
            cut_dc2: 1,
            cut_lap: 2,
            wall_time: 0.01,
            trace: vec![
                TraceRow {
                    iteration: 0,
                    lb: -4.0,
                    ub: f64::INFINITY,
                    cuts_added: 2,
                },
                TraceRow {
                    iteration: 1,
                    lb: -3.5,
                    ub: f64::INFINITY,
                    cuts_added: 1,
                },
            ],
            cuts: Vec::new(),
        }
    }

    #[test]
    fn json_round_trips_infinite_bounds() {
        let rec = RunRecord::new("toy", &SolverConfig::default(), &report());
        let mut buf = Vec::new();
        rec.write_json(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"ub\": \"inf\""));
        assert!(text.contains("\"schema\": 1"));
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn trace_csv_has_one_row_per_iteration() {
        let rec = RunRecord::new("toy", &SolverConfig::default(), &report());
        let mut buf = Vec::new();
        rec.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "iteration,lb,ub,cuts_added\n0,-4,inf,2\n1,-3.5,inf,1\n"
        );
    }

    #[test]
    fn text_lists_status_and_bounds() {
        let rec = RunRecord::new("toy", &SolverConfig::default(), &report());
        let mut buf = Vec::new();
        rec.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("status      limit-reached"));
        assert!(text.contains("clgap       -"));
    }
}
