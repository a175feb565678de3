//! CSV and JSON artifacts.
//!
//! Floats are written in their shortest round-trip form, so identical runs
//! produce identical bytes.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::GammaRun;
use crate::meso::{FrontRecord, FrontTrace, MesoField};
use crate::trajectory::{PositionKind, StopReason, TipSample, TipTrajectory};

pub const LATTICE_HEADER: &str = "t,left_tip,right_tip,n_particles,q_estimate";
pub const CONTINUUM_HEADER: &str = "t,left_tip,right_tip,n_particles";
pub const GAMMA_HEADER: &str = "t,right_tip,n_particles";
pub const FRAME_HEADER: &str = "x,u";
pub const FRONT_HEADER: &str = "t,level,x_left,x_right";
pub const SUMMARY_HEADER: &str = "check,alpha,slope,stderr,pass";

pub fn lattice_file_name(alpha: f64, seed: u64) -> String {
    format!("lattice_{alpha}_{seed}.csv")
}

pub fn continuum_file_name(alpha: f64, seed: u64) -> String {
    format!("continuum_{alpha}_{seed}.csv")
}

pub fn gamma_file_name(seed: u64) -> String {
    format!("gamma_{seed}.csv")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Writes a trajectory with the column set of its kind.
pub fn write_trajectory_csv(path: &Path, traj: &TipTrajectory) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    match traj.kind {
        PositionKind::Lattice => {
            // `+ 0.0` turns `-0` into `0`.
            writeln!(w, "{LATTICE_HEADER}").map_err(io)?;
            for s in &traj.samples {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    s.t,
                    s.left_tip + 0.0,
                    s.right_tip + 0.0,
                    s.n_particles,
                    opt(s.q_estimate)
                )
                .map_err(io)?;
            }
        }
        PositionKind::Continuum => {
            writeln!(w, "{CONTINUUM_HEADER}").map_err(io)?;
            for s in &traj.samples {
                writeln!(w, "{},{},{},{}", s.t, s.left_tip + 0.0, s.right_tip + 0.0, s.n_particles).map_err(io)?;
            }
        }
    }
    finish(path, w)
}

fn parse<T: std::str::FromStr>(path: &Path, line: usize, field: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Serde(format!("{}:{line}: cannot parse {field:?}", path.display())))
}

/// Reads a lattice or continuum trajectory CSV; the kind follows the header.
pub fn read_trajectory_csv(path: &Path) -> Result<TipTrajectory> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(f).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(path, e))?
        .ok_or_else(|| Error::Serde(format!("{} is empty", path.display())))?;
    let kind = match header.trim() {
        LATTICE_HEADER => PositionKind::Lattice,
        CONTINUUM_HEADER => PositionKind::Continuum,
        other => return Err(Error::Serde(format!("{}: unknown header {other:?}", path.display()))),
    };
    let mut traj = TipTrajectory::new(kind);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() < 4 {
            return Err(Error::Serde(format!("{}:{}: expected at least 4 fields", path.display(), i + 2)));
        }
        let q_estimate = match f.get(4) {
            Some(s) if !s.trim().is_empty() => Some(parse(path, i + 2, s)?),
            _ => None,
        };
        traj.samples.push(TipSample {
            t: parse(path, i + 2, f[0])?,
            left_tip: parse(path, i + 2, f[1])?,
            right_tip: parse(path, i + 2, f[2])?,
            n_particles: parse(path, i + 2, f[3])?,
            q_estimate,
        });
    }
    traj.stop = StopReason::Horizon;
    Ok(traj)
}

pub fn write_gamma_csv(path: &Path, run: &GammaRun) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{GAMMA_HEADER}").map_err(io)?;
    for s in &run.trajectory.samples {
        writeln!(w, "{},{},{}", s.t, s.right_tip, s.n_particles).map_err(io)?;
    }
    finish(path, w)
}

/// Final occupation `x,count` of a run.
pub fn write_counts_csv(path: &Path, counts: &[u64]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "x,count").map_err(io)?;
    for (x, c) in counts.iter().enumerate() {
        writeln!(w, "{x},{c}").map_err(io)?;
    }
    finish(path, w)
}

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:05}.csv")
}

/// One stored time of the grid solution, `x,u` per cell.
pub fn write_frame_csv(path: &Path, field: &MesoField) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "# t = {}", field.t).map_err(io)?;
    writeln!(w, "{FRAME_HEADER}").map_err(io)?;
    for (i, u) in field.u.iter().enumerate() {
        writeln!(w, "{},{u}", field.grid.x(i)).map_err(io)?;
    }
    finish(path, w)
}

pub fn write_front_csv(path: &Path, trace: &FrontTrace) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{FRONT_HEADER}").map_err(io)?;
    for r in &trace.records {
        writeln!(w, "{},{},{},{}", r.t, trace.level, opt(r.x_left), opt(r.x_right)).map_err(io)?;
    }
    finish(path, w)
}

pub fn read_front_csv(path: &Path) -> Result<FrontTrace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(FRONT_HEADER) {
        return Err(Error::Serde(format!("{}: expected header {FRONT_HEADER:?}", path.display())));
    }
    let mut trace = FrontTrace::new(f64::NAN);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(Error::Serde(format!("{}:{}: expected 4 fields", path.display(), i + 2)));
        }
        let o = |s: &str| -> Result<Option<f64>> {
            if s.trim().is_empty() {
                Ok(None)
            } else {
                parse(path, i + 2, s).map(Some)
            }
        };
        trace.level = parse(path, i + 2, f[1])?;
        trace.records.push(FrontRecord {
            t: parse(path, i + 2, f[0])?,
            x_left: o(f[2])?,
            x_right: o(f[3])?,
        });
    }
    Ok(trace)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    finish(path, w)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Outcome of one verification check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: serde_json::Value,
    pub max_violation: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub check: String,
    pub alpha: f64,
    pub slope: f64,
    pub stderr: f64,
    pub pass: bool,
}

/// Appends rows to `summary.csv`, writing the header if the file is new.
pub fn append_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let fresh = !path.exists();
    let f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    let io = |e| Error::io(path, e);
    if fresh {
        writeln!(w, "{SUMMARY_HEADER}").map_err(io)?;
    }
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.check, r.alpha, r.slope, r.stderr, r.pass).map_err(io)?;
    }
    finish(path, w)
}
