//! CSV and JSON exchange formats. Floats are written in shortest
//! round-trip form, so identical inputs give byte-identical files.

use crate::burgers::CharacteristicSolution;
use crate::error::Result;
use crate::estimates::BoundReport;
use crate::galerkin::Trajectory;
use crate::spectrum::FourierState;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

pub const SCHEMA_VERSION: u32 = 1;

/// Machine-readable summary written by every driver command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub result: serde_json::Value,
}

impl Summary {
    pub fn new(command: &str, config: &impl Serialize, result: &impl Serialize) -> Result<Self> {
        Ok(Summary {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            result: serde_json::to_value(result)?,
        })
    }

    pub fn write(&self, w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

pub fn write_state_json(state: &FourierState, w: impl Write) -> Result<()> {
    serde_json::to_writer(w, state)?;
    Ok(())
}

pub fn read_state_json(r: impl Read) -> Result<FourierState> {
    Ok(serde_json::from_reader(r)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct ModeRow {
    k: i64,
    re: f64,
    im: f64,
}

/// Columns `k,re,im`.
pub fn write_state_csv(state: &FourierState, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (k, z) in state.iter() {
        out.serialize(ModeRow { k, re: z.re, im: z.im })?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_state_csv(r: impl Read) -> Result<FourierState> {
    let mut rd = csv::Reader::from_reader(r);
    let mut pairs = Vec::new();
    for row in rd.deserialize() {
        let row: ModeRow = row?;
        pairs.push((row.k, Complex64::new(row.re, row.im)));
    }
    FourierState::from_pairs(pairs)
}

#[derive(Serialize)]
struct TrajRow {
    t: f64,
    k: i64,
    re: f64,
    im: f64,
}

/// Columns `t,k,re,im`, one row per stored mode per recorded time.
pub fn write_trajectory_csv(traj: &Trajectory, w: impl Write) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    // header even for an all-zero trajectory
    out.write_record(["t", "k", "re", "im"])?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        for (k, z) in s.iter() {
            out.serialize(TrajRow { t: *t, k, re: z.re, im: z.im })?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Columns `trial,ratio`.
pub fn write_ratios_csv(report: &BoundReport, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["trial", "ratio"])?;
    for (i, r) in report.ratios.iter().enumerate() {
        out.write_record([i.to_string(), r.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// One sample of a Burgers run.
#[derive(Debug, Clone, Serialize)]
pub struct BurgersRow {
    pub t: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub abs_v: f64,
    pub abs_dz_v: f64,
    pub abs_denominator: f64,
}

impl BurgersRow {
    pub fn new(t: f64, z: Complex64, sol: &CharacteristicSolution) -> Self {
        BurgersRow {
            t,
            z_re: z.re,
            z_im: z.im,
            abs_v: sol.v.norm(),
            abs_dz_v: sol.dz_v.norm(),
            abs_denominator: sol.denominator.norm(),
        }
    }
}

pub fn write_burgers_csv(rows: &[BurgersRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
