use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use yamabe_core::continuation::{Branch, Direction, EventKind, Termination};
use yamabe_core::discretize::{assemble_residual, DiscreteSystem, SolutionPoint};
use yamabe_core::nalgebra::DVector;

use crate::config::RunConfig;
use crate::error::CliError;

pub const BRANCH_SCHEMA: &str = "yamabe-branch/1";

/// First line of a branch file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchHeader {
    pub schema: String,
    pub k: usize,
    pub direction: Direction,
    pub n: usize,
    pub delta: f64,
    pub q: f64,
    #[serde(rename = "N")]
    pub grid_degree: usize,
    pub quad_points: usize,
    pub termination: Termination,
    pub fields: Vec<String>,
}

/// One accepted continuation point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchRecord {
    pub s_coord: f64,
    pub lambda: f64,
    pub nodal_count: usize,
    pub sigma_min: f64,
    pub u_min: f64,
    pub phi: Vec<f64>,
    /// Events attached to this point, usually none.
    pub event: Vec<EventKind>,
}

impl BranchRecord {
    pub fn from_point(point: &SolutionPoint, event: Vec<EventKind>) -> Self {
        Self {
            s_coord: point.s_coord,
            lambda: point.lambda,
            nodal_count: point.nodal_count,
            sigma_min: point.sigma_min,
            u_min: point.u_min,
            phi: point.phi.clone(),
            event,
        }
    }

    pub fn to_point(&self) -> SolutionPoint {
        SolutionPoint {
            phi: self.phi.clone(),
            lambda: self.lambda,
            s_coord: self.s_coord,
            nodal_count: self.nodal_count,
            sigma_min: self.sigma_min,
            u_min: self.u_min,
        }
    }

    /// Recompute the diagnostics of the stored profile and compare.
    pub fn validate(&self, sys: &DiscreteSystem, tol: f64) -> Result<(), String> {
        if self.phi.len() != sys.size() {
            return Err(format!("profile has {} values, expected {}", self.phi.len(), sys.size()));
        }
        let phi = DVector::from_column_slice(&self.phi);
        let fresh = SolutionPoint::diagnose(sys, &phi, self.lambda, self.s_coord).map_err(|e| e.to_string())?;
        if fresh.u_min != self.u_min || !(self.u_min > 0.0) {
            return Err(format!("u_min {} does not match recomputed {}", self.u_min, fresh.u_min));
        }
        if fresh.nodal_count != self.nodal_count {
            return Err(format!("nodal count {} does not match recomputed {}", self.nodal_count, fresh.nodal_count));
        }
        if fresh.sigma_min != self.sigma_min {
            return Err(format!("sigma_min {} does not match recomputed {}", self.sigma_min, fresh.sigma_min));
        }
        let res = assemble_residual(&phi, self.lambda, sys).map_err(|e| e.to_string())?;
        if !(res.amax() < tol) {
            return Err(format!("residual {:e} is not below {tol:e}", res.amax()));
        }
        Ok(())
    }
}

pub fn branch_header(branch: &Branch, cfg: &RunConfig) -> BranchHeader {
    BranchHeader {
        schema: BRANCH_SCHEMA.to_string(),
        k: branch.k,
        direction: branch.direction,
        n: cfg.n,
        delta: cfg.delta,
        q: cfg.q,
        grid_degree: cfg.grid_degree,
        quad_points: cfg.quad_points(),
        termination: branch.termination,
        fields: ["s_coord", "lambda", "nodal_count", "sigma_min", "u_min", "phi", "event"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    }
}

pub fn branch_records(branch: &Branch) -> Vec<BranchRecord> {
    branch
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| BranchRecord::from_point(p, branch.events_at(i).collect()))
        .collect()
}

pub fn write_branch_jsonl(path: &Path, header: &BranchHeader, records: &[BranchRecord]) -> Result<(), CliError> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(&mut out, header)?;
    out.write_all(b"\n")?;
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_branch_jsonl(path: &Path) -> Result<(BranchHeader, Vec<BranchRecord>), CliError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let first = lines
        .next()
        .ok_or_else(|| CliError::Other(format!("{} is empty", path.display())))??;
    let header: BranchHeader = serde_json::from_str(&first)?;
    if header.schema != BRANCH_SCHEMA {
        return Err(CliError::Other(format!("unknown schema {:?}", header.schema)));
    }
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok((header, records))
}

/// Seventeen significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV text with a header row; every value printed with [`fmt_float`].
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn branch_csv(records: &[BranchRecord]) -> String {
    csv_text(&["s", "lambda", "sigma_min"], records.iter().map(|r| vec![r.s_coord, r.lambda, r.sigma_min]))
}

pub fn branch_stem(k: usize, direction: Direction) -> String {
    format!("branch_k{k}_{}", direction.name())
}
