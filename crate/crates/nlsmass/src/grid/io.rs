//! CSV (`r,u`) persistence for radial functions with a JSON sidecar.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{RadialFunction, RadialGrid, TailModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarTail {
    #[serde(rename = "C")]
    pub c: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub mu: Option<f64>,
    pub tail: Option<SidecarTail>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    r: f64,
    u: f64,
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes `u` to `path` and its sidecar next to it (same stem, `.json`).
/// Values use shortest round-trip formatting, so reading back is exact.
pub fn write_radial_csv(u: &RadialFunction, mu: Option<f64>, path: &Path) -> Result<PathBuf> {
    let mut w = csv::Writer::from_path(path)?;
    for (&r, &v) in u.grid().nodes().iter().zip(u.values()) {
        w.serialize(Row { r, u: v })?;
    }
    w.flush()?;
    let side = Sidecar {
        n: u.dim(),
        r_max: u.grid().r_max(),
        k: u.grid().intervals(),
        mu,
        tail: u.tail().map(|t| SidecarTail { c: t.amplitude, rate: t.rate }),
    };
    let side_path = sidecar_path(path);
    serde_json::to_writer_pretty(File::create(&side_path)?, &side)?;
    Ok(side_path)
}

pub fn read_radial_csv(path: &Path) -> Result<(RadialFunction, Sidecar)> {
    let side: Sidecar = serde_json::from_reader(File::open(sidecar_path(path))?)?;
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["r", "u"] {
        return Err(Error::Config(format!("{}: expected header `r,u`", path.display())));
    }
    let mut rs = Vec::new();
    let mut us = Vec::new();
    for row in rdr.deserialize() {
        let row: Row = row?;
        rs.push(row.r);
        us.push(row.u);
    }
    let grid = RadialGrid::uniform(side.n, side.r_max, side.k).map_err(|e| Error::Config(e.to_string()))?;
    if rs.len() != grid.len() {
        return Err(Error::Config(format!("{} rows but the sidecar declares K = {}", rs.len(), side.k)));
    }
    let tol = 1e-9 * grid.step();
    if rs.iter().zip(grid.nodes()).any(|(a, b)| (a - b).abs() > tol) {
        return Err(Error::Config("radial nodes are not the uniform grid declared by the sidecar".into()));
    }
    let mut u = RadialFunction::new(Arc::new(grid), us)?;
    if let Some(t) = &side.tail {
        u = u.with_tail(TailModel { amplitude: t.c, rate: t.rate })?;
    }
    Ok((u, side))
}
