use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::norms::NormKind;

use super::{ConvergenceRow, ConvergenceTable, ExperimentConfig, MeshSummary};

/// CSV schema: one row per `k`.
#[derive(Clone, Debug, Serialize)]
pub struct CsvRow {
    pub k: u32,
    pub var_frobenius: f64,
    pub var_schatten: f64,
    pub var_interface: f64,
    pub sup_err: f64,
    pub l1_err: f64,
    pub target: f64,
}

impl From<&ConvergenceRow> for CsvRow {
    fn from(r: &ConvergenceRow) -> Self {
        CsvRow {
            k: r.k,
            var_frobenius: r.var_frobenius,
            var_schatten: r.var_schatten,
            var_interface: r.var_interface,
            sup_err: r.sup_err,
            l1_err: r.l1_err,
            target: r.target,
        }
    }
}

pub fn write_csv<W: Write>(out: W, table: &ConvergenceTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &table.rows {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Run manifest: configuration echo, library version, targets and rows.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest<'a> {
    pub version: &'static str,
    pub config: &'a ExperimentConfig,
    pub field: &'a str,
    pub mesh: &'a MeshSummary,
    pub targets: &'a BTreeMap<NormKind, f64>,
    pub target: f64,
    pub rows: &'a [ConvergenceRow],
}

pub fn write_manifest<W: Write>(out: W, cfg: &ExperimentConfig, table: &ConvergenceTable) -> Result<()> {
    let m = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        field: &table.field,
        mesh: &table.mesh,
        targets: &table.targets,
        target: table.target,
        rows: &table.rows,
    };
    serde_json::to_writer_pretty(out, &m)?;
    Ok(())
}

/// Writes `convergence.csv` and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, table: &ConvergenceTable) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_csv(fs::File::create(dir.join("convergence.csv"))?, table)?;
    let mut f = fs::File::create(dir.join("manifest.json"))?;
    write_manifest(&mut f, cfg, table)?;
    f.write_all(b"\n")?;
    Ok(())
}
