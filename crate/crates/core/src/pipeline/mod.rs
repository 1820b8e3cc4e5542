//! End-to-end experiments: mesh a box, interpolate a field, build a
//! laminate on every cell, and measure the assembled field's variation,
//! interface mismatch and approximation errors for a sequence of `k`.

mod builtin;
mod config;
mod io;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{face_partition_integral, ConvexPolytope, CutFamily, PiecewiseAffineField};
use crate::laminate::{build_bd_laminate, build_bv_laminate, region_variation, Mode, StaircaseField};
use crate::linalg::{norm, scale, sub, Matrix, SymMatrix};
use crate::norms::{frobenius, ssym, NormKind};
use crate::sampling::halton;

pub use builtin::{Builtin, BUILTIN_NAMES};
pub use config::{load_field, ExperimentConfig, FieldFile, FieldSpec, LoadedField, MeshJson};
pub use io::{write_csv, write_manifest, write_outputs, CsvRow, Manifest};

/// One row of a [`ConvergenceTable`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub k: u32,
    /// Total Frobenius variation (cells plus interior faces).
    pub var_frobenius: f64,
    /// Total variation under the mode's Schatten norm.
    pub var_schatten: f64,
    /// Mismatch between neighbouring laminates on interior faces.
    pub var_interface: f64,
    /// Largest per-cell sup-norm bound `Σ |c|/k`.
    pub sup_err: f64,
    /// Quasi-random estimate of `∫ |u_k − u_h|`.
    pub l1_err: f64,
    pub target: f64,
    /// Totals for every requested norm that applies.
    pub var_by_norm: BTreeMap<NormKind, f64>,
    /// Faces whose partition exceeded the sub-cell cap and were sampled.
    pub sampled_faces: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeshSummary {
    pub cells: usize,
    pub interior_faces: usize,
    pub delta: f64,
    pub regularity: f64,
    pub volume: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub mode: Mode,
    pub field: String,
    pub mesh: MeshSummary,
    /// `Σ_cells N(A_i) vol(T_i)` per norm (plus face jumps for
    /// discontinuous input); the mode's Schatten norm gives `target`.
    pub targets: BTreeMap<NormKind, f64>,
    pub target: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn last(&self) -> &ConvergenceRow {
        self.rows.last().expect("at least one k")
    }
}

/// The norm applied to a cell gradient for target values: in BD mode the
/// symmetric part is measured.
fn gradient_norm(mode: Mode, kind: NormKind, a: &Matrix) -> Result<f64> {
    match mode {
        Mode::Bv => kind.eval(a),
        Mode::Bd => kind.eval(&a.symmetric_part()),
    }
}

fn applicable_norms(mode: Mode, requested: &[NormKind], square: bool) -> Vec<NormKind> {
    let mut v: Vec<NormKind> = requested
        .iter()
        .copied()
        .chain([NormKind::Frobenius, mode.schatten_norm()])
        .filter(|k| square || *k != NormKind::Ssym)
        .collect();
    v.sort();
    v.dedup();
    v
}

struct FaceGeometry {
    polytope: ConvexPolytope,
    normal: Vec<f64>,
    cells: (usize, usize),
}

fn build_laminate(mode: Mode, a: &Matrix, b: &[f64], k: u32) -> Result<StaircaseField> {
    match mode {
        Mode::Bv => build_bv_laminate(a, b, k),
        Mode::Bd => build_bd_laminate(a, b, k),
    }
}

/// One laminate per cell, in cell order.
pub fn cell_laminates(field: &PiecewiseAffineField, mode: Mode, k: u32) -> Result<Vec<StaircaseField>> {
    field
        .cells
        .par_iter()
        .map(|c| build_laminate(mode, &c.a, &c.b, k))
        .collect()
}

fn cut_families(lams: &[&StaircaseField]) -> Vec<CutFamily> {
    lams.iter()
        .flat_map(|l| l.families())
        .map(|f| CutFamily {
            spacing: f.spacing(),
            direction: f.direction,
        })
        .collect()
}

struct FaceValues {
    by_norm: Vec<f64>,
    interface: f64,
    sampled: bool,
}

fn face_values(
    face: &FaceGeometry,
    lams: &[StaircaseField],
    mode: Mode,
    norms: &[NormKind],
) -> Result<FaceValues> {
    let (i, j) = face.cells;
    let (li, lj) = (&lams[i], &lams[j]);
    let nu = &face.normal;
    let minus_nu = scale(nu, -1.0);
    let cuts = cut_families(&[li, lj]);
    let jump = |x: &[f64]| sub(&lj.eval_one_sided(x, nu), &li.eval_one_sided(x, &minus_nu));
    let mismatch = |x: &[f64]| sub(&lj.eval_one_sided(x, nu), &li.eval_one_sided(x, nu));
    let form = mode.jump_form();
    let mut sampled = false;
    let mut by_norm = Vec::with_capacity(norms.len());
    for &nk in norms {
        let r = face_partition_integral(&face.polytope, nu, &cuts, &jump, nk, form)?;
        sampled |= r.std_error.is_some();
        by_norm.push(r.value);
    }
    let r = face_partition_integral(&face.polytope, nu, &cuts, &mismatch, mode.schatten_norm(), form)?;
    sampled |= r.std_error.is_some();
    Ok(FaceValues {
        by_norm,
        interface: r.value,
        sampled,
    })
}

fn l1_error(field: &PiecewiseAffineField, lams: &[StaircaseField], samples: usize) -> f64 {
    let per_cell = (samples / field.cells.len()).max(1) as u64;
    let n = field.n();
    let contributions: Vec<f64> = (0..field.cells.len())
        .into_par_iter()
        .map(|c| {
            let cell = field.mesh.cell(c);
            let mut sum = 0.0;
            for s in 0..per_cell {
                let x = cell.point_from_unit(&halton(s, n));
                sum += norm(&sub(&lams[c].eval(&x), &field.cells[c].apply(&x)));
            }
            cell.volume() * sum / per_cell as f64
        })
        .collect();
    contributions.iter().sum()
}

fn targets(
    field: &PiecewiseAffineField,
    faces: &[FaceGeometry],
    mode: Mode,
    norms: &[NormKind],
) -> Result<BTreeMap<NormKind, f64>> {
    let mut out = BTreeMap::new();
    for &nk in norms {
        let mut t = 0.0;
        for (c, map) in field.cells.iter().enumerate() {
            t += gradient_norm(mode, nk, &map.a)? * field.mesh.cell(c).volume();
        }
        if !field.continuous {
            for f in faces {
                let (i, j) = f.cells;
                let (mi, mj) = (&field.cells[i], &field.cells[j]);
                let jump = |x: &[f64]| sub(&mj.apply(x), &mi.apply(x));
                t += face_partition_integral(&f.polytope, &f.normal, &[], &jump, nk, mode.jump_form())?
                    .value;
            }
        }
        out.insert(nk, t);
    }
    Ok(out)
}

/// Runs the experiment described by `cfg` and, when `cfg.out_dir` is set,
/// writes `convergence.csv` and `manifest.json` there.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let loaded = load_field(cfg)?;
    let table = run_on_field(cfg, &loaded)?;
    if let Some(dir) = &cfg.out_dir {
        write_outputs(dir, cfg, &table)?;
    }
    Ok(table)
}

/// [`run_experiment`] on an already loaded field; writes nothing.
pub fn run_on_field(cfg: &ExperimentConfig, loaded: &LoadedField) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let field = &loaded.field;
    let mode = cfg.mode;
    let (n, m) = (field.n(), field.m);
    if mode == Mode::Bd && n != m {
        return Err(Error::InvalidField(format!(
            "BD mode needs a square gradient, got {m}x{n}"
        )));
    }
    let norms = applicable_norms(mode, &cfg.norms, n == m);
    let mesh = &field.mesh;
    let faces: Vec<FaceGeometry> = mesh
        .faces()
        .interior
        .into_iter()
        .map(|f| {
            let pts: Vec<Vec<f64>> = f.vertices.iter().map(|&v| mesh.vertices[v].clone()).collect();
            Ok(FaceGeometry {
                polytope: ConvexPolytope::hull(&pts)?,
                normal: f.normal,
                cells: f.cells,
            })
        })
        .collect::<Result<_>>()?;
    let simplices = mesh.simplices();
    let targets = targets(field, &faces, mode, &norms)?;
    let target = targets[&mode.schatten_norm()];

    let mut rows = Vec::with_capacity(cfg.ks.len());
    for &k in &cfg.ks {
        let lams = cell_laminates(field, mode, k)?;
        let regions = simplices
            .par_iter()
            .enumerate()
            .map(|(i, s)| region_variation(&lams[i], s, i))
            .collect::<Result<Vec<_>>>()?;
        let face_vals = faces
            .par_iter()
            .map(|f| face_values(f, &lams, mode, &norms))
            .collect::<Result<Vec<_>>>()?;

        let mut var_by_norm = BTreeMap::new();
        for (idx, &nk) in norms.iter().enumerate() {
            let cells: f64 = regions.iter().map(|r| r.get(nk).unwrap_or(0.0)).sum();
            let faces: f64 = face_vals.iter().map(|f| f.by_norm[idx]).sum();
            var_by_norm.insert(nk, cells + faces);
        }
        rows.push(ConvergenceRow {
            k,
            var_frobenius: var_by_norm[&NormKind::Frobenius],
            var_schatten: var_by_norm[&mode.schatten_norm()],
            var_interface: face_vals.iter().map(|f| f.interface).sum(),
            sup_err: regions.iter().map(|r| r.sup_error).fold(0.0, f64::max),
            l1_err: l1_error(field, &lams, cfg.mc_samples),
            target,
            var_by_norm,
            sampled_faces: face_vals.iter().filter(|f| f.sampled).count(),
        });
    }
    Ok(ConvergenceTable {
        mode,
        field: loaded.label.clone(),
        mesh: MeshSummary {
            cells: mesh.len(),
            interior_faces: faces.len(),
            delta: mesh.delta,
            regularity: mesh.regularity,
            volume: simplices.iter().map(|s| s.volume()).sum(),
        },
        targets,
        target,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RelaxationReport {
    pub mode: Mode,
    pub field: String,
    /// Frobenius variation of the laminate at the largest `k`.
    pub estimate: f64,
    pub k: u32,
    /// Schatten variation of the input.
    pub target: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

/// Upper estimate of the relaxed Frobenius functional: the Frobenius
/// variation of the constructed piecewise-rigid (BD) or piecewise-constant
/// (BV) field at the finest `k`, compared with the Schatten target within
/// `3 · max(target, sup_err·k) / k`.
pub fn relaxation_estimate(cfg: &ExperimentConfig) -> Result<RelaxationReport> {
    let table = run_experiment(cfg)?;
    let last = table.last();
    let kf = last.k as f64;
    let tolerance = 3.0 * table.target.max(last.sup_err * kf) / kf + 1e-9;
    Ok(RelaxationReport {
        mode: table.mode,
        field: table.field.clone(),
        estimate: last.var_frobenius,
        k: last.k,
        target: table.target,
        tolerance,
        within_tolerance: (last.var_frobenius - table.target).abs() <= tolerance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleRow {
    pub k: u32,
    pub bd_frobenius: f64,
    pub bd_ssym: f64,
    pub bv_frobenius: f64,
    pub bv_schatten1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    /// `ssym(Id₂)`.
    pub ssym_identity: f64,
    /// `|Id₂|`.
    pub frobenius_identity: f64,
    /// `ssym(Id₂) − |Id₂|`.
    pub gap: f64,
    pub rows: Vec<CounterexampleRow>,
    /// Frobenius variation at the largest `k`.
    pub limit_at_kmax: f64,
    /// `2 v(k) − v(k/2)` when the last two `k` differ by a factor of two.
    pub richardson: Option<f64>,
    pub tolerance: f64,
    /// Frobenius and Schatten variations agree within `1e-9` relative at
    /// every `k`, in both modes.
    pub norms_coincide: bool,
    pub converged: bool,
    /// `v(k_max) > |Id₂| + 0.5`.
    pub separated: bool,
    pub bv_matches_bd: bool,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.norms_coincide && self.converged && self.separated && self.bv_matches_bd
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Laminates of `u(x) = x` on `(0,1)²` in both modes: their Frobenius
/// variation tends to `ssym(Id₂) = 2`, not to `|Id₂| = √2`.
pub fn verify_counterexample(ks: &[u32], subdivisions: usize) -> Result<CounterexampleReport> {
    let k_max = ks.iter().copied().max().unwrap_or(0);
    if k_max < 8 {
        return Err(Error::InvalidConfig("counterexample needs k_max >= 8".into()));
    }
    let mut sorted = ks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let run = |mode| {
        let mut cfg = ExperimentConfig::new(mode, "identity2d");
        cfg.ks = sorted.clone();
        cfg.subdivisions = subdivisions;
        cfg.norms = vec![NormKind::Frobenius, mode.schatten_norm()];
        cfg.mc_samples = 1_000;
        run_experiment(&cfg)
    };
    let bd = run(Mode::Bd)?;
    let bv = run(Mode::Bv)?;
    let rows: Vec<CounterexampleRow> = bd
        .rows
        .iter()
        .zip(&bv.rows)
        .map(|(d, v)| CounterexampleRow {
            k: d.k,
            bd_frobenius: d.var_frobenius,
            bd_ssym: d.var_schatten,
            bv_frobenius: v.var_frobenius,
            bv_schatten1: v.var_schatten,
        })
        .collect();
    let id = SymMatrix::diag(&[1.0, 1.0]);
    let ssym_identity = ssym(&id);
    let frobenius_identity = frobenius(id.as_matrix());
    let last = rows.last().expect("nonempty");
    let richardson = (rows.len() >= 2 && rows[rows.len() - 2].k * 2 == last.k)
        .then(|| 2.0 * last.bd_frobenius - rows[rows.len() - 2].bd_frobenius);
    let tolerance = 0.05_f64.max(3.0 / k_max as f64);
    Ok(CounterexampleReport {
        ssym_identity,
        frobenius_identity,
        gap: ssym_identity - frobenius_identity,
        limit_at_kmax: last.bd_frobenius,
        richardson,
        tolerance,
        norms_coincide: rows.iter().all(|r| {
            rel_close(r.bd_frobenius, r.bd_ssym, 1e-9) && rel_close(r.bv_frobenius, r.bv_schatten1, 1e-9)
        }),
        converged: (last.bd_frobenius - ssym_identity).abs() <= tolerance,
        separated: last.bd_frobenius > frobenius_identity + 0.5,
        bv_matches_bd: rows.iter().all(|r| rel_close(r.bd_frobenius, r.bv_frobenius, 1e-9)),
        rows,
    })
}
