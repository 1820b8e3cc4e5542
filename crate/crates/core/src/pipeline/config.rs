use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    freudenthal_mesh, interpolate, AffineMap, BoxDomain, PiecewiseAffineField, Triangulation,
};
use crate::laminate::Mode;
use crate::norms::NormKind;

use super::builtin::Builtin;

/// Where the input field comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSpec {
    Builtin(String),
    File(PathBuf),
}

impl FieldSpec {
    /// A path if the string names an existing file or ends in `.json`,
    /// otherwise a builtin name.
    pub fn parse(s: &str) -> FieldSpec {
        let p = Path::new(s);
        if p.is_file() || s.ends_with(".json") {
            FieldSpec::File(p.to_path_buf())
        } else {
            FieldSpec::Builtin(s.to_string())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub field: FieldSpec,
    /// Overrides the builtin's default box; ignored for explicit meshes.
    pub domain: Option<BoxDomain>,
    pub subdivisions: usize,
    pub ks: Vec<u32>,
    pub norms: Vec<NormKind>,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
    pub mc_samples: usize,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, field: &str) -> Self {
        ExperimentConfig {
            mode,
            field: FieldSpec::parse(field),
            domain: None,
            subdivisions: 4,
            ks: vec![8, 16, 32, 64],
            norms: NormKind::ALL.to_vec(),
            out_dir: None,
            seed: 0,
            mc_samples: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.subdivisions == 0 {
            return Err(Error::ZeroSubdivisions);
        }
        if self.ks.is_empty() {
            return Err(Error::InvalidConfig("at least one k value is required".into()));
        }
        if self.ks[0] == 0 {
            return Err(Error::InvalidConfig("k values must be positive".into()));
        }
        if self.ks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("k values must be strictly increasing".into()));
        }
        if self.mc_samples == 0 {
            return Err(Error::InvalidConfig("mc-samples must be positive".into()));
        }
        Ok(())
    }
}

/// Explicit mesh section of a field file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshJson {
    pub vertices: Vec<Vec<f64>>,
    pub cells: Vec<Vec<usize>>,
}

/// Field file contents: a builtin reference or an explicit piecewise-affine
/// field.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldFile {
    Builtin {
        builtin: String,
        #[serde(default)]
        seed: Option<u64>,
    },
    Explicit {
        n: usize,
        m: usize,
        mesh: MeshJson,
        cells: Vec<AffineMap>,
    },
}

/// The resolved input: a piecewise-affine field plus, for builtins, the
/// smooth source it interpolates.
#[derive(Clone, Debug)]
pub struct LoadedField {
    pub label: String,
    pub field: PiecewiseAffineField,
    pub builtin: Option<Builtin>,
}

fn load_builtin(name: &str, seed: u64, cfg: &ExperimentConfig) -> Result<LoadedField> {
    let b = Builtin::from_name(name, seed)?;
    let domain = cfg.domain.clone().unwrap_or_else(|| b.domain.clone());
    if domain.dim() != b.n() {
        return Err(Error::dims(format!("{}-dimensional box", b.n()), format!("{}", domain.dim())));
    }
    let mesh = freudenthal_mesh(&domain, cfg.subdivisions)?;
    let field = interpolate(|x| b.eval(x), &mesh)?;
    Ok(LoadedField {
        label: b.to_string(),
        field,
        builtin: Some(b),
    })
}

/// Builds the piecewise-affine input described by the config.
pub fn load_field(cfg: &ExperimentConfig) -> Result<LoadedField> {
    match &cfg.field {
        FieldSpec::Builtin(name) => load_builtin(name, cfg.seed, cfg),
        FieldSpec::File(path) => {
            let text = std::fs::read_to_string(path)?;
            match serde_json::from_str::<FieldFile>(&text)? {
                FieldFile::Builtin { builtin, seed } => {
                    load_builtin(&builtin, seed.unwrap_or(cfg.seed), cfg)
                }
                FieldFile::Explicit { n, m, mesh, cells } => {
                    let mesh = Triangulation::from_parts(mesh.vertices, mesh.cells)?;
                    if mesh.dim() != n {
                        return Err(Error::dims(format!("n = {n}"), format!("mesh dimension {}", mesh.dim())));
                    }
                    if cells.iter().any(|c| c.a.rows() != m) {
                        return Err(Error::dims(format!("m = {m}"), "cell matrix rows".to_string()));
                    }
                    let probe = PiecewiseAffineField::new(mesh.clone(), cells.clone(), false)?;
                    let (defect, scale) = probe.continuity_defect();
                    let continuous = defect <= 1e-10 * (1.0 + scale);
                    Ok(LoadedField {
                        label: path.display().to_string(),
                        field: PiecewiseAffineField::new(mesh, cells, continuous)?,
                        builtin: None,
                    })
                }
            }
        }
    }
}
