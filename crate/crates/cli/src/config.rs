//! On-disk problem descriptions.
//!
//! One TOML file describes a run: the system under study, the comparison
//! function, solver settings, verification settings, optional coupled
//! starting bounds, and (for the periodic subcommand) the boundary value
//! problem. Unknown keys are rejected so typos surface as errors instead of
//! silently falling back to defaults.

use std::path::Path;

use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub system: Option<SystemSection>,
    pub phi: Option<PhiSection>,
    pub solve: Option<SolveSection>,
    pub verify: Option<VerifySection>,
    pub bounds: Option<BoundsSection>,
    pub pbvs: Option<PbvsSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SystemSection {
    /// Builder name: `"affine"` or `"tanh-arctan"`.
    pub kind: String,
    /// Component dimensions; the flat dimension is their sum.
    pub dims: Option<Vec<usize>>,
    /// Flat coefficient matrix for the affine builder, row major.
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Flat constant term for the affine builder.
    pub offset: Option<Vec<f64>>,
    /// Declared signature such as `"+-/-+"`. The affine builder derives it
    /// from the matrix signs when absent.
    pub signature: Option<String>,
    /// Sampling box shared by every coordinate.
    pub region: Option<RegionSection>,
    /// Component metric: `"sup"` (default) or `"euclidean"`.
    pub metric: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PhiSection {
    /// `"linear"`, `"log"`, or `"rational"`.
    pub kind: String,
    /// Slope of the linear kind; ignored by the others.
    pub alpha: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SolveSection {
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub track_bracket: Option<bool>,
    /// Optional common starting point, one array per component. Coupled
    /// starts come from `[bounds]` instead.
    pub start: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    /// Lower starting point, one array per component.
    pub lower: Vec<Vec<f64>>,
    /// Upper starting point, one array per component.
    pub upper: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PbvsSection {
    /// Right-hand side name: `"relaxation"` or `"phase-coupling"`.
    pub rhs: String,
    /// Linear damping rate; required.
    pub lambda: Option<f64>,
    pub period: Option<f64>,
    pub grid_size: Option<usize>,
    /// Box `[lo, hi]` the sampled checks draw values from.
    pub value_range: Option<[f64; 2]>,
    /// Rest value for the relaxation right-hand side.
    pub target: Option<f64>,
    /// Coupling strength for the phase-coupling right-hand side.
    pub epsilon: Option<f64>,
    /// Forcing amplitude for the phase-coupling right-hand side.
    pub forcing: Option<f64>,
    /// Constant lower starting bound; requires `upper`.
    pub lower: Option<f64>,
    /// Constant upper starting bound; requires `lower`.
    pub upper: Option<f64>,
}

pub fn load(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

impl FileConfig {
    pub fn system(&self) -> Result<&SystemSection, Failure> {
        self.system
            .as_ref()
            .ok_or_else(|| Failure::config("the config file has no [system] section"))
    }

    pub fn pbvs(&self) -> Result<&PbvsSection, Failure> {
        self.pbvs
            .as_ref()
            .ok_or_else(|| Failure::config("the config file has no [pbvs] section"))
    }
}
