//! Run configuration: one JSON document, overridden field by field from the
//! command line. Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use pf_core::cutoff::{CutoffDescriptor, CutoffKind, CutoffProfile};
use pf_core::fiber::SolverSpec;
use pf_core::fock::{GridSpec, MAX_PHOTONS};
use pf_core::quadrature::QuadratureSpec;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub radial_panels: usize,
    pub nodes_per_panel: usize,
    pub angular_order: usize,
    pub max_modes: usize,
    pub max_photons: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        GridConfig {
            radial_panels: g.radial_panels,
            nodes_per_panel: g.nodes_per_panel,
            angular_order: g.angular_order,
            max_modes: g.max_modes,
            max_photons: 2,
        }
    }
}

impl GridConfig {
    pub fn spec(&self) -> GridSpec {
        GridSpec {
            radial_panels: self.radial_panels,
            nodes_per_panel: self.nodes_per_panel,
            angular_order: self.angular_order,
            max_modes: self.max_modes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentityConfig {
    /// Spinor samples for the orthogonality suite.
    pub samples: usize,
    pub tol: f64,
    /// Infrared threshold for the products that need one.
    pub ir_alpha: f64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig {
            samples: 8,
            tol: 1e-10,
            ir_alpha: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    /// Standard output when absent.
    pub path: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            format: Format::Csv,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub cutoff: CutoffDescriptor,
    pub quadrature: QuadratureSpec,
    pub grid: GridConfig,
    pub solver: SolverSpec,
    /// Per-command default when absent.
    pub alpha_list: Option<Vec<f64>>,
    pub output: OutputConfig,
    /// When set, replaces both `quadrature.mc_seed` and `solver.seed`.
    pub seed: Option<u64>,
    pub identities: IdentityConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cutoff: CutoffDescriptor {
                kind: CutoffKind::Sharp,
                uv_extent: 1.0,
                params: vec![],
            },
            quadrature: QuadratureSpec::default(),
            grid: GridConfig::default(),
            solver: SolverSpec::default(),
            alpha_list: None,
            output: OutputConfig::default(),
            seed: None,
            identities: IdentityConfig::default(),
        }
    }
}

/// Command-line overrides. Precedence: flag > config file > built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Cutoff family.
    #[arg(long, global = true, value_name = "KIND", value_parser = ["sharp", "smoothed-plateau", "gaussian-bump"])]
    pub cutoff: Option<String>,
    #[arg(long, global = true, value_name = "X")]
    pub uv_extent: Option<f64>,
    /// Ramp width (smoothed-plateau) or sigma (gaussian-bump).
    #[arg(long, global = true, value_name = "X")]
    pub cutoff_param: Option<f64>,
    /// Identity tolerance for `verify`.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_name = "A[,A...]", value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Radial panels and angular order, e.g. `2:2`.
    #[arg(long, global = true, value_name = "R:A", value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    #[arg(long, global = true, value_name = "N")]
    pub max_photons: Option<usize>,
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub mc_samples: Option<u64>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (r, a) = s.split_once(':').ok_or("expected R:A")?;
    let r = r
        .trim()
        .parse()
        .map_err(|e| format!("radial panels: {e}"))?;
    let a = a
        .trim()
        .parse()
        .map_err(|e| format!("angular order: {e}"))?;
    Ok((r, a))
}

fn parse_kind(s: &str) -> CutoffKind {
    match s {
        "smoothed-plateau" => CutoffKind::SmoothedPlateau,
        "gaussian-bump" => CutoffKind::GaussianBump,
        _ => CutoffKind::Sharp,
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        if let Some(k) = &o.cutoff {
            let kind = parse_kind(k);
            if kind != self.cutoff.kind {
                self.cutoff.kind = kind;
                self.cutoff.params.clear();
            }
        }
        if let Some(x) = o.uv_extent {
            self.cutoff.uv_extent = x;
        }
        if let Some(p) = o.cutoff_param {
            self.cutoff.params = vec![p];
        }
        if let Some(t) = o.tol {
            self.identities.tol = t;
        }
        if let Some(a) = &o.alpha {
            self.alpha_list = Some(a.clone());
        }
        if let Some((r, a)) = o.grid {
            self.grid.radial_panels = r;
            self.grid.angular_order = a;
        }
        if let Some(n) = o.max_photons {
            self.grid.max_photons = n;
        }
        if let Some(s) = o.seed {
            self.seed = Some(s);
        }
        if let Some(n) = o.samples {
            self.identities.samples = n;
        }
        if let Some(n) = o.mc_samples {
            self.quadrature.mc_samples = n;
        }
        if let Some(p) = &o.out {
            self.output.path = Some(p.clone());
        }
        if let Some(f) = o.format {
            self.output.format = f;
        }
        if let Some(s) = self.seed {
            self.quadrature.mc_seed = s;
            self.solver.seed = s;
        }
        self
    }

    /// Checks everything a command could reject, so that later failures are
    /// numerical.
    pub fn validate(&self) -> Result<CutoffProfile, CliError> {
        let cfg = |m: String| CliError::Config(m);
        let cutoff =
            CutoffProfile::try_from(self.cutoff.clone()).map_err(|e| cfg(e.to_string()))?;
        if cutoff.is_zero() {
            return Err(cfg("cutoff has empty support (uv_extent = 0)".into()));
        }
        self.quadrature.validate().map_err(|e| cfg(e.to_string()))?;
        self.solver.validate().map_err(|e| cfg(e.to_string()))?;
        let g = &self.grid;
        if g.radial_panels == 0 || g.nodes_per_panel == 0 || g.angular_order == 0 {
            return Err(cfg("grid sizes must be positive".into()));
        }
        if !(1..=MAX_PHOTONS).contains(&g.max_photons) {
            return Err(cfg(format!("max_photons must lie in 1..={MAX_PHOTONS}")));
        }
        if let Some(list) = &self.alpha_list {
            if list.is_empty() {
                return Err(cfg("alpha_list is empty".into()));
            }
            if let Some(a) = list.iter().find(|a| !(**a > 0.0 && **a <= 0.1)) {
                return Err(cfg(format!("alpha {a} outside (0, 0.1]")));
            }
        }
        let id = &self.identities;
        if id.samples == 0 {
            return Err(cfg("identities.samples must be positive".into()));
        }
        if !(id.tol > 0.0 && id.tol.is_finite()) {
            return Err(cfg("identities.tol must be finite and positive".into()));
        }
        if !(id.ir_alpha > 0.0 && id.ir_alpha <= 0.1) {
            return Err(cfg("identities.ir_alpha outside (0, 0.1]".into()));
        }
        Ok(cutoff)
    }

    pub fn alphas_or(&self, default: &[f64]) -> Vec<f64> {
        self.alpha_list.clone().unwrap_or_else(|| default.to_vec())
    }

    /// SHA-256 of the canonical JSON form. The output path is left out, so the
    /// same run written to two places carries the same hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.path = None;
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
