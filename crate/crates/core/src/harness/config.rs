use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::czdecomp::DEFAULT_C0;
use crate::fields::{ChannelGeometry, Grid};
use crate::nschannel::{PerturbationSpec, Shear, SolverConfig};
use crate::{Error, Result};

/// Schema version understood by this build.
pub const CONFIG_VERSION: u32 = 1;

/// Environment variable that replaces `output_dir` when set.
pub const OUTPUT_ENV: &str = "LAYERSEP_OUT";

/// A sweep over shear amplitudes, viscosities and resolutions.
///
/// Cases are the cartesian product `amplitudes x viscosities x resolutions`
/// in that nesting order (amplitude outermost). The shear descriptor fixes
/// the profile shape; each case rescales it so that `||ubar||_inf` equals the
/// case amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub geometry: ChannelGeometry,
    pub shear: Shear,
    /// Second shear component `Ubar_2(x_3) e_2` of a three-dimensional
    /// channel; must be absent in two dimensions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shear_secondary: Option<Shear>,
    pub amplitudes: Vec<f64>,
    pub viscosities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationSpec>,
    pub t_end: f64,
    /// Wall-normal cell counts, strictly increasing.
    pub resolutions: Vec<usize>,
    /// Fixed streamwise cell count; by default `ny W / H`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    /// Physical ramp width of the initial data. Overrides `ramp_cells`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_width: Option<f64>,
    #[serde(default = "default_ramp_cells")]
    pub ramp_cells: usize,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Sampling interval of all recorded curves; `t_end / 64` by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    pub output_dir: PathBuf,
    #[serde(default = "default_max_generation")]
    pub max_generation: u32,
    #[serde(default = "default_depth")]
    pub depth: u32,
    /// Replaces the perturbation seed when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Store the dissipation density needed by the decomposition stage.
    #[serde(default = "default_true")]
    pub record_density: bool,
}

fn default_ramp_cells() -> usize {
    4
}

fn default_c0() -> f64 {
    DEFAULT_C0
}

fn default_cfl() -> f64 {
    0.4
}

fn default_max_generation() -> u32 {
    3
}

fn default_depth() -> u32 {
    1
}

fn default_true() -> bool {
    true
}

/// One point of the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub index: usize,
    pub amplitude: f64,
    pub nu: f64,
    pub nx: usize,
    pub ny: usize,
}

impl ExperimentConfig {
    /// A single unperturbed constant-shear case with defaults elsewhere.
    pub fn single(geometry: ChannelGeometry, amplitude: f64, nu: f64, t_end: f64, ny: usize, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            version: CONFIG_VERSION,
            geometry,
            shear: Shear::constant(1.0),
            shear_secondary: None,
            amplitudes: vec![amplitude],
            viscosities: vec![nu],
            perturbation: None,
            t_end,
            resolutions: vec![ny],
            nx: None,
            ramp_width: None,
            ramp_cells: default_ramp_cells(),
            c0: DEFAULT_C0,
            cfl: default_cfl(),
            sample_dt: None,
            dt_max: None,
            output_dir: output_dir.into(),
            max_generation: default_max_generation(),
            depth: default_depth(),
            seed: None,
            record_density: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::InvalidConfig(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        self.geometry.validate()?;
        if self.amplitudes.is_empty() || self.viscosities.is_empty() || self.resolutions.is_empty() {
            return Err(Error::InvalidConfig("amplitudes, viscosities and resolutions must be non-empty".into()));
        }
        if let Some(a) = self.amplitudes.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidConfig(format!("amplitude must be finite and nonnegative, got {a}")));
        }
        if let Some(n) = self.viscosities.iter().find(|n| !(n.is_finite() && **n > 0.0)) {
            return Err(Error::InvalidConfig(format!("viscosity must be positive, got {n}")));
        }
        if self.resolutions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(format!(
                "resolutions must be strictly increasing, got {:?}",
                self.resolutions
            )));
        }
        if self.resolutions[0] < 4 {
            return Err(Error::InvalidConfig("resolutions must be at least 4 cells".into()));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::InvalidConfig(format!("c0 must be positive, got {}", self.c0)));
        }
        if self.shear.amplitude() == 0.0 && self.amplitudes.iter().any(|&a| a > 0.0) {
            return Err(Error::InvalidConfig("a zero shear profile cannot be scaled to a positive amplitude".into()));
        }
        if let Some(w) = self.ramp_width {
            if !(w > 0.0 && w < 0.5 * self.geometry.height) {
                return Err(Error::InvalidConfig(format!("ramp width must lie in (0, H/2), got {w}")));
            }
        }
        if let Some(p) = &self.perturbation {
            p.validate()?;
        }
        if self.shear_secondary.is_some() && self.geometry.dim != 3 {
            return Err(Error::InvalidConfig("a secondary shear component needs d = 3".into()));
        }
        self.solver_config(self.viscosities[0]).validate()
    }

    /// Rejects configurations the 2D solver cannot run.
    pub fn check_runnable(&self) -> Result<()> {
        if self.geometry.dim != 2 {
            return Err(Error::InvalidConfig(format!(
                "d = {} channels are accepted in configs but only d = 2 can be run",
                self.geometry.dim
            )));
        }
        Ok(())
    }

    pub fn cases(&self) -> Vec<CaseSpec> {
        let mut out = Vec::new();
        for &amplitude in &self.amplitudes {
            for &nu in &self.viscosities {
                for &ny in &self.resolutions {
                    out.push(CaseSpec {
                        index: out.len(),
                        amplitude,
                        nu,
                        nx: self.nx_for(ny),
                        ny,
                    });
                }
            }
        }
        out
    }

    pub fn case(&self, index: usize) -> Result<CaseSpec> {
        let cases = self.cases();
        cases
            .get(index)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("case {index} out of range (sweep has {})", cases.len())))
    }

    fn nx_for(&self, ny: usize) -> usize {
        self.nx
            .unwrap_or_else(|| ((ny as f64 * self.geometry.width / self.geometry.height).round() as usize).max(4))
    }

    pub fn grid(&self, case: &CaseSpec) -> Result<Grid> {
        Grid::new(ChannelGeometry::new(self.geometry.width, self.geometry.height)?, case.nx, case.ny)
    }

    /// Shear profile of one case, scaled to the case amplitude.
    pub fn case_shear(&self, case: &CaseSpec) -> Shear {
        let a = self.shear.amplitude();
        if a == 0.0 {
            self.shear
        } else {
            self.shear.scaled(case.amplitude / a)
        }
    }

    pub fn ramp_cells_for(&self, grid: &Grid) -> usize {
        match self.ramp_width {
            Some(w) => ((w / grid.dy()).round() as usize).max(2),
            None => self.ramp_cells,
        }
    }

    pub fn perturbation_spec(&self) -> Option<PerturbationSpec> {
        self.perturbation.map(|mut p| {
            if let Some(seed) = self.seed {
                p.seed = seed;
            }
            p
        })
    }

    pub fn effective_sample_dt(&self) -> f64 {
        self.sample_dt.unwrap_or(self.t_end / 64.0)
    }

    pub fn solver_config(&self, nu: f64) -> SolverConfig {
        SolverConfig {
            nu,
            cfl: self.cfl,
            t_end: self.t_end,
            output_stride: 1,
            sample_dt: Some(self.effective_sample_dt()),
            dt_max: self.dt_max,
        }
    }

    /// `output_dir`, or the directory named by [`OUTPUT_ENV`].
    pub fn output_root(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ENV) {
            Some(p) if !p.is_empty() => PathBuf::from(p),
            _ => self.output_dir.clone(),
        }
    }

    pub fn case_dir(&self, case: &CaseSpec) -> PathBuf {
        self.output_root().join(format!("case_{:03}", case.index))
    }
}
