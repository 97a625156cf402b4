use serde::{Deserialize, Serialize};

use crate::fields::{ChannelGeometry, Grid, VelocityField, Wall};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub nu: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    /// Steps between samples when `sample_dt` is not set.
    #[serde(default = "default_stride")]
    pub output_stride: usize,
    /// Uniform sampling interval; steps are shortened to land on every
    /// multiple of it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
    /// Upper bound on the step size, on top of the advective limit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
}

fn default_cfl() -> f64 {
    0.4
}

fn default_stride() -> usize {
    1
}

impl SolverConfig {
    pub fn new(nu: f64, t_end: f64) -> Self {
        SolverConfig {
            nu,
            cfl: default_cfl(),
            t_end,
            output_stride: 1,
            sample_dt: None,
            dt_max: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidConfig(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidConfig(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.output_stride == 0 {
            return Err(Error::InvalidConfig("output_stride must be at least 1".into()));
        }
        if let Some(s) = self.sample_dt {
            if !(s > 0.0) {
                return Err(Error::InvalidConfig(format!("sample_dt must be positive, got {s}")));
            }
        }
        if let Some(d) = self.dt_max {
            if !(d > 0.0) {
                return Err(Error::InvalidConfig(format!("dt_max must be positive, got {d}")));
            }
        }
        Ok(())
    }

    /// `Re = A H / nu`.
    pub fn reynolds(&self, amplitude: f64, height: f64) -> f64 {
        amplitude * height / self.nu
    }
}

/// Background shear `Ubar(y) e1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shear {
    Constant { amplitude: f64 },
    /// Linear profile between the wall values.
    Linear { bottom: f64, top: f64 },
}

impl Shear {
    pub fn constant(amplitude: f64) -> Self {
        Shear::Constant { amplitude }
    }

    pub fn value(&self, y: f64, height: f64) -> f64 {
        match *self {
            Shear::Constant { amplitude } => amplitude,
            Shear::Linear { bottom, top } => bottom + (top - bottom) * y / height,
        }
    }

    pub fn derivative(&self, height: f64) -> f64 {
        match *self {
            Shear::Constant { .. } => 0.0,
            Shear::Linear { bottom, top } => (top - bottom) / height,
        }
    }

    pub fn wall_value(&self, wall: Wall, height: f64) -> f64 {
        match wall {
            Wall::Bottom => self.value(0.0, height),
            Wall::Top => self.value(height, height),
        }
    }

    /// `A = ||ubar||_inf`.
    pub fn amplitude(&self) -> f64 {
        match *self {
            Shear::Constant { amplitude } => amplitude.abs(),
            Shear::Linear { bottom, top } => bottom.abs().max(top.abs()),
        }
    }

    /// `G = ||grad ubar||_inf`.
    pub fn max_gradient(&self, height: f64) -> f64 {
        self.derivative(height).abs()
    }

    /// `E = ||ubar||^2_{L^2(Omega)}`.
    pub fn energy(&self, geometry: &ChannelGeometry) -> f64 {
        let w = geometry.width.powi(geometry.dim as i32 - 1);
        match *self {
            Shear::Constant { amplitude } => w * geometry.height * amplitude * amplitude,
            Shear::Linear { bottom, top } => {
                w * geometry.height * (bottom * bottom + bottom * top + top * top) / 3.0
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match *self {
            Shear::Constant { amplitude } => Shear::Constant { amplitude: c * amplitude },
            Shear::Linear { bottom, top } => Shear::Linear {
                bottom: c * bottom,
                top: c * top,
            },
        }
    }

    /// The shear sampled on the grid, with its (slip) wall values stored as
    /// the tangential wall data.
    pub fn as_field(&self, grid: Grid) -> VelocityField {
        let h = grid.height();
        VelocityField::from_fn(grid, |_, y| self.value(y, h), |_, _| 0.0)
    }
}

/// Solenoidal band-limited noise added to the initial shear.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    /// RMS velocity of the noise relative to the shear amplitude.
    pub amplitude: f64,
    /// Inclusive wavenumber band, in both directions.
    #[serde(default = "default_band")]
    pub band: (usize, usize),
    #[serde(default)]
    pub seed: u64,
    /// Fraction of the height next to each wall kept free of noise.
    #[serde(default = "default_margin")]
    pub wall_margin: f64,
}

fn default_band() -> (usize, usize) {
    (2, 8)
}

fn default_margin() -> f64 {
    0.1
}

impl PerturbationSpec {
    pub fn new(amplitude: f64, seed: u64) -> Self {
        PerturbationSpec {
            amplitude,
            band: default_band(),
            seed,
            wall_margin: default_margin(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "perturbation amplitude must be nonnegative, got {}",
                self.amplitude
            )));
        }
        if self.band.0 == 0 || self.band.0 > self.band.1 {
            return Err(Error::InvalidConfig(format!(
                "perturbation band {:?} must satisfy 1 <= lo <= hi",
                self.band
            )));
        }
        if !(self.wall_margin >= 0.0 && self.wall_margin < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "wall margin must lie in [0, 1/2), got {}",
                self.wall_margin
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_statistics() {
        let g = ChannelGeometry::new(2.0, 1.0).unwrap();
        let c = Shear::constant(-1.5);
        assert_eq!(c.amplitude(), 1.5);
        assert_eq!(c.max_gradient(1.0), 0.0);
        assert_eq!(c.energy(&g), 4.5);
        let l = Shear::Linear { bottom: 0.0, top: 2.0 };
        assert_eq!(l.amplitude(), 2.0);
        assert_eq!(l.max_gradient(1.0), 2.0);
        assert!((l.energy(&g) - 2.0 * 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(l.wall_value(Wall::Top, 1.0), 2.0);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.01, 1.0).validate().is_ok());
        assert!(SolverConfig::new(0.0, 1.0).validate().is_err());
        let mut c = SolverConfig::new(0.01, 1.0);
        c.cfl = 1.0;
        assert!(c.validate().is_err());
        let json = r#"{"nu": 0.1, "t_end": 2.0}"#;
        let parsed: SolverConfig = serde_json::from_str(json).unwrap();
        assert_eq!(parsed.cfl, 0.4);
        let shear: Shear = serde_json::from_str(r#"{"kind":"linear","bottom":0.0,"top":1.0}"#).unwrap();
        assert_eq!(shear, Shear::Linear { bottom: 0.0, top: 1.0 });
    }
}
