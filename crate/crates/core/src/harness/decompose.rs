use serde::{Deserialize, Serialize};

use crate::czdecomp::{
    boundary_regularity_statistic, initial_partition, refine, tilde_omega, BoundaryStatistic, Decomposition,
    DensityIntegrator, TildeOmega, Window,
};
use crate::fields::SpaceTimeField;
use crate::nschannel::{rescale_density, rescale_trace, BoundaryVorticityTrace};
use crate::par::Exec;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposeSettings {
    pub c0: f64,
    pub max_generation: u32,
    pub depth: u32,
    /// How many times `c0` may be multiplied by 4 when the data cannot
    /// resolve the refinement.
    pub max_escalations: u32,
}

impl DecomposeSettings {
    pub fn new(c0: f64, max_generation: u32, depth: u32) -> Self {
        DecomposeSettings {
            c0,
            max_generation,
            depth,
            max_escalations: 12,
        }
    }
}

/// Decomposition of one run in unit-viscosity variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunDecomposition {
    pub decomposition: Decomposition,
    pub tilde: TildeOmega,
    pub statistic: BoundaryStatistic,
    /// `c0` actually used.
    pub c0: f64,
    pub escalations: u32,
}

impl RunDecomposition {
    /// `||omega~ 1_above||^{3/2}_{L^{3/2,inf}} / ||grad u||^2_{L^2}`.
    pub fn ratio(&self) -> Option<f64> {
        self.statistic.ratio()
    }
}

/// Physical run data rescaled to unit viscosity.
pub struct RescaledRun {
    pub density: SpaceTimeField,
    pub trace: BoundaryVorticityTrace,
    /// `T / nu`
    pub length: f64,
}

impl RescaledRun {
    pub fn new(density: &SpaceTimeField, trace: &BoundaryVorticityTrace, nu: f64, t_end: f64) -> Result<Self> {
        Ok(RescaledRun {
            density: rescale_density(density, nu)?,
            trace: rescale_trace(trace, nu)?,
            length: t_end / nu,
        })
    }

    /// `||grad u||^2_{L^2((0, T/nu) x Omega/nu)}`
    pub fn dissipation(&self) -> Result<f64> {
        let g = self.density.grid();
        DensityIntegrator::new(&self.density).integral(&Window {
            t0: 0.0,
            t1: self.length,
            x0: 0.0,
            x1: g.width(),
            y0: 0.0,
            y1: g.height(),
        })
    }
}

fn escalates(e: &Error) -> bool {
    matches!(e, Error::Unresolved { .. } | Error::Resolution(_))
}

/// Decompose with exactly the given `c0`.
pub fn decompose_with(run: &RescaledRun, c0: f64, settings: &DecomposeSettings, exec: Exec) -> Result<RunDecomposition> {
    let g = run.density.grid();
    let initial = initial_partition(run.length, g.width(), g.height(), settings.depth)?;
    let density = DensityIntegrator::new(&run.density);
    let decomposition = refine(&initial, &density, c0, settings.max_generation, exec)?;
    let tilde = tilde_omega(&decomposition, &run.trace)?;
    let statistic = boundary_regularity_statistic(&tilde, g.width(), g.height(), run.dissipation()?)?;
    Ok(RunDecomposition {
        decomposition,
        tilde,
        statistic,
        c0,
        escalations: 0,
    })
}

/// Decompose starting from `settings.c0`, multiplying `c0` by 4 whenever a
/// cube stays unsuitable at `max_generation` or the samples cannot resolve
/// a required cube.
pub fn decompose_run(run: &RescaledRun, settings: &DecomposeSettings, exec: Exec) -> Result<RunDecomposition> {
    let mut c0 = settings.c0;
    let mut last = None;
    for k in 0..=settings.max_escalations {
        match decompose_with(run, c0, settings, exec) {
            Ok(mut d) => {
                d.escalations = k;
                return Ok(d);
            }
            Err(e) if escalates(&e) => {
                last = Some(e);
                c0 *= 4.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Decompose several runs with one common `c0`: the largest of the
/// per-run escalated values.
pub fn decompose_common(runs: &[RescaledRun], settings: &DecomposeSettings, exec: Exec) -> Result<Vec<RunDecomposition>> {
    let first: Vec<RunDecomposition> = exec
        .map(runs, |r| decompose_run(r, settings, Exec::Sequential))
        .into_iter()
        .collect::<Result<_>>()?;
    let common = first.iter().map(|d| d.c0).fold(settings.c0, f64::max);
    exec.map(&first.into_iter().zip(runs).collect::<Vec<_>>(), |(d, r)| {
        if d.c0 == common {
            Ok(d.clone())
        } else {
            let mut out = decompose_with(r, common, settings, Exec::Sequential)?;
            out.escalations = (common / settings.c0).log(4.0).round() as u32;
            Ok(out)
        }
    })
    .into_iter()
    .collect()
}
