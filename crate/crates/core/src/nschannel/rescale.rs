//! The parabolic rescaling `u(t, x) = u^nu(nu t, nu x)` to unit viscosity.
//!
//! Velocities are unchanged, lengths and times are divided by `nu`,
//! gradients and vorticities are multiplied by `nu` and the dissipation
//! density `|grad u|^2` by `nu^2`.

use crate::fields::{SpaceTimeField, VelocityField};
use crate::{Error, Result};

use super::BoundaryVorticityTrace;

fn check(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::Domain(format!("rescaling needs nu > 0, got {nu}")));
    }
    Ok(())
}

pub fn rescale_trace(trace: &BoundaryVorticityTrace, nu: f64) -> Result<BoundaryVorticityTrace> {
    check(nu)?;
    let map = |s: &super::TimeSeries| s.map_times(|t| t / nu).map_values(|v| v * nu);
    Ok(BoundaryVorticityTrace {
        grid: trace.grid.scaled(1.0 / nu),
        walls: [map(&trace.walls[0]), map(&trace.walls[1])],
    })
}

pub fn rescale_density(density: &SpaceTimeField, nu: f64) -> Result<SpaceTimeField> {
    check(nu)?;
    Ok(density.rescaled(1.0 / nu, 1.0 / nu, nu * nu))
}

pub fn rescale_snapshot(u: &VelocityField, nu: f64) -> Result<VelocityField> {
    check(nu)?;
    u.clone().with_grid(u.grid().scaled(1.0 / nu))
}
