//! Parabolic dyadic decomposition of the wall, refinement by the
//! suitability condition, the averaged boundary vorticity, the parabolic
//! maximal function and weak Lorentz norms.

mod density;
mod lorentz;
mod maximal;
mod partition;
mod refine;
mod statistic;
mod tilde;

use serde::{Deserialize, Serialize};

pub use density::{DensityIntegrator, MIN_SAMPLES};
pub use lorentz::{weak_lorentz, LorentzReport};
pub use maximal::{maximal_field, parabolic_maximal, weak_type_check, CellDensity, RadiiPolicy, WeakTypeCheck};
pub use partition::{initial_partition, BaseScales, InitialPartition, ParabolicCube, Window};
pub use refine::{refine, suitability, DecomposedCube, Decomposition, Suitability, DEFAULT_C0};
pub use statistic::{
    boundary_regularity_statistic, cube_threshold, level_set_check, local_average_vorticity_check,
    BoundaryStatistic, LevelSetCheck, LocalCheck,
};
pub use tilde::{tilde_omega, TildeEntry, TildeOmega, MIN_TRACE_SAMPLES};

use crate::fields::Wall;
use crate::{Error, Result};

/// One exported cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeRecord {
    pub k: u32,
    pub wall: Wall,
    pub s: f64,
    pub t: f64,
    pub x_center: f64,
    pub w: f64,
    pub h: f64,
    pub r: f64,
    pub avg_dissipation: f64,
    pub omega_tilde: Option<f64>,
}

/// Cube table of a decomposition, with the averaged vorticity when given
/// (it must come from the same decomposition).
pub fn cube_records(decomp: &Decomposition, tilde: Option<&TildeOmega>) -> Result<Vec<CubeRecord>> {
    if let Some(om) = tilde {
        if om.entries.len() != decomp.len() || om.entries.iter().zip(&decomp.cubes).any(|(e, c)| e.cube != c.cube) {
            return Err(Error::Shape("averaged vorticity comes from another decomposition".into()));
        }
    }
    Ok(decomp
        .cubes
        .iter()
        .enumerate()
        .map(|(i, c)| CubeRecord {
            k: c.cube.generation,
            wall: c.cube.wall,
            s: c.cube.s,
            t: c.cube.t,
            x_center: c.cube.center,
            w: c.cube.w,
            h: c.cube.h,
            r: c.cube.r,
            avg_dissipation: c.average,
            omega_tilde: tilde.map(|om| om.entries[i].value),
        })
        .collect())
}
