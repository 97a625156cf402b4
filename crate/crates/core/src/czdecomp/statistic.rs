use serde::{Deserialize, Serialize};

use crate::fields::{SpaceTimeField, Wall};
use crate::nschannel::BoundaryVorticityTrace;
use crate::{Error, Result};

use super::density::DensityIntegrator;
use super::lorentz::{weak_lorentz, LorentzReport};
use super::partition::Window;
use super::tilde::{box_weights, TildeOmega};

/// `max{1/s, W^-2, H^-2}`: the level above which the averaged vorticity is
/// counted on a cube starting at time `s` (infinite for `s = 0`).
pub fn cube_threshold(s: f64, width: f64, height: f64) -> f64 {
    let t = if s > 0.0 { 1.0 / s } else { f64::INFINITY };
    t.max(width.powi(-2)).max(height.powi(-2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryStatistic {
    /// `||omega~ 1_{omega~ > max(1/t, W^-2, H^-2)}||^{3/2}_{L^{3/2,inf}}`
    pub lhs: f64,
    /// `||grad u||^2_{L^2((0,T) x Omega)}`
    pub rhs_raw: f64,
    /// Measure of the wall region where the indicator is on.
    pub above_measure: f64,
    pub lorentz: LorentzReport,
}

impl BoundaryStatistic {
    /// `lhs / rhs_raw`, the empirical constant; `None` when the right side
    /// vanishes.
    pub fn ratio(&self) -> Option<f64> {
        (self.rhs_raw > 0.0).then(|| self.lhs / self.rhs_raw)
    }
}

/// Apply the threshold cube by cube (evaluated at each cube's start time)
/// and take the weak `L^{3/2}` quasi-norm to the power `3/2`.
pub fn boundary_regularity_statistic(
    tilde: &TildeOmega,
    width: f64,
    height: f64,
    dissipation_total: f64,
) -> Result<BoundaryStatistic> {
    let mut values = Vec::new();
    let mut measures = Vec::new();
    for e in &tilde.entries {
        if e.value > cube_threshold(e.cube.s, width, height) {
            values.push(e.value);
            measures.push(e.cube.face_measure());
        }
    }
    let lorentz = weak_lorentz(&values, &measures, 1.5)?;
    Ok(BoundaryStatistic {
        lhs: lorentz.value.powf(1.5),
        rhs_raw: dissipation_total,
        above_measure: measures.iter().sum(),
        lorentz,
    })
}

/// Both sides of the level-set counting step for one `r*`:
/// `|{omega~ > max(c1 r*^-2, 1/t, W^-2, H^-2)}|` against
/// `sum_{k >= 1} 2^k / r* sum_{r_i = 2^-k r*} |Q^i|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetCheck {
    pub r_star: f64,
    pub level_set_measure: f64,
    pub cube_bound: f64,
}

impl LevelSetCheck {
    pub fn holds(&self) -> bool {
        self.level_set_measure <= self.cube_bound * (1.0 + 1e-12) + 1e-300
    }
}

/// The level set is measured exactly: on a cube with value `v` the
/// condition `v > 1/t` holds for `t > 1/v`.
pub fn level_set_check(tilde: &TildeOmega, width: f64, height: f64, r_star: f64, c1: f64) -> LevelSetCheck {
    let floor = (c1 / (r_star * r_star)).max(width.powi(-2)).max(height.powi(-2));
    let mut measure = 0.0;
    let mut bound = 0.0;
    for e in &tilde.entries {
        let c = &e.cube;
        if e.value > floor {
            let start = c.s.max(1.0 / e.value);
            measure += (c.t - start).max(0.0) * c.w;
        }
        if c.r < r_star * (1.0 - 1e-12) {
            bound += c.volume() / c.r;
        }
    }
    LevelSetCheck {
        r_star,
        level_set_measure: measure,
        cube_bound: bound,
    }
}

/// Ingredients of the local boundary estimate at unit scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalCheck {
    /// `int_{|x' - x0| < 1} |int_{t0-1}^{t0} omega dt| dx'`
    pub lhs: f64,
    /// `int_{t0-4}^{t0} ||grad u||^2_{L^2(B+_2)} dt`
    pub c0_local: f64,
}

/// Evaluate on data already rescaled to unit viscosity; the cylinder
/// `(t0 - 4, t0) x (x0 - 2, x0 + 2) x (0, 2)` (mirrored at the top wall)
/// must lie inside the sampled run.
pub fn local_average_vorticity_check(
    trace: &BoundaryVorticityTrace,
    density: &SpaceTimeField,
    wall: Wall,
    t0: f64,
    x0: f64,
) -> Result<LocalCheck> {
    let g = density.grid();
    let tg = &trace.grid;
    if (g.width() - tg.width()).abs() > 1e-9 * g.width() || (g.height() - tg.height()).abs() > 1e-9 * g.height() {
        return Err(Error::Shape("trace and density live on different channels".into()));
    }
    let times = density.times();
    let (first, last) = match (times.first(), times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::InsufficientData("empty density".into())),
    };
    if t0 - 4.0 < first - 1e-12 || t0 > last + 1e-12 || g.height() < 2.0 {
        return Err(Error::Range(format!(
            "unit cylinder ending at t = {t0} does not fit a run on [{first}, {last}] of height {}",
            g.height()
        )));
    }
    let integrals = trace.wall(wall).integrate(t0 - 1.0, t0)?;
    let lhs = box_weights(tg.nx, tg.dx(), x0 - 1.0, x0 + 1.0)
        .iter()
        .map(|&(i, w)| w * integrals[i].abs())
        .sum();
    let (y0, y1) = match wall {
        Wall::Bottom => (0.0, 2.0),
        Wall::Top => (g.height() - 2.0, g.height()),
    };
    let win = Window {
        t0: t0 - 4.0,
        t1: t0,
        x0: x0 - 2.0,
        x1: x0 + 2.0,
        y0,
        y1,
    };
    let c0_local = DensityIntegrator::new(density).integral(&win)?;
    Ok(LocalCheck { lhs, c0_local })
}
