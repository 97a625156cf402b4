use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::run::{trapezoid_from, SeparationRecord, ShearStats};

/// Every term of the energy estimate of `u - ubar` up to the final time `T`.
///
/// For `T > T_nu`:
/// `1/2 ||u - ubar||^2(T) + nu/2 ||grad u||^2_{L^2(0,T)} <= 2 ||u0 - ubar||^2
///  + G int_{T_nu}^T ||u - ubar||^2 + nu G^2 T |Omega| + A^2 |Omega| / Re
///  + A (|int_{T_nu}^T int_bottom nu omega| + |int_{T_nu}^T int_top nu omega|)`.
///
/// When `T <= T_nu` only the short-time (Prandtl) estimate applies and the
/// `G`-integral and wall terms are reported as zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinedBound {
    pub t_end: f64,
    pub t_nu: f64,
    pub degenerate: bool,
    pub lhs: f64,
    pub initial: f64,
    pub gronwall: f64,
    pub viscous: f64,
    pub prandtl: f64,
    /// `A |int int nu omega|`, bottom then top.
    pub wall: [f64; 2],
    pub rhs: f64,
}

impl CombinedBound {
    pub fn residual(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.residual() >= -1e-12 * self.rhs.abs().max(1e-300)
    }
}

/// Assemble the combined estimate from a stored run. `T_nu` comes from the
/// record.
pub fn assemble_combined_bound(record: &SeparationRecord) -> Result<CombinedBound> {
    let last = record.last();
    let st = &record.stats;
    let t = last.t;
    if (t - record.t_end).abs() > 1e-9 * record.t_end {
        return Err(Error::InsufficientData(format!(
            "record ends at t = {t}, before T = {}",
            record.t_end
        )));
    }
    let snapped = record.main.t_nu;
    let degenerate = snapped.degenerate || t <= snapped.t_nu;
    let lhs = 0.5 * last.separation + 0.5 * last.dissipation;
    let initial = 2.0 * record.initial_deviation;
    let viscous = st.nu * st.max_gradient.powi(2) * t * st.volume;
    let prandtl = if st.amplitude > 0.0 {
        st.amplitude.powi(2) * st.volume * st.inverse_reynolds()
    } else {
        0.0
    };
    let (gronwall, wall) = if degenerate {
        (0.0, [0.0; 2])
    } else {
        (
            st.max_gradient * record.main.separation_integral,
            record.main.wall_vorticity.map(|w| st.amplitude * w.abs()),
        )
    };
    let rhs = initial + gronwall + viscous + prandtl + wall[0] + wall[1];
    Ok(CombinedBound {
        t_end: t,
        t_nu: snapped.t_nu,
        degenerate,
        lhs,
        initial,
        gronwall,
        viscous,
        prandtl,
        wall,
        rhs,
    })
}

/// Constant-shear estimate
/// `||u(T) - ubar||^2 + nu/2 ||grad u||^2 <= 4 ||u0 - ubar||^2 + C A^3 T + C A^2 Re^-1 log(2 + Re)`,
/// with the `C`-free factors stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantShearTerms {
    pub lhs: f64,
    pub initial: f64,
    /// `A^3 T`
    pub cubic: f64,
    /// `A^2 Re^-1 log(2 + Re)`
    pub log_term: f64,
}

impl ConstantShearTerms {
    pub fn rhs(&self, c: f64) -> f64 {
        self.initial + c * (self.cubic + self.log_term)
    }

    pub fn holds(&self, c: f64) -> bool {
        self.lhs <= self.rhs(c) * (1.0 + 1e-12)
    }

    /// Smallest `C >= 0` with `lhs <= rhs(C)`; infinite when no `C` works.
    pub fn minimal_c(&self) -> f64 {
        minimal_c(self.lhs - self.initial, self.cubic + self.log_term)
    }
}

/// General-shear estimate
/// `sup_t {||u - ubar||^2 + nu/2 ||grad u||^2_{L^2(0,t)}} <= exp(2GT) { 4 ||u0 - ubar||^2
///  + 2 nu G^2 T |Omega| + C A^2 |Omega| Re^-1 log(2 + Re) + 2 Re^-1 E
///  + C A^3 T |dOmega| max{H/W, 1}^2 }`,
/// with the `C`-free factors stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralShearTerms {
    pub lhs: f64,
    /// `exp(2 G T)`
    pub envelope: f64,
    pub initial: f64,
    pub viscous: f64,
    /// `A^2 |Omega| Re^-1 log(2 + Re)`
    pub log_term: f64,
    /// `2 Re^-1 E`
    pub energy_term: f64,
    /// `A^3 T |dOmega| max{H/W, 1}^2`
    pub cubic: f64,
    /// `max{H/W, 1}^2`
    pub aspect: f64,
}

impl GeneralShearTerms {
    pub fn rhs(&self, c: f64) -> f64 {
        self.envelope * (self.initial + self.viscous + self.energy_term + c * (self.log_term + self.cubic))
    }

    pub fn holds(&self, c: f64) -> bool {
        self.lhs <= self.rhs(c) * (1.0 + 1e-12)
    }

    pub fn minimal_c(&self) -> f64 {
        minimal_c(
            self.lhs / self.envelope - self.initial - self.viscous - self.energy_term,
            self.log_term + self.cubic,
        )
    }
}

fn minimal_c(excess: f64, per_c: f64) -> f64 {
    if excess <= 0.0 {
        0.0
    } else if per_c > 0.0 {
        excess / per_c
    } else {
        f64::INFINITY
    }
}

/// `Re^-1 log(2 + Re)`, zero for an inviscid or vanishing-shear case.
pub(crate) fn log_factor(st: &ShearStats) -> f64 {
    if st.amplitude > 0.0 {
        let re = st.reynolds();
        st.inverse_reynolds() * (2.0 + re).ln()
    } else {
        0.0
    }
}

pub fn constant_shear_terms(record: &SeparationRecord) -> ConstantShearTerms {
    let last = record.last();
    let st = &record.stats;
    ConstantShearTerms {
        lhs: last.separation + 0.5 * last.dissipation,
        initial: 4.0 * record.initial_deviation,
        cubic: st.amplitude.powi(3) * last.t,
        log_term: st.amplitude.powi(2) * log_factor(st),
    }
}

pub fn general_shear_terms(record: &SeparationRecord) -> GeneralShearTerms {
    let st = &record.stats;
    let t = record.last().t;
    let energy_term = if st.amplitude > 0.0 {
        2.0 * st.inverse_reynolds() * st.energy
    } else {
        0.0
    };
    GeneralShearTerms {
        lhs: record.sup_energy_deviation(),
        envelope: (2.0 * st.max_gradient * t).exp(),
        initial: 4.0 * record.initial_deviation,
        viscous: 2.0 * st.nu * st.max_gradient.powi(2) * t * st.volume,
        log_term: st.amplitude.powi(2) * st.volume * log_factor(st),
        energy_term,
        cubic: st.amplitude.powi(3) * t * st.boundary_measure * st.aspect,
        aspect: st.aspect,
    }
}

/// Term-by-term comparison of the general assembly against the constant-shear
/// one for a `G = 0`, unit-square-cell run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub envelope: f64,
    pub viscous: f64,
    /// `general.initial - constant.initial`
    pub initial_gap: f64,
    /// `general.log_term - constant.log_term`
    pub log_gap: f64,
    /// `general.cubic - |dOmega| constant.cubic`
    pub cubic_gap: f64,
    /// `general.energy_term - 2 Re^-1 A^2 |Omega|`
    pub energy_gap: f64,
    /// `energy_term / log_term = 2 / log(2 + Re)`: the energy term is a
    /// bounded multiple of the log term and folds into `C`.
    pub energy_to_log: f64,
}

impl Reduction {
    pub fn max_gap(&self) -> f64 {
        [
            (self.envelope - 1.0).abs(),
            self.viscous.abs(),
            self.initial_gap.abs(),
            self.log_gap.abs(),
            self.cubic_gap.abs(),
            self.energy_gap.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn reduce_to_constant_shear(record: &SeparationRecord) -> Result<Reduction> {
    let st = &record.stats;
    if st.max_gradient != 0.0 || st.width != 1.0 || st.height != 1.0 {
        return Err(Error::Domain(format!(
            "the reduction needs G = 0 and W = H = 1, got G = {}, W = {}, H = {}",
            st.max_gradient, st.width, st.height
        )));
    }
    let g = general_shear_terms(record);
    let c = constant_shear_terms(record);
    let energy_ref = if st.amplitude > 0.0 {
        2.0 * st.inverse_reynolds() * st.amplitude.powi(2) * st.volume
    } else {
        0.0
    };
    Ok(Reduction {
        envelope: g.envelope,
        viscous: g.viscous,
        initial_gap: g.initial - c.initial,
        log_gap: g.log_term - c.log_term,
        cubic_gap: g.cubic - st.boundary_measure * c.cubic,
        energy_gap: g.energy_term - energy_ref,
        energy_to_log: if g.log_term > 0.0 { g.energy_term / g.log_term } else { 0.0 },
    })
}

/// `1/2 ||u(T) - ubar||^2 + nu ||grad u||^2_{L^2(0,T)}` against `E`; the
/// ratio is the constant of the energy-inequality bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrivialBound {
    pub lhs: f64,
    pub energy: f64,
    /// `2 ||u0 - ubar||^2 + 3E`
    pub guaranteed: f64,
}

impl TrivialBound {
    pub fn ratio(&self) -> Option<f64> {
        (self.energy > 0.0).then(|| self.lhs / self.energy)
    }
}

/// The energy inequality gives `1/2 ||u(T) - ubar||^2 + nu ||grad u||^2 <=
/// ||u0||^2 + E <= 2 ||u0 - ubar||^2 + 3E`.
pub fn trivial_bound(record: &SeparationRecord) -> TrivialBound {
    let last = record.last();
    let e = record.stats.energy;
    TrivialBound {
        lhs: 0.5 * last.separation + last.dissipation,
        energy: e,
        guaranteed: 2.0 * record.initial_deviation + 3.0 * e,
    }
}

/// `int_a^T ||u - ubar||^2 dt` from the record samples.
pub fn separation_integral(record: &SeparationRecord, a: f64) -> f64 {
    trapezoid_from(record.samples.iter().map(|s| (s.t, s.separation)), a)
}
