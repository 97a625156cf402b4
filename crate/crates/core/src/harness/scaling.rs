use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::run::SeparationRecord;

/// One `(A, T)` observation of layer separation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub amplitude: f64,
    pub t: f64,
    /// `||u(T) - ubar||^2`
    pub separation: f64,
    /// `nu/2 ||grad u||^2_{L^2(0,T)}`, added to the separation when fitting `C`.
    pub half_dissipation: f64,
    /// `||u0 - ubar||^2`
    pub initial_deviation: f64,
    /// `None` for inviscid data (the log term drops out).
    pub reynolds: Option<f64>,
}

impl ScalingPoint {
    /// `A^3 T + A^2 Re^-1 log(2 + Re)`, the factor multiplying `C`.
    pub fn c_factor(&self) -> f64 {
        let log = match self.reynolds {
            Some(re) if re > 0.0 => self.amplitude.powi(2) * (2.0 + re).ln() / re,
            _ => 0.0,
        };
        self.amplitude.powi(3) * self.t + log
    }

    /// Points at every positive sample time of a run.
    pub fn from_record(record: &SeparationRecord) -> Vec<ScalingPoint> {
        let st = &record.stats;
        record
            .samples
            .iter()
            .filter(|s| s.t > 0.0)
            .map(|s| ScalingPoint {
                amplitude: st.amplitude,
                t: s.t,
                separation: s.separation,
                half_dissipation: 0.5 * s.dissipation,
                initial_deviation: record.initial_deviation,
                reynolds: (st.amplitude > 0.0).then(|| st.reynolds()),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// `(p, q)` in `separation ~ c A^p T^q`; `None` when every separation is zero.
    pub exponents: Option<(f64, f64)>,
    /// `exp(c)`
    pub prefactor: Option<f64>,
    /// Smallest `C` with `separation + nu/2 ||grad u||^2 <= 4 ||u0 - ubar||^2
    /// + C (A^3 T + A^2 Re^-1 log(2 + Re))` at every point.
    pub fitted_c: f64,
    pub scaling_undefined: bool,
    /// Points entering the regression.
    pub used: usize,
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    v.len()
}

/// Least squares of `log separation = c + p log A + q log T` over the points
/// with positive separation, and the minimal constant of the constant-shear
/// estimate over all points.
pub fn fit_scaling(points: &[ScalingPoint]) -> Result<ScalingFit> {
    let na = distinct(points.iter().map(|p| p.amplitude));
    let nt = distinct(points.iter().map(|p| p.t));
    if na < 3 || nt < 3 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs at least 3 amplitudes and 3 times, got {na} and {nt}"
        )));
    }
    let mut fitted_c: f64 = 0.0;
    for p in points {
        let excess = p.separation + p.half_dissipation - 4.0 * p.initial_deviation;
        if excess > 0.0 {
            let f = p.c_factor();
            fitted_c = fitted_c.max(if f > 0.0 { excess / f } else { f64::INFINITY });
        }
    }
    let used: Vec<&ScalingPoint> = points
        .iter()
        .filter(|p| p.separation > 0.0 && p.amplitude > 0.0 && p.t > 0.0)
        .collect();
    if used.is_empty() {
        return Ok(ScalingFit {
            exponents: None,
            prefactor: None,
            fitted_c,
            scaling_undefined: true,
            used: 0,
        });
    }
    let n = used.len();
    let a = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => used[i].amplitude.ln(),
        _ => used[i].t.ln(),
    });
    let b = DVector::from_iterator(n, used.iter().map(|p| p.separation.ln()));
    let x = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::InsufficientData(format!("degenerate regression: {e}")))?;
    let ua = distinct(used.iter().map(|p| p.amplitude));
    let ut = distinct(used.iter().map(|p| p.t));
    let identifiable = ua >= 2 && ut >= 2;
    Ok(ScalingFit {
        exponents: identifiable.then(|| (x[1], x[2])),
        prefactor: identifiable.then(|| x[0].exp()),
        fitted_c,
        scaling_undefined: !identifiable,
        used: n,
    })
}

/// `W A^2 sqrt(nu t) 4 (2 - sqrt 2) / sqrt(pi)`: the squared `L^2` distance
/// between two independent erfc layers and the uniform flow, valid while the
/// layers are thin compared to the channel.
pub fn heat_layer_separation(amplitude: f64, width: f64, nu: f64, t: f64) -> f64 {
    let c = 4.0 * (2.0 - 2f64.sqrt()) / std::f64::consts::PI.sqrt();
    width * amplitude * amplitude * (nu * t).sqrt() * c
}

/// Fitted constants along the resolution ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionStability {
    /// `(ny, C)` in ladder order.
    pub levels: Vec<(usize, f64)>,
    pub non_increasing: bool,
    /// `C_finest / C_second_finest - 1`
    pub finest_growth: Option<f64>,
    /// The constant grew by more than 25% between the two finest levels.
    pub flagged: bool,
}

pub fn resolution_stability(levels: &[(usize, f64)]) -> ResolutionStability {
    let non_increasing = levels.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12));
    let finest_growth = match levels {
        [.., (_, a), (_, b)] if *a > 0.0 => Some(b / a - 1.0),
        _ => None,
    };
    ResolutionStability {
        levels: levels.to_vec(),
        non_increasing,
        finest_growth,
        flagged: finest_growth.is_some_and(|g| g > 0.25),
    }
}
