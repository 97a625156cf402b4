use serde::{Deserialize, Serialize};

use crate::czdecomp::{weak_lorentz, TildeOmega};
use crate::{Error, Result};

/// Physical inputs of the split of the wall pairing over `(T_nu, T)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitInputs {
    pub amplitude: f64,
    pub width: f64,
    pub height: f64,
    pub nu: f64,
    pub t_nu: f64,
    pub t_end: f64,
    /// `nu ||grad u||^2_{L^2((0,T) x Omega)}`
    pub dissipation: f64,
}

/// Young's inequality applied to the Hölder bound of the above-threshold
/// part: `3 a b <= (2/3) eps^{3/2} a^{3/2} + 9 eps^-3 b^3` with
/// `eps^{3/2} = 3 / (16 C_stat)`, so that the first term is at most
/// `nu/8 ||grad u||^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungSplit {
    /// `||f||^{3/2}_{L^{3/2,inf}} / (nu ||grad u||^2)` for the thresholded
    /// averaged vorticity `f` of this run.
    pub c_stat: f64,
    /// `None` when nothing lies above the threshold.
    pub eps: Option<f64>,
    /// `C' = 9 / eps^3`
    pub c_prime: f64,
    /// `nu/8 ||grad u||^2`
    pub dissipation_part: f64,
    /// `C' A^3 T |dOmega|`
    pub cubic_part: f64,
}

impl YoungSplit {
    pub fn bound(&self) -> f64 {
        self.dissipation_part + self.cubic_part
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    /// `int int A nu omega~` over `(T_nu, T)`, bottom then top.
    pub total: [f64; 2],
    /// Part where `nu omega~ > max{nu/t, nu^2/W^2, nu^2/H^2}`.
    pub above: [f64; 2],
    /// Part where the indicator is off.
    pub remainder: [f64; 2],
    /// `int int A max{nu/t, nu^2/W^2, nu^2/H^2}` over both walls.
    pub remainder_majorant: f64,
    /// `A nu |dOmega| log(T/T_nu) + A nu^2 min{W,H}^-2 T |dOmega|`
    pub remainder_closed_form: f64,
    /// `||f||_{L^{3/2,inf}}` of the thresholded `nu omega~` on both walls.
    pub weak_norm: f64,
    /// `||A||_{L^{3,1}((T_nu,T) x dOmega)} = A (T |dOmega|)^{1/3}`.
    pub l31_norm: f64,
    /// `3 ||f||_{L^{3/2,inf}} ||A||_{L^{3,1}}`
    pub holder_bound: f64,
    pub young: Option<YoungSplit>,
}

impl SplitReport {
    pub fn total_sum(&self) -> f64 {
        self.total[0] + self.total[1]
    }

    pub fn above_sum(&self) -> f64 {
        self.above[0] + self.above[1]
    }

    pub fn remainder_sum(&self) -> f64 {
        self.remainder[0] + self.remainder[1]
    }

    /// `|above + remainder - total| / total` (zero for a zero total).
    pub fn accounting_error(&self) -> f64 {
        let t = self.total_sum();
        let d = (self.above_sum() + self.remainder_sum() - t).abs();
        if t == 0.0 {
            d
        } else {
            d / t.abs()
        }
    }
}

/// `int_a^b max{nu/t, nu^2 m} dt` with `m = min{W, H}^-2`.
fn majorant_integral(nu: f64, m: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let tc = 1.0 / (nu * m);
    if tc <= a {
        nu * nu * m * (b - a)
    } else if tc >= b {
        nu * (b / a).ln()
    } else {
        nu * (tc / a).ln() + nu * nu * m * (b - tc)
    }
}

/// Split the pairing of `A` against the averaged wall vorticity. `tilde` is
/// the averaged vorticity of the run rescaled to unit viscosity, so its
/// values equal the physical `nu omega~^nu` and its face measures are the
/// physical ones divided by `nu^2`. The threshold is applied pointwise in
/// time, and each cube contributes over its overlap with `(T_nu, T)`.
pub fn split_boundary_term(tilde: &TildeOmega, inp: &SplitInputs) -> Result<SplitReport> {
    let SplitInputs {
        amplitude: a,
        width,
        height,
        nu,
        t_nu,
        t_end,
        dissipation,
    } = *inp;
    if !(nu > 0.0 && t_nu > 0.0 && t_end > t_nu && width > 0.0 && height > 0.0 && a >= 0.0) {
        return Err(Error::Domain(format!(
            "split needs nu > 0, 0 < T_nu < T and a positive channel, got nu = {nu}, T_nu = {t_nu}, T = {t_end}"
        )));
    }
    let m = width.min(height).powi(-2);
    let floor = nu * nu * m;
    let mut total = [0.0; 2];
    let mut above = [0.0; 2];
    let mut remainder = [0.0; 2];
    let mut values = Vec::new();
    let mut measures = Vec::new();
    for e in &tilde.entries {
        let c = &e.cube;
        let (s, t) = (nu * c.s, nu * c.t);
        let (lo, hi) = (s.max(t_nu), t.min(t_end));
        if hi <= lo {
            continue;
        }
        let w = nu * c.w;
        let v = e.value;
        let k = c.wall.index();
        total[k] += a * v * w * (hi - lo);
        // v > nu/t  <=>  t > nu/v
        let start = if v > floor { lo.max(nu / v).min(hi) } else { hi };
        above[k] += a * v * w * (hi - start);
        remainder[k] += a * v * w * (start - lo);
        if hi > start {
            values.push(v);
            measures.push(w * (hi - start));
        }
    }
    let boundary = 2.0 * width;
    let weak_norm = weak_lorentz(&values, &measures, 1.5)?.value;
    let l31_norm = a * (t_end * boundary).cbrt();
    let holder_bound = 3.0 * weak_norm * l31_norm;
    let young = (dissipation > 0.0).then(|| {
        let c_stat = weak_norm.powf(1.5) / dissipation;
        if c_stat > 0.0 {
            let eps = (3.0 / (16.0 * c_stat)).powf(2.0 / 3.0);
            let c_prime = 9.0 / eps.powi(3);
            YoungSplit {
                c_stat,
                eps: Some(eps),
                c_prime,
                dissipation_part: dissipation / 8.0,
                cubic_part: c_prime * a.powi(3) * t_end * boundary,
            }
        } else {
            YoungSplit {
                c_stat,
                eps: None,
                c_prime: 0.0,
                dissipation_part: dissipation / 8.0,
                cubic_part: 0.0,
            }
        }
    });
    Ok(SplitReport {
        total,
        above,
        remainder,
        remainder_majorant: a * boundary * majorant_integral(nu, m, t_nu, t_end),
        remainder_closed_form: a * nu * boundary * (t_end / t_nu).ln() + a * nu * nu * m * t_end * boundary,
        weak_norm,
        l31_norm,
        holder_bound,
        young,
    })
}
