use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Weak Lorentz quasi-norm `sup_sigma sigma |{|f| > sigma}|^(1/p)` of a
/// function given by sample values and the measures they carry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzReport {
    pub p: f64,
    pub value: f64,
    /// Level at which the supremum is approached from below.
    pub sigma_star: f64,
    /// `(sigma, |{|f| >= sigma}|, sigma |{|f| >= sigma}|^(1/p))` at each
    /// distinct value, in decreasing `sigma`.
    pub curve: Vec<(f64, f64, f64)>,
}

impl LorentzReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("sigma,measure,weighted\n");
        for (a, b, c) in &self.curve {
            s.push_str(&format!("{a},{b},{c}\n"));
        }
        s
    }
}

/// The quasi-norm is a supremum of `sigma m(sigma)^(1/p)` with `m`
/// left-continuous and piecewise constant between sample values, so it is
/// approached at `sigma -> v^-` for the distinct values `v`.
pub fn weak_lorentz(values: &[f64], measures: &[f64], p: f64) -> Result<LorentzReport> {
    if !(p > 0.0) {
        return Err(Error::InvalidConfig(format!("Lorentz exponent must be positive, got {p}")));
    }
    if values.len() != measures.len() {
        return Err(Error::Shape(format!(
            "{} values but {} measures",
            values.len(),
            measures.len()
        )));
    }
    if measures.iter().any(|&m| !(m >= 0.0)) {
        return Err(Error::Domain("measures must be nonnegative".into()));
    }
    let mut pairs: Vec<(f64, f64)> = values
        .iter()
        .zip(measures)
        .map(|(&v, &m)| (v.abs(), m))
        .filter(|&(v, m)| v > 0.0 && m > 0.0)
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut curve = Vec::new();
    let mut cumulative = 0.0;
    let mut k = 0;
    while k < pairs.len() {
        let level = pairs[k].0;
        while k < pairs.len() && pairs[k].0 == level {
            cumulative += pairs[k].1;
            k += 1;
        }
        curve.push((level, cumulative, level * cumulative.powf(1.0 / p)));
    }
    let (sigma_star, value) = curve
        .iter()
        .fold((0.0, 0.0), |best, &(s, _, v)| if v > best.1 { (s, v) } else { best });
    Ok(LorentzReport {
        p,
        value,
        sigma_star,
        curve,
    })
}
