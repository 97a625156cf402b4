//! Closed-form Euler subsolution on the extended strip `x2 in [-1, 2]`:
//! `v = (alpha, 0)`, `u = ((beta, gamma), (gamma, -beta))`, `q = beta`,
//! `beta = alpha^2 / 2`, with energy density `e` and the rates it implies.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parameters of the construction: front speed `lambda`, energy slack
/// `eps` and the rescaling amplitude `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionParams {
    pub lambda: f64,
    pub eps: f64,
    pub amplitude: f64,
}

impl SubsolutionParams {
    pub fn new(lambda: f64, eps: f64, amplitude: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidConfig(format!("lambda must lie in (0, 1), got {lambda}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidConfig(format!("eps must lie in (0, 1), got {eps}")));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidConfig(format!("amplitude must be positive, got {amplitude}")));
        }
        Ok(SubsolutionParams {
            lambda,
            eps,
            amplitude,
        })
    }

    /// `1 / (2 lambda)`, when the two ramps meet.
    pub fn horizon(&self) -> f64 {
        horizon(self.lambda)
    }

    pub fn state(&self) -> SubsolutionState {
        SubsolutionState {
            lambda: self.lambda,
            eps: self.eps,
        }
    }
}

pub fn horizon(lambda: f64) -> f64 {
    0.5 / lambda
}

fn check(t: f64, x2: f64, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidConfig(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    if !(t >= 0.0) || t >= horizon(lambda) {
        return Err(Error::Horizon { t, horizon: horizon(lambda) });
    }
    if !(-1.0..=2.0).contains(&x2) {
        return Err(Error::Domain(format!("x2 = {x2} is outside [-1, 2]")));
    }
    Ok(())
}

/// Piecewise-linear interpolant of `(-1, 0), (0, 0), (lambda t, 1),
/// (1 - lambda t, 1), (1, 0), (2, 0)`; at `t = 0` the indicator of `[0, 1]`.
pub fn alpha(t: f64, x2: f64, lambda: f64) -> Result<f64> {
    check(t, x2, lambda)?;
    Ok(alpha_unchecked(t, x2, lambda))
}

fn alpha_unchecked(t: f64, x2: f64, lambda: f64) -> f64 {
    if !(0.0..=1.0).contains(&x2) {
        return 0.0;
    }
    let ramp = lambda * t;
    if ramp == 0.0 {
        return 1.0;
    }
    (x2 / ramp).min((1.0 - x2) / ramp).min(1.0)
}

/// `-lambda/2 (1 - alpha^2)` for `x2 <= 1/2`, `+lambda/2 (1 - alpha^2)` above.
pub fn gamma(t: f64, x2: f64, lambda: f64) -> Result<f64> {
    check(t, x2, lambda)?;
    Ok(gamma_unchecked(t, x2, lambda))
}

fn gamma_unchecked(t: f64, x2: f64, lambda: f64) -> f64 {
    let a = alpha_unchecked(t, x2, lambda);
    let g = 0.5 * lambda * (1.0 - a * a);
    if x2 <= 0.5 {
        -g
    } else {
        g
    }
}

/// `e = 1/2 - eps/2 (1 - lambda)(1 - alpha^2)`.
pub fn energy_density(t: f64, x2: f64, lambda: f64, eps: f64) -> Result<f64> {
    check(t, x2, lambda)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidConfig(format!("eps must lie in (0, 1], got {eps}")));
    }
    Ok(energy_unchecked(t, x2, lambda, eps))
}

fn energy_unchecked(t: f64, x2: f64, lambda: f64, eps: f64) -> f64 {
    let a = alpha_unchecked(t, x2, lambda);
    0.5 - 0.5 * eps * (1.0 - lambda) * (1.0 - a * a)
}

/// `r = 2/3 eps lambda (1 - lambda)`, the rate at which `int e` decreases.
pub fn energy_rate_formula(lambda: f64, eps: f64) -> f64 {
    2.0 / 3.0 * eps * lambda * (1.0 - lambda)
}

/// Evaluators for a fixed `(lambda, eps)`; `eps = 1` is accepted here (the
/// constraint then holds with equality off the plateau).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionState {
    pub lambda: f64,
    pub eps: f64,
}

/// Both eigenvalues of the constraint matrix and the transport residual at
/// one sample point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointCheck {
    pub transport_residual: Option<f64>,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `max |d_t alpha + d_x2 gamma|` over samples away from kinks.
    pub max_transport_residual: f64,
    /// Smallest eigenvalue of `((e - alpha^2 + beta, gamma), (gamma, e - beta))`.
    pub min_eigenvalue: f64,
    pub samples: usize,
    pub excluded: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationRate {
    /// `-gamma(t, 0) + gamma(t, 1)`
    pub flux: f64,
    /// `-d/dt int_0^1 e dx2`, by quadrature and differencing.
    pub energy_rate: f64,
    /// `flux - energy_rate`
    pub rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationProfile {
    /// `1/2 ||v*(t) - A e1||^2` over the unit-period strip.
    pub separation: f64,
    /// `C` in `||v*(t) - A e1||^2 = C A^3 t`.
    pub c: f64,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, exact for degree 9.
const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

impl SubsolutionState {
    pub fn new(lambda: f64, eps: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidConfig(format!("lambda must lie in (0, 1), got {lambda}")));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidConfig(format!("eps must lie in (0, 1], got {eps}")));
        }
        Ok(SubsolutionState { lambda, eps })
    }

    pub fn horizon(&self) -> f64 {
        horizon(self.lambda)
    }

    pub fn alpha(&self, t: f64, x2: f64) -> Result<f64> {
        alpha(t, x2, self.lambda)
    }

    pub fn beta(&self, t: f64, x2: f64) -> Result<f64> {
        Ok(0.5 * self.alpha(t, x2)?.powi(2))
    }

    pub fn gamma(&self, t: f64, x2: f64) -> Result<f64> {
        gamma(t, x2, self.lambda)
    }

    pub fn energy_density(&self, t: f64, x2: f64) -> Result<f64> {
        energy_density(t, x2, self.lambda, self.eps)
    }

    /// `q = beta`
    pub fn pressure(&self, t: f64, x2: f64) -> Result<f64> {
        self.beta(t, x2)
    }

    /// Breakpoints of the piecewise-linear profile at time `t`.
    pub fn kinks(&self, t: f64) -> [f64; 4] {
        let ramp = self.lambda * t;
        [0.0, ramp, 1.0 - ramp, 1.0]
    }

    /// Smallest eigenvalue of the constraint matrix at one point.
    pub fn min_eigenvalue(&self, t: f64, x2: f64) -> Result<f64> {
        let a = self.alpha(t, x2)?;
        let b = 0.5 * a * a;
        let e = self.energy_density(t, x2)?;
        let g = self.gamma(t, x2)?;
        let (p, q) = (e - a * a + b, e - b);
        let mean = 0.5 * (p + q);
        let radius = (0.25 * (p - q) * (p - q) + g * g).sqrt();
        Ok(mean - radius)
    }

    /// Finite-difference residual of `d_t alpha + d_x2 gamma` at a point,
    /// or `None` within `margin` of a kink or of the time-interval ends.
    pub fn transport_residual(&self, t: f64, x2: f64, margin: f64) -> Result<Option<f64>> {
        check(t, x2, self.lambda)?;
        let tmax = self.horizon();
        if t < margin || t > tmax - margin || self.kinks(t).iter().any(|k| (x2 - k).abs() < margin) {
            return Ok(None);
        }
        let h = (0.25 * margin).min(1e-5);
        let l = self.lambda;
        // fourth-order central differences
        let d = |f: &dyn Fn(f64) -> f64, z: f64| {
            (8.0 * (f(z + h) - f(z - h)) - (f(z + 2.0 * h) - f(z - 2.0 * h))) / (12.0 * h)
        };
        let dt = d(&|s| alpha_unchecked(s, x2, l), t);
        let dx = d(&|y| gamma_unchecked(t, y, l), x2);
        Ok(Some((dt + dx).abs()))
    }

    /// Sample an `nt x nx` grid of `(t, x2)` in `(0, T) x [-1, 2]`.
    pub fn residual_check(&self, nt: usize, nx: usize, kink_margin: f64) -> Result<ResidualReport> {
        if nt == 0 || nx < 2 || !(kink_margin > 0.0) {
            return Err(Error::InvalidConfig("need nt >= 1, nx >= 2 and a positive margin".into()));
        }
        let tmax = self.horizon();
        let mut report = ResidualReport {
            max_transport_residual: 0.0,
            min_eigenvalue: f64::INFINITY,
            samples: 0,
            excluded: 0,
        };
        for a in 0..nt {
            let t = tmax * (a as f64 + 0.5) / nt as f64;
            for b in 0..nx {
                let x2 = -1.0 + 3.0 * b as f64 / (nx - 1) as f64;
                report.samples += 1;
                report.min_eigenvalue = report.min_eigenvalue.min(self.min_eigenvalue(t, x2)?);
                match self.transport_residual(t, x2, kink_margin)? {
                    Some(r) => report.max_transport_residual = report.max_transport_residual.max(r),
                    None => report.excluded += 1,
                }
            }
        }
        Ok(report)
    }

    /// `int_a^b f(x2) dx2` with 5-point Gauss on every piece between kinks.
    fn integrate(&self, t: f64, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let mut cuts: Vec<f64> = vec![a, b];
        cuts.extend(self.kinks(t).iter().copied().filter(|&k| k > a && k < b));
        cuts.push(0.5f64.clamp(a, b));
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                let (m, r) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                GAUSS5.iter().map(|&(x, wt)| wt * r * f(m + r * x)).sum::<f64>()
            })
            .sum()
    }

    /// `int_0^1 e(t, x2) dx2`
    pub fn total_energy(&self, t: f64) -> Result<f64> {
        check(t, 0.5, self.lambda)?;
        Ok(self.integrate(t, 0.0, 1.0, |x| energy_unchecked(t, x, self.lambda, self.eps)))
    }

    /// `int_0^1 alpha(t, x2) dx2`
    pub fn momentum(&self, t: f64) -> Result<f64> {
        check(t, 0.5, self.lambda)?;
        Ok(self.integrate(t, 0.0, 1.0, |x| alpha_unchecked(t, x, self.lambda)))
    }

    /// `-d/dt int e` by a central difference of the quadrature at `t`.
    pub fn energy_rate(&self, t: f64) -> Result<f64> {
        let h = 1e-4 * self.horizon();
        let (a, b) = ((t - h).max(0.0), (t + h).min(self.horizon() * (1.0 - 1e-12)));
        Ok(-(self.total_energy(b)? - self.total_energy(a)?) / (b - a))
    }

    /// `1/2 d/dt int |v - v(0)|^2 = (-gamma(t,0) + gamma(t,1)) - r`.
    pub fn deviation_rate(&self, t: f64) -> Result<DeviationRate> {
        let flux = self.gamma(t, 1.0)? - self.gamma(t, 0.0)?;
        let energy_rate = self.energy_rate(t)?;
        Ok(DeviationRate {
            flux,
            energy_rate,
            rate: flux - energy_rate,
        })
    }

    /// `1/2 ||v(t) - v(0)||^2 = (lambda - r) t`.
    pub fn deviation(&self, t: f64) -> Result<f64> {
        check(t, 0.5, self.lambda)?;
        Ok((self.lambda - energy_rate_formula(self.lambda, self.eps)) * t)
    }
}

/// `v*(t, x) = A v(A t, x)`: `1/2 ||v*(t) - A e1||^2 = (lambda - r) A^3 t`
/// and `C = 2 (lambda - r)`.
pub fn rescale_profile(params: &SubsolutionParams, t: f64) -> Result<SeparationProfile> {
    let a = params.amplitude;
    let limit = params.horizon() / a;
    if !(t > 0.0) || t >= limit {
        return Err(Error::Horizon { t, horizon: limit });
    }
    let state = params.state();
    let separation = a * a * state.deviation(a * t)?;
    let c = 2.0 * (params.lambda - energy_rate_formula(params.lambda, params.eps));
    if !(c > 0.0 && c < 2.0) {
        return Err(Error::Construction(format!("C = {c} is outside (0, 2)")));
    }
    Ok(SeparationProfile { separation, c })
}

/// Rows `(t, int e, separation)` for plotting, in the unscaled variables.
pub fn profile_csv(state: &SubsolutionState, samples: usize) -> Result<String> {
    let mut s = String::from("t,energy,separation\n");
    let tmax = state.horizon();
    for k in 0..samples {
        let t = tmax * k as f64 / samples as f64;
        s.push_str(&format!("{t},{},{}\n", state.total_energy(t)?, state.deviation(t)?));
    }
    Ok(s)
}
