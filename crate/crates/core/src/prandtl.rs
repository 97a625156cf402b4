//! Sine-series solution of the shear-layer heat problem
//! `dt v = nu dyy v` on `(0, H)` with `v = 0` on both walls.
//!
//! A shear flow `Ubar(y) e1` started from no-slip walls evolves as the
//! x-independent Navier–Stokes solution `v(t, y) e1` with zero pressure, so
//! this module doubles as an exact oracle for the channel solver.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Terms whose damping factor `exp(-nu k^2 t)` falls below this are dropped.
const DAMPING_CUTOFF: f64 = 1e-17;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearProfile {
    coefficients: Vec<f64>,
    height: f64,
    nu: f64,
}

/// A series value together with a flag telling whether the truncated tail
/// could still matter at this time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub reliable: bool,
}

impl ShearProfile {
    /// `coefficients[n - 1] = b_n` for `v0(y) = sum b_n sin(n pi y / H)`.
    pub fn new(coefficients: Vec<f64>, height: f64, nu: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidConfig("a profile needs at least one mode".into()));
        }
        if !(height > 0.0) || !(nu > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "height and viscosity must be positive, got H = {height}, nu = {nu}"
            )));
        }
        if coefficients.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig("non-finite sine coefficient".into()));
        }
        Ok(ShearProfile {
            coefficients,
            height,
            nu,
        })
    }

    /// `Ubar = A` on `(0, H)`: `b_n = 4 A / (n pi)` for odd `n`.
    pub fn constant(amplitude: f64, height: f64, nu: f64, modes: usize) -> Result<Self> {
        let b = (1..=modes)
            .map(|n| if n % 2 == 1 { 4.0 * amplitude / (n as f64 * PI) } else { 0.0 })
            .collect();
        ShearProfile::new(b, height, nu)
    }

    /// `Ubar = A min(1, y / d, (H - y) / d)`, the constant shear with linear
    /// ramps of width `d` at both walls:
    /// `b_n = 4 A H sin(n pi d / H) / (d n^2 pi^2)` for odd `n`.
    pub fn ramped_constant(amplitude: f64, ramp: f64, height: f64, nu: f64, modes: usize) -> Result<Self> {
        if !(ramp > 0.0 && ramp <= 0.5 * height) {
            return Err(Error::InvalidConfig(format!(
                "ramp width {ramp} must lie in (0, H/2]"
            )));
        }
        let b = (1..=modes)
            .map(|n| {
                if n % 2 == 0 {
                    return 0.0;
                }
                let k = n as f64 * PI;
                4.0 * amplitude * height * (k * ramp / height).sin() / (ramp * k * k)
            })
            .collect();
        ShearProfile::new(b, height, nu)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn modes(&self) -> usize {
        self.coefficients.len()
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        ShearProfile::new(self.coefficients.clone(), self.height, nu)
    }

    pub fn scaled(&self, c: f64) -> Self {
        ShearProfile {
            coefficients: self.coefficients.iter().map(|b| c * b).collect(),
            ..self.clone()
        }
    }

    fn wavenumber(&self, n: usize) -> f64 {
        n as f64 * PI / self.height
    }

    /// Number of modes whose damping at time `t` is still above the cutoff.
    fn active_modes(&self, t: f64) -> usize {
        if t <= 0.0 {
            return self.modes();
        }
        // nu (n pi / H)^2 t <= -ln(cutoff)
        let n = (self.height / PI) * (-DAMPING_CUTOFF.ln() / (self.nu * t)).sqrt();
        (n.ceil() as usize).clamp(1, self.modes())
    }

    fn damping(&self, n: usize, t: f64) -> f64 {
        let k = self.wavenumber(n);
        (-self.nu * k * k * t).exp()
    }

    fn tail_negligible(&self, t: f64) -> bool {
        let n = self.modes();
        let peak = self.coefficients.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let upper = self.coefficients[n / 2..].iter().fold(0.0f64, |a, b| a.max(b.abs()));
        upper <= 1e-15 * peak || self.damping(n / 2 + 1, t) <= 1e-15
    }

    /// `v(t, y) = sum b_n sin(n pi y / H) exp(-nu (n pi / H)^2 t)`.
    pub fn evaluate(&self, t: f64, y: f64) -> f64 {
        (1..=self.active_modes(t))
            .map(|n| self.coefficients[n - 1] * (self.wavenumber(n) * y).sin() * self.damping(n, t))
            .sum()
    }

    /// Term-wise `dv/dy`.
    pub fn evaluate_gradient(&self, t: f64, y: f64) -> SeriesValue {
        let value = (1..=self.active_modes(t))
            .map(|n| {
                let k = self.wavenumber(n);
                self.coefficients[n - 1] * k * (k * y).cos() * self.damping(n, t)
            })
            .sum();
        SeriesValue {
            value,
            reliable: self.tail_negligible(t),
        }
    }

    /// Term-wise `dv/dt = nu d2v/dy2`.
    pub fn evaluate_time_derivative(&self, t: f64, y: f64) -> f64 {
        (1..=self.active_modes(t))
            .map(|n| {
                let k = self.wavenumber(n);
                -self.nu * k * k * self.coefficients[n - 1] * (k * y).sin() * self.damping(n, t)
            })
            .sum()
    }

    /// `||v(t)||^2_{L^2(0, H)} = H/2 sum b_n^2 exp(-2 nu k_n^2 t)`.
    pub fn l2_norm_sq(&self, t: f64) -> f64 {
        0.5 * self.height
            * (1..=self.active_modes(t))
                .map(|n| (self.coefficients[n - 1] * self.damping(n, t)).powi(2))
                .sum::<f64>()
    }

    /// `||dv/dy(t)||^2_{L^2(0, H)}`.
    pub fn gradient_l2_norm_sq(&self, t: f64) -> f64 {
        0.5 * self.height
            * (1..=self.active_modes(t))
                .map(|n| (self.coefficients[n - 1] * self.wavenumber(n) * self.damping(n, t)).powi(2))
                .sum::<f64>()
    }

    /// `int_0^t ||dv/dy(s)||^2 ds`, in closed form term by term.
    pub fn gradient_l2_time_integral(&self, t: f64) -> f64 {
        0.5 * self.height
            * (1..=self.modes())
                .map(|n| {
                    let b = self.coefficients[n - 1];
                    // int_0^t k^2 exp(-2 nu k^2 s) ds = (1 - exp(-2 nu k^2 t)) / (2 nu)
                    b * b * (1.0 - self.damping(n, t).powi(2)) / (2.0 * self.nu)
                })
                .sum::<f64>()
    }

    /// `int_0^H (v(t) - c)^2 dy` for a constant `c`.
    pub fn l2_distance_sq_to_constant(&self, t: f64, c: f64) -> f64 {
        // |v|^2 - 2 c int v + c^2 H, with int_0^H sin(n pi y/H) = 2H/(n pi) for odd n
        let mean: f64 = (1..=self.active_modes(t))
            .filter(|n| n % 2 == 1)
            .map(|n| self.coefficients[n - 1] * self.damping(n, t) * 2.0 * self.height / (n as f64 * PI))
            .sum();
        self.l2_norm_sq(t) - 2.0 * c * mean + c * c * self.height
    }

    /// `sup_y |dv/dy(t, y)|` by dense sampling plus golden-section refinement
    /// around every sampled local maximum.
    pub fn gradient_sup_norm(&self, t: f64) -> f64 {
        let m = (16 * self.active_modes(t)).clamp(256, 1 << 16);
        let h = self.height / m as f64;
        let g = |y: f64| self.evaluate_gradient(t, y).value.abs();
        let samples: Vec<f64> = (0..=m).map(|k| g(k as f64 * h)).collect();
        let mut best = samples.iter().cloned().fold(0.0f64, f64::max);
        for k in 1..m {
            if samples[k] >= samples[k - 1] && samples[k] >= samples[k + 1] {
                best = best.max(golden_max(&g, (k - 1) as f64 * h, (k + 1) as f64 * h));
            }
        }
        best
    }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..40 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Discrete sine coefficients of cell-centered samples
/// `samples[j] = Ubar((j + 1/2) H / ny)`:
/// `b_n = (2 / ny) sum_j f_j sin(n pi (j + 1/2) / ny)`, with weight `1 / ny`
/// for `n = ny`. Exact inverse of summing the series at the samples.
pub fn sine_coefficients(samples: &[f64], height: f64, nu: f64, modes: usize) -> Result<ShearProfile> {
    let ny = samples.len();
    if modes == 0 || modes > ny {
        return Err(Error::InvalidConfig(format!(
            "mode count {modes} must lie in 1..={ny} for {ny} samples"
        )));
    }
    let b = (1..=modes)
        .map(|n| {
            let w = if n == ny { 1.0 } else { 2.0 } / ny as f64;
            w * samples
                .iter()
                .enumerate()
                .map(|(j, f)| f * (n as f64 * PI * (j as f64 + 0.5) / ny as f64).sin())
                .sum::<f64>()
        })
        .collect();
    ShearProfile::new(b, height, nu)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCheck {
    /// `||dv/dy(t)||_inf`
    pub lhs: f64,
    /// `1/2 (nu t)^(-3/4) ||v0||_{L^2}`
    pub rhs: f64,
}

impl LipschitzCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Both sides of the heat-layer Lipschitz decay bound
/// `||dv/dy(t)||_inf <= 1/2 (nu t)^(-3/4) ||v0||_{L^2(0, H)}`.
pub fn lipschitz_decay_check(profile: &ShearProfile, t: f64) -> Result<LipschitzCheck> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("the decay bound is undefined at t = {t}")));
    }
    Ok(LipschitzCheck {
        lhs: profile.gradient_sup_norm(t),
        rhs: 0.5 * (profile.nu * t).powf(-0.75) * profile.l2_norm_sq(0.0).sqrt(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesBound {
    /// `sum_{n >= 1} n^2 exp(-n^2 z)`
    pub sum: f64,
    /// `z^(-3/2)`
    pub bound: f64,
    /// Rigorous upper bound on the neglected tail.
    pub tail: f64,
    pub terms: usize,
}

impl SeriesBound {
    pub fn holds(&self) -> bool {
        self.sum < self.bound
    }
}

/// Sum `n^2 exp(-n^2 z)` until the geometric tail bound drops below `1e-15`.
pub fn series_bound_check(z: f64) -> Result<SeriesBound> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("series needs z > 0, got {z}")));
    }
    let term = |n: f64| n * n * (-n * n * z).exp();
    let mut sum = 0.0;
    let mut n = 1usize;
    loop {
        sum += term(n as f64);
        let nf = n as f64;
        // past the peak the term ratio a_{m+1}/a_m is decreasing in m, so
        // the tail after n is at most a_{n+1} / (1 - q)
        if nf * nf * z >= 1.0 {
            let q = ((nf + 1.0) / nf).powi(2) * (-(2.0 * nf + 1.0) * z).exp();
            if q < 1.0 {
                let tail = term(nf + 1.0) / (1.0 - q);
                if tail <= 1e-15 {
                    return Ok(SeriesBound {
                        sum,
                        bound: z.powf(-1.5),
                        tail,
                        terms: n,
                    });
                }
            }
        }
        n += 1;
    }
}

/// `(ln 2 / 4)^4 E^-2 |dOmega|^2 nu^3`, the time below which the Prandtl
/// layer controls the flow.
pub fn t_star(energy: f64, boundary_measure: f64, nu: f64) -> Result<f64> {
    if !(energy > 0.0 && boundary_measure > 0.0 && nu > 0.0) {
        return Err(Error::Domain(format!(
            "T* needs positive arguments, got E = {energy}, |dOmega| = {boundary_measure}, nu = {nu}"
        )));
    }
    Ok((2f64.ln() / 4.0).powi(4) * boundary_measure.powi(2) * nu.powi(3) / energy.powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnappedTime {
    pub t_star: f64,
    /// `4^-K T`, or `T` itself when the run is degenerate.
    pub t_nu: f64,
    pub k: u32,
    /// `T < T*/4`: no nonnegative `K` brackets `T_nu` in `[T*/4, T*]`.
    pub degenerate: bool,
}

/// Snap `T_nu = 4^-K T` into `[T*/4, T*]`.
pub fn snap_t_nu(t_final: f64, t_star: f64) -> Result<SnappedTime> {
    if !(t_final > 0.0 && t_star > 0.0) {
        return Err(Error::Domain("snapping needs positive times".into()));
    }
    if t_final < 0.25 * t_star {
        return Ok(SnappedTime {
            t_star,
            t_nu: t_final,
            k: 0,
            degenerate: true,
        });
    }
    let mut k = 0u32;
    let mut t = t_final;
    while t > t_star {
        t *= 0.25;
        k += 1;
    }
    Ok(SnappedTime {
        t_star,
        t_nu: t,
        k,
        degenerate: false,
    })
}

/// `int_0^{T_nu} (nu t)^(-3/4) (E / |dOmega|)^(1/2) dt = 4 T_nu^(1/4) nu^(-3/4) (E/|dOmega|)^(1/2)`,
/// which is at most `ln 2` whenever `T_nu <= T*`.
pub fn l1_linf_integral(t_nu: f64, nu: f64, energy: f64, boundary_measure: f64) -> f64 {
    4.0 * t_nu.powf(0.25) * nu.powf(-0.75) * (energy / boundary_measure).sqrt()
}

/// `(t, ||dv/dy||_inf, bound)` rows for plotting.
pub fn decay_curve(profile: &ShearProfile, times: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    times
        .iter()
        .map(|&t| lipschitz_decay_check(profile, t).map(|c| (t, c.lhs, c.rhs)))
        .collect()
}

pub fn decay_curve_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut s = String::from("t,grad_sup,bound\n");
    for (t, l, r) in rows {
        s.push_str(&format!("{t},{l},{r}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_mode_decays_exponentially() {
        let p = ShearProfile::new(vec![1.0], 1.0, 0.1).unwrap();
        for &(t, y) in &[(0.0, 0.3), (0.7, 0.5), (2.0, 0.9)] {
            let exact = (-0.1 * PI * PI * t).exp() * (PI * y).sin();
            assert!((p.evaluate(t, y) - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn transform_of_single_mode_and_zero() {
        let ny = 32;
        let s: Vec<f64> = (0..ny).map(|j| (PI * (j as f64 + 0.5) / ny as f64).sin()).collect();
        let p = sine_coefficients(&s, 1.0, 1.0, ny).unwrap();
        assert!((p.coefficients()[0] - 1.0).abs() < 1e-13);
        assert!(p.coefficients()[1..].iter().all(|b| b.abs() < 1e-13));
        let z = sine_coefficients(&vec![0.0; ny], 1.0, 1.0, 8).unwrap();
        assert!(z.coefficients().iter().all(|&b| b == 0.0));
        assert!(sine_coefficients(&s, 1.0, 1.0, ny + 1).is_err());
    }

    #[test]
    fn transform_reproduces_collocation_values() {
        let ny = 24;
        let h = 2.0;
        let f: Vec<f64> = (0..ny).map(|j| ((j * 7) % 5) as f64 - 1.3).collect();
        let p = sine_coefficients(&f, h, 1.0, ny).unwrap();
        for (j, fj) in f.iter().enumerate() {
            let y = (j as f64 + 0.5) * h / ny as f64;
            assert!((p.evaluate(0.0, y) - fj).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_profile_coefficients_converge() {
        // the cell-centered transform of a constant approaches 4A/(n pi) on odd n
        let ny = 4096;
        let p = sine_coefficients(&vec![2.0; ny], 1.0, 1.0, 9).unwrap();
        let exact = ShearProfile::constant(2.0, 1.0, 1.0, 9).unwrap();
        for (a, b) in p.coefficients().iter().zip(exact.coefficients()) {
            assert!((a - b).abs() < 1e-5, "{a} {b}");
        }
    }

    #[test]
    fn ramp_coefficients_match_quadrature() {
        let (a, d, h) = (1.5, 0.1, 1.0);
        let p = ShearProfile::ramped_constant(a, d, h, 1.0, 6).unwrap();
        let m = 200_000;
        for n in 1..=6 {
            let k = n as f64 * PI / h;
            let mut s = 0.0;
            for q in 0..m {
                let y = (q as f64 + 0.5) * h / m as f64;
                let u = a * (y / d).min(1.0).min((h - y) / d);
                s += u * (k * y).sin();
            }
            let b = 2.0 / h * s * h / m as f64;
            assert!((b - p.coefficients()[n - 1]).abs() < 1e-8, "n = {n}");
        }
    }

    #[test]
    fn parseval_for_band_limited_input() {
        let ny = 64;
        let h = 1.5;
        let b = [0.3, -1.0, 0.0, 0.25, 0.7];
        let f: Vec<f64> = (0..ny)
            .map(|j| {
                let y = (j as f64 + 0.5) * h / ny as f64;
                b.iter().enumerate().map(|(n, c)| c * ((n + 1) as f64 * PI * y / h).sin()).sum()
            })
            .collect();
        let p = sine_coefficients(&f, h, 1.0, ny).unwrap();
        let midpoint: f64 = f.iter().map(|v| v * v).sum::<f64>() * h / ny as f64;
        assert!((p.l2_norm_sq(0.0) - midpoint).abs() < 1e-12);
    }

    /// Method-of-lines heat solution on `m` interior nodes: second-order
    /// differences in space, exact in time through the discrete sine basis.
    fn fd_heat_wall_gradient(m: usize, t: f64) -> f64 {
        let n = m + 1;
        let h = 1.0 / n as f64;
        let mut v = vec![0.0; m];
        for k in 1..=m {
            let c: f64 = (1..=m).map(|j| (k as f64 * PI * j as f64 / n as f64).sin()).sum::<f64>()
                * 2.0
                / n as f64;
            let lam = -4.0 / (h * h) * (k as f64 * PI / (2.0 * n as f64)).sin().powi(2);
            let decay = (lam * t).exp();
            if decay * c.abs() < 1e-18 {
                continue;
            }
            for (j, vj) in v.iter_mut().enumerate() {
                *vj += c * decay * (k as f64 * PI * (j + 1) as f64 / n as f64).sin();
            }
        }
        (-3.0 * 0.0 + 4.0 * v[0] - v[1]) / (2.0 * h)
    }

    #[test]
    fn wall_gradient_matches_finite_differences() {
        let p = ShearProfile::constant(1.0, 1.0, 1.0, 10_000).unwrap();
        for &t in &[0.01, 0.03] {
            let series = p.evaluate_gradient(t, 0.0);
            assert!(series.reliable);
            let sup = p.gradient_sup_norm(t);
            assert!((sup - series.value.abs()).abs() < 1e-9 * sup);
            let fd = fd_heat_wall_gradient(2000, t);
            assert!(((series.value - fd) / series.value).abs() < 1e-4, "{} {}", series.value, fd);
        }
        assert!(!p.evaluate_gradient(1e-10, 0.0).reliable);
    }

    #[test]
    fn heat_residual_vanishes() {
        let p = ShearProfile::ramped_constant(1.0, 0.2, 1.0, 0.05, 64).unwrap();
        let (t, dt, dy) = (0.3, 1e-4, 1e-3);
        for &y in &[0.1, 0.4, 0.77] {
            let dtv = (p.evaluate(t + dt, y) - p.evaluate(t - dt, y)) / (2.0 * dt);
            let dyy = (p.evaluate(t, y + dy) - 2.0 * p.evaluate(t, y) + p.evaluate(t, y - dy)) / (dy * dy);
            assert!((dtv - 0.05 * dyy).abs() < 1e-4);
            assert!((p.evaluate_time_derivative(t, y) - dtv).abs() < 1e-6);
        }
    }

    #[test]
    fn lipschitz_spot_value() {
        let p = ShearProfile::constant(1.0, 1.0, 1.0, 10_000).unwrap();
        let c = lipschitz_decay_check(&p, 0.01).unwrap();
        assert!((c.rhs - 0.5 * 0.01f64.powf(-0.75)).abs() < 1e-3 * c.rhs);
        assert!((c.rhs - 15.81).abs() < 0.01);
        assert!(c.holds(), "{c:?}");
        assert!(matches!(lipschitz_decay_check(&p, 0.0), Err(Error::Domain(_))));
        let single = ShearProfile::new(vec![1.0], 1.0, 1.0).unwrap();
        let late = lipschitz_decay_check(&single, 5.0).unwrap();
        assert!(late.lhs < 1e-15 * late.rhs);
    }

    #[test]
    fn lipschitz_scales_linearly() {
        let p = ShearProfile::ramped_constant(1.0, 0.1, 1.0, 0.01, 128).unwrap();
        let a = lipschitz_decay_check(&p, 0.5).unwrap();
        let b = lipschitz_decay_check(&p.scaled(-3.0), 0.5).unwrap();
        assert!((b.lhs - 3.0 * a.lhs).abs() < 1e-12 * b.lhs);
        assert!((b.rhs - 3.0 * a.rhs).abs() < 1e-12 * b.rhs);
    }

    #[test]
    fn random_profiles_obey_decay_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = rng.random_range(1..40);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = ShearProfile::new(b, rng.random_range(0.5..2.0), rng.random_range(0.01..1.0)).unwrap();
            for q in 0..20 {
                let t = 10f64.powf(-4.0 + 5.0 * q as f64 / 19.0);
                assert!(lipschitz_decay_check(&p, t).unwrap().holds());
            }
        }
    }

    #[test]
    fn series_spot_values() {
        let s = series_bound_check(1.0).unwrap();
        assert!((s.sum - 0.442_25).abs() < 1e-4 && s.holds() && s.tail <= 1e-15);
        // independent partial sum far past convergence
        let direct: f64 = (1..200).map(|n| (n * n) as f64 * (-((n * n) as f64)).exp()).sum();
        assert!((s.sum - direct).abs() < 1e-15);
        let big = series_bound_check(50.0).unwrap();
        assert!((big.sum - (-50f64).exp()).abs() < 1e-30 && big.holds());
        let small = series_bound_check(0.01).unwrap();
        assert!(small.sum < 1000.0);
        assert!(series_bound_check(0.0).is_err());
        assert!(series_bound_check(-1.0).is_err());
    }

    #[test]
    fn t_star_values_and_scaling() {
        let t = t_star(1.0, 2.0, 0.01).unwrap();
        assert!((t - 3.607e-9).abs() < 1e-12, "{t}");
        assert!((t_star(1.0, 2.0, 0.02).unwrap() / t - 8.0).abs() < 1e-12);
        assert!((t_star(2.0, 2.0, 0.01).unwrap() / t - 0.25).abs() < 1e-12);
        assert!(t_star(0.0, 2.0, 0.01).is_err());
        let s = snap_t_nu(1.0, t).unwrap();
        assert!(!s.degenerate && s.t_nu <= t && s.t_nu >= 0.25 * t);
        assert!((s.t_nu - 0.25f64.powi(s.k as i32)).abs() < 1e-24);
        assert!(l1_linf_integral(s.t_nu, 0.01, 1.0, 2.0) <= 2f64.ln() * (1.0 + 1e-12));
        assert!(snap_t_nu(0.1 * t, t).unwrap().degenerate);
    }

    proptest! {
        #[test]
        fn series_bound_on_log_grid(e in -3.0f64..3.0) {
            let z = 10f64.powf(e);
            let s = series_bound_check(z).unwrap();
            prop_assert!(s.holds() && s.tail <= 1e-15);
        }
    }
}
