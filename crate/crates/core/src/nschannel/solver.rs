use crate::fields::{
    dissipation_norm_sq, gradient, SpaceTimeField, SquareIntegrable, VelocityField, Wall,
};
use crate::{Error, Result};

use super::spectral::{Spectral, Tridiagonal};
use super::trace::{wall_vorticity, BoundaryVorticityTrace};
use super::{EnergyLedger, LedgerRecord, SolverConfig};

// Low-storage RK3 / Crank–Nicolson coefficients (Spalart, Moser & Rogers).
const GAMMA: [f64; 3] = [8.0 / 15.0, 5.0 / 12.0, 3.0 / 4.0];
const ZETA: [f64; 3] = [0.0, -17.0 / 60.0, -5.0 / 12.0];
const ALPHA: [f64; 3] = [4.0 / 15.0, 1.0 / 15.0, 1.0 / 6.0];

/// Result of one time step.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub field: VelocityField,
    pub dt: f64,
    /// `nu int ||grad u||^2 dt` over the step, midpoint rule per stage.
    pub dissipation: f64,
}

/// Data handed to run observers at every sample time.
pub struct Sample<'a> {
    pub t: f64,
    pub step: usize,
    pub field: &'a VelocityField,
    pub kinetic: f64,
    pub dissipation_rate: f64,
    pub cumulative_dissipation: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub ledger: EnergyLedger,
    pub trace: BoundaryVorticityTrace,
    pub final_field: VelocityField,
    pub steps: usize,
    /// `|grad u|^2` at cell centers and sample times, when requested.
    pub density: Option<SpaceTimeField>,
}

/// One solver instance. Advances single-threaded and deterministically.
pub struct ChannelSolver {
    cfg: SolverConfig,
    spectral: Spectral,
    u: VelocityField,
    t: f64,
    steps: usize,
    cumulative: f64,
    record_density: bool,
}

impl ChannelSolver {
    pub fn new(initial: VelocityField, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let g = *initial.grid();
        if !initial.is_finite() {
            return Err(Error::InvalidConfig("initial field is not finite".into()));
        }
        let mut u = initial;
        u.enforce_no_slip();
        Ok(ChannelSolver {
            spectral: Spectral::new(g.nx, g.dx()),
            cfg,
            u,
            t: 0.0,
            steps: 0,
            cumulative: 0.0,
            record_density: false,
        })
    }

    /// Also store the cell-centered dissipation density at every sample.
    pub fn with_density(mut self, on: bool) -> Self {
        self.record_density = on;
        self
    }

    pub fn field(&self) -> &VelocityField {
        &self.u
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Largest stable step for the current field.
    pub fn cfl_dt(&self) -> f64 {
        cfl_dt(&self.u, &self.cfg)
    }

    /// Advance by exactly `dt`, split into CFL-admissible sub-steps.
    pub fn advance(&mut self, dt: f64) -> Result<f64> {
        let limit = self.cfl_dt();
        let n = if limit.is_finite() { (dt / limit).ceil().max(1.0) as usize } else { 1 };
        let h = dt / n as f64;
        let mut diss = 0.0;
        for _ in 0..n {
            diss += self.raw_step(h)?;
        }
        Ok(diss)
    }

    fn raw_step(&mut self, dt: f64) -> Result<f64> {
        let (next, diss) = rk3_step(&self.spectral, &self.u, self.cfg.nu, dt);
        self.steps += 1;
        if !next.is_finite() || !diss.is_finite() {
            return Err(Error::BlowUp {
                step: self.steps,
                time: self.t + dt,
            });
        }
        self.u = next;
        self.t += dt;
        self.cumulative += diss;
        Ok(diss)
    }

    /// Run to `t_end`, sampling either every `output_stride` steps or on the
    /// `sample_dt` grid (the final time is always sampled).
    pub fn run(mut self, mut observer: impl FnMut(&Sample) -> Result<()>) -> Result<RunOutput> {
        let g = *self.u.grid();
        let mut ledger = EnergyLedger::default();
        let mut trace = BoundaryVorticityTrace::new(g);
        let mut density = self.record_density.then(|| SpaceTimeField::empty(g));
        let t_end = self.cfg.t_end;
        let mut next_sample = 1usize;
        let mut since = 0usize;
        self.record(&mut ledger, &mut trace, density.as_mut(), &mut observer)?;
        while self.t < t_end * (1.0 - 1e-14) {
            let target = match self.cfg.sample_dt {
                Some(s) => (next_sample as f64 * s).min(t_end),
                None => t_end,
            };
            let mut dt = cfl_dt(&self.u, &self.cfg);
            if !dt.is_finite() {
                dt = target - self.t;
            }
            let remaining = target - self.t;
            let lands = dt >= remaining * (1.0 - 1e-9);
            if lands {
                dt = remaining;
            }
            self.raw_step(dt)?;
            if lands {
                self.t = target;
            }
            since += 1;
            let sample = match self.cfg.sample_dt {
                Some(_) => lands,
                None => since >= self.cfg.output_stride || self.t >= t_end * (1.0 - 1e-14),
            };
            if sample {
                if lands {
                    next_sample += 1;
                }
                since = 0;
                self.record(&mut ledger, &mut trace, density.as_mut(), &mut observer)?;
            }
        }
        Ok(RunOutput {
            ledger,
            trace,
            final_field: self.u,
            steps: self.steps,
            density,
        })
    }

    fn record(
        &self,
        ledger: &mut EnergyLedger,
        trace: &mut BoundaryVorticityTrace,
        density: Option<&mut SpaceTimeField>,
        observer: &mut impl FnMut(&Sample) -> Result<()>,
    ) -> Result<()> {
        let kinetic = 0.5 * self.u.l2_norm_sq();
        let rate = self.cfg.nu * dissipation_norm_sq(&self.u);
        ledger.push(LedgerRecord {
            t: self.t,
            kinetic,
            dissipation_rate: rate,
            cumulative_dissipation: self.cumulative,
        });
        trace.push(
            self.t,
            wall_vorticity(&self.u, Wall::Bottom),
            wall_vorticity(&self.u, Wall::Top),
        )?;
        if let Some(d) = density {
            d.push(self.t, &gradient(&self.u).frobenius_sq())?;
        }
        observer(&Sample {
            t: self.t,
            step: self.steps,
            field: &self.u,
            kinetic,
            dissipation_rate: rate,
            cumulative_dissipation: self.cumulative,
        })
    }
}

fn cfl_dt(u: &VelocityField, cfg: &SolverConfig) -> f64 {
    let g = u.grid();
    let (a, b) = u.max_abs();
    let rate = a / g.dx() + b / g.dy();
    let dt = if rate > 0.0 { cfg.cfl / rate } else { f64::INFINITY };
    match cfg.dt_max {
        Some(m) => dt.min(m),
        None => dt,
    }
}

/// One step from `u` with the CFL step size (capped by `dt_max` and by
/// `t_end`).
pub fn step(u: &VelocityField, cfg: &SolverConfig) -> Result<StepReport> {
    cfg.validate()?;
    let g = u.grid();
    let mut dt = cfl_dt(u, cfg);
    if !dt.is_finite() {
        dt = cfg.t_end;
    }
    let dt = dt.min(cfg.t_end);
    let spectral = Spectral::new(g.nx, g.dx());
    let mut start = u.clone();
    start.enforce_no_slip();
    let (field, dissipation) = rk3_step(&spectral, &start, cfg.nu, dt);
    if !field.is_finite() {
        return Err(Error::BlowUp { step: 1, time: dt });
    }
    Ok(StepReport {
        field,
        dt,
        dissipation,
    })
}

/// Discrete Leray projection: subtract the face gradient of the solution of
/// the Neumann Poisson problem `div grad phi = div u`.
pub fn project(u: &VelocityField) -> VelocityField {
    let g = u.grid();
    let spectral = Spectral::new(g.nx, g.dx());
    let mut out = u.clone();
    project_in_place(&spectral, &mut out);
    out
}

fn project_in_place(spectral: &Spectral, u: &mut VelocityField) {
    let g = *u.grid();
    let (nx, ny, dx, dy) = (g.nx, g.ny, g.dx(), g.dy());
    let mut phi = crate::fields::divergence(u).into_vec();
    let inv = 1.0 / (dy * dy);
    spectral.solve(&mut phi, ny, true, |_, lam, j| {
        let below = if j > 0 { inv } else { 0.0 };
        let above = if j + 1 < ny { inv } else { 0.0 };
        Tridiagonal {
            lower: below,
            diag: lam - below - above,
            upper: above,
        }
    });
    let u1 = u.u1_mut();
    for j in 0..ny {
        for i in 0..nx {
            u1[j * nx + i] -= (phi[j * nx + i] - phi[j * nx + (i + nx - 1) % nx]) / dx;
        }
    }
    let u2 = u.u2_mut();
    for j in 1..ny {
        for i in 0..nx {
            u2[j * nx + i] -= (phi[j * nx + i] - phi[(j - 1) * nx + i]) / dy;
        }
    }
}

/// Energy-conserving divergence-form advection `-div(u u)` on the staggered
/// grid (second-order interpolations), for fields with zero wall values.
/// Returns the `u1` tendency and the `u2` tendency with zero wall rows.
fn advection(u: &VelocityField) -> (Vec<f64>, Vec<f64>) {
    let g = u.grid();
    let (nx, ny, dx, dy) = (g.nx, g.ny, g.dx(), g.dy());
    let u1 = u.u1();
    let u2 = u.u2();
    let ip = |i: usize| if i + 1 == nx { 0 } else { i + 1 };
    let im = |i: usize| if i == 0 { nx - 1 } else { i - 1 };
    // (avg_x u1)^2 at cell centers
    let mut cxx = vec![0.0; ny * nx];
    // (avg_y u2)^2 at cell centers
    let mut cyy = vec![0.0; ny * nx];
    for j in 0..ny {
        for i in 0..nx {
            let a = 0.5 * (u1[j * nx + i] + u1[j * nx + ip(i)]);
            cxx[j * nx + i] = a * a;
            let b = 0.5 * (u2[j * nx + i] + u2[(j + 1) * nx + i]);
            cyy[j * nx + i] = b * b;
        }
    }
    // avg_x u2 * avg_y u1 at cell corners (i dx, j dy)
    let mut cxy = vec![0.0; (ny + 1) * nx];
    for j in 1..ny {
        for i in 0..nx {
            let a = 0.5 * (u2[j * nx + im(i)] + u2[j * nx + i]);
            let b = 0.5 * (u1[(j - 1) * nx + i] + u1[j * nx + i]);
            cxy[j * nx + i] = a * b;
        }
    }
    let mut n1 = vec![0.0; ny * nx];
    for j in 0..ny {
        for i in 0..nx {
            let n = j * nx + i;
            n1[n] = -((cxx[n] - cxx[j * nx + im(i)]) / dx + (cxy[n + nx] - cxy[n]) / dy);
        }
    }
    let mut n2 = vec![0.0; (ny + 1) * nx];
    for j in 1..ny {
        for i in 0..nx {
            let n = j * nx + i;
            n2[n] = -((cxy[j * nx + ip(i)] - cxy[n]) / dx + (cyy[n] - cyy[n - nx]) / dy);
        }
    }
    (n1, n2)
}

/// Vector Laplacian with no-slip walls: linear ghost `-u1` for `u1`,
/// Dirichlet rows for `u2`.
fn laplacian(u: &VelocityField) -> (Vec<f64>, Vec<f64>) {
    let g = u.grid();
    let (nx, ny, dx, dy) = (g.nx, g.ny, g.dx(), g.dy());
    let (ix, iy) = (1.0 / (dx * dx), 1.0 / (dy * dy));
    let u1 = u.u1();
    let u2 = u.u2();
    let ip = |i: usize| if i + 1 == nx { 0 } else { i + 1 };
    let im = |i: usize| if i == 0 { nx - 1 } else { i - 1 };
    let mut l1 = vec![0.0; ny * nx];
    for j in 0..ny {
        for i in 0..nx {
            let n = j * nx + i;
            let c = u1[n];
            let below = if j == 0 { -c } else { u1[n - nx] };
            let above = if j + 1 == ny { -c } else { u1[n + nx] };
            l1[n] = (u1[j * nx + ip(i)] - 2.0 * c + u1[j * nx + im(i)]) * ix + (above - 2.0 * c + below) * iy;
        }
    }
    let mut l2 = vec![0.0; (ny + 1) * nx];
    for j in 1..ny {
        for i in 0..nx {
            let n = j * nx + i;
            let c = u2[n];
            l2[n] = (u2[j * nx + ip(i)] - 2.0 * c + u2[j * nx + im(i)]) * ix + (u2[n + nx] - 2.0 * c + u2[n - nx]) * iy;
        }
    }
    (l1, l2)
}

/// Three IMEX stages, each ending with a projection. Returns the new field
/// and the viscous dissipation over the step.
fn rk3_step(spectral: &Spectral, u0: &VelocityField, nu: f64, dt: f64) -> (VelocityField, f64) {
    let g = *u0.grid();
    let (nx, ny, dy) = (g.nx, g.ny, g.dy());
    let iy = 1.0 / (dy * dy);
    let mut u = u0.clone();
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut diss = 0.0;
    for s in 0..3 {
        let (n1, n2) = advection(&u);
        let (l1, l2) = laplacian(&u);
        let a = ALPHA[s] * dt * nu;
        let mut w = u.clone();
        {
            let w1 = w.u1_mut();
            for n in 0..ny * nx {
                let old = prev.as_ref().map_or(0.0, |p| p.0[n]);
                w1[n] = u.u1()[n] + a * l1[n] + dt * (GAMMA[s] * n1[n] + ZETA[s] * old);
            }
            spectral.solve(w1, ny, false, |_, lam, j| {
                let wall = j == 0 || j + 1 == ny;
                Tridiagonal {
                    lower: -a * iy,
                    diag: 1.0 - a * (lam - if wall { 3.0 } else { 2.0 } * iy),
                    upper: -a * iy,
                }
            });
        }
        {
            let w2 = w.u2_mut();
            for n in nx..ny * nx {
                let old = prev.as_ref().map_or(0.0, |p| p.1[n]);
                w2[n] = u.u2()[n] + a * l2[n] + dt * (GAMMA[s] * n2[n] + ZETA[s] * old);
            }
            spectral.solve(&mut w2[nx..ny * nx], ny - 1, false, |_, lam, _| Tridiagonal {
                lower: -a * iy,
                diag: 1.0 - a * (lam - 2.0 * iy),
                upper: -a * iy,
            });
        }
        // (I - aL) w = (I + aL) u + dt N  gives
        // 1/2 |w|^2 - 1/2 |u|^2 = -2 a |grad (u + w)/2|^2 + advective work
        let mid = u.add(&w).expect("same grid").scale(0.5);
        diss += 2.0 * a * dissipation_norm_sq(&mid);
        project_in_place(spectral, &mut w);
        prev = Some((n1, n2));
        u = w;
    }
    (u, diss)
}
