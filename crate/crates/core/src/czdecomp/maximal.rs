use crate::fields::Grid;
use crate::par::Exec;
use crate::{Error, Result};

use super::lorentz::weak_lorentz;

/// A nonnegative density on `(0, T) x Omega`, constant on uniform
/// space-time cells, stored as `data[(k * ny + j) * nx + i]`, and extended
/// by zero for `t` outside `(0, T)` and `y` outside `(0, H)`; periodic in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellDensity {
    grid: Grid,
    span: f64,
    nt: usize,
    data: Vec<f64>,
    /// `(nt + 1) x (ny + 1) x (nx + 1)` corner values of the cumulative
    /// integral from the origin.
    table: Vec<f64>,
}

impl CellDensity {
    pub fn new(grid: Grid, span: f64, nt: usize, data: Vec<f64>) -> Result<Self> {
        if !(span > 0.0) || nt == 0 {
            return Err(Error::InvalidConfig("time span and cell count must be positive".into()));
        }
        if data.len() != nt * grid.nx * grid.ny {
            return Err(Error::Shape(format!(
                "{} samples for {nt} x {} x {} cells",
                data.len(),
                grid.ny,
                grid.nx
            )));
        }
        let (nx, ny) = (grid.nx, grid.ny);
        let vol = span / nt as f64 * grid.cell_area();
        let (sx, sy) = (nx + 1, (nx + 1) * (ny + 1));
        let mut table = vec![0.0; sy * (nt + 1)];
        for k in 0..nt {
            for j in 0..ny {
                for i in 0..nx {
                    let c = data[(k * ny + j) * nx + i].abs() * vol;
                    let idx = (k + 1) * sy + (j + 1) * sx + i + 1;
                    table[idx] = c + table[idx - 1] + table[idx - sx] + table[idx - sy]
                        - table[idx - 1 - sx]
                        - table[idx - 1 - sy]
                        - table[idx - sx - sy]
                        + table[idx - 1 - sx - sy];
                }
            }
        }
        Ok(CellDensity {
            grid,
            span,
            nt,
            data,
            table,
        })
    }

    /// Cell averages approximated by the value at cell centers.
    pub fn from_fn(grid: Grid, span: f64, nt: usize, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        let dt = span / nt as f64;
        let mut data = Vec::with_capacity(nt * grid.nx * grid.ny);
        for k in 0..nt {
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    data.push(f((k as f64 + 0.5) * dt, grid.x_center(i), grid.y_center(j)));
                }
            }
        }
        CellDensity::new(grid, span, nt, data)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        self.span / self.nt as f64
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn cell_volume(&self) -> f64 {
        self.dt() * self.grid.cell_area()
    }

    /// `||f||_{L^1((0,T) x Omega)}`
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum::<f64>() * self.cell_volume()
    }

    fn cumulative(&self, t: f64, x: f64, y: f64) -> f64 {
        let (nx, ny, nt) = (self.grid.nx, self.grid.ny, self.nt);
        let ft = (t / self.dt()).clamp(0.0, nt as f64);
        let fx = (x / self.grid.dx()).clamp(0.0, nx as f64);
        let fy = (y / self.grid.dy()).clamp(0.0, ny as f64);
        let k = (ft.floor() as usize).min(nt - 1);
        let i = (fx.floor() as usize).min(nx - 1);
        let j = (fy.floor() as usize).min(ny - 1);
        let (a, b, c) = (fx - i as f64, fy - j as f64, ft - k as f64);
        let (sx, sy) = (nx + 1, (nx + 1) * (ny + 1));
        let at = |kk: usize, jj: usize, ii: usize| self.table[kk * sy + jj * sx + ii];
        let mut acc = 0.0;
        for (dk, wk) in [(0, 1.0 - c), (1, c)] {
            for (dj, wj) in [(0, 1.0 - b), (1, b)] {
                for (di, wi) in [(0, 1.0 - a), (1, a)] {
                    acc += wk * wj * wi * at(k + dk, j + dj, i + di);
                }
            }
        }
        acc
    }

    fn cumulative_periodic(&self, t: f64, x: f64, y: f64) -> f64 {
        let w = self.grid.width();
        let turns = (x / w).floor();
        turns * self.cumulative(t, w, y) + self.cumulative(t, x - turns * w, y)
    }

    /// `int |f|` over `(t0, t1) x (x0, x1) x (y0, y1)` of the extended density.
    pub fn box_integral(&self, t0: f64, t1: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        let (t0, t1) = (t0.clamp(0.0, self.span), t1.clamp(0.0, self.span));
        let h = self.grid.height();
        let (y0, y1) = (y0.clamp(0.0, h), y1.clamp(0.0, h));
        if t1 <= t0 || y1 <= y0 || x1 <= x0 {
            return 0.0;
        }
        let f = |t: f64, x: f64, y: f64| self.cumulative_periodic(t, x, y);
        f(t1, x1, y1) - f(t0, x1, y1) - f(t1, x0, y1) - f(t1, x1, y0) + f(t0, x0, y1) + f(t0, x1, y0) + f(t1, x0, y0)
            - f(t0, x0, y0)
    }

    /// Mean of `|f|` over the parabolic cylinder
    /// `(t - r^2, t + r^2) x B_r(x, y)` with `B_r` the sup-norm box.
    pub fn cylinder_mean(&self, t: f64, x: f64, y: f64, r: f64) -> f64 {
        let mass = self.box_integral(t - r * r, t + r * r, x - r, x + r, y - r, y + r);
        mass / (2.0 * r * r * 4.0 * r * r)
    }
}

/// Dyadic radii `r_max 2^-j`, `j = 0..levels`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiiPolicy {
    pub r_max: f64,
    pub levels: usize,
}

impl RadiiPolicy {
    /// From the size of the whole domain down to half the smallest cell
    /// scale (`sqrt(dt)`, `dx`, `dy`).
    pub fn for_density(f: &CellDensity) -> Self {
        let g = f.grid();
        let r_max = f.span().sqrt().max(g.width()).max(g.height());
        let r_min = 0.5 * f.dt().sqrt().min(g.dx()).min(g.dy());
        let levels = ((r_max / r_min).log2().ceil() as usize).max(0) + 1;
        RadiiPolicy { r_max, levels }
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.levels).map(move |j| self.r_max * 0.5f64.powi(j as i32))
    }
}

/// Parabolic maximal function over dyadic radii only. Any cylinder of
/// radius `r` sits inside the dyadic one of radius `< 2r`, whose measure is
/// at most `2^(d+2)` times larger, so the true supremum is at most
/// `2^(d+2)` times this value (with the radius range covering all scales).
pub fn parabolic_maximal(f: &CellDensity, t: f64, x: f64, y: f64, radii: &RadiiPolicy) -> f64 {
    radii.radii().map(|r| f.cylinder_mean(t, x, y, r)).fold(0.0, f64::max)
}

/// `Mf` at every cell center.
pub fn maximal_field(f: &CellDensity, radii: &RadiiPolicy, exec: Exec) -> Vec<f64> {
    let g = *f.grid();
    let (nx, ny) = (g.nx, g.ny);
    let dt = f.dt();
    exec.map_range(f.nt() * nx * ny, |idx| {
        let i = idx % nx;
        let j = (idx / nx) % ny;
        let k = idx / (nx * ny);
        parabolic_maximal(f, (k as f64 + 0.5) * dt, g.x_center(i), g.y_center(j), radii)
    })
}

/// Both sides of the weak-(1,1) inequality `||Mf||_{L^{1,inf}} <= C_d ||f||_{L^1}`,
/// with the weak norm taken over `(0, T) x Omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakTypeCheck {
    pub weak_norm: f64,
    pub l1_norm: f64,
}

impl WeakTypeCheck {
    pub fn ratio(&self) -> f64 {
        if self.l1_norm > 0.0 {
            self.weak_norm / self.l1_norm
        } else {
            0.0
        }
    }
}

pub fn weak_type_check(f: &CellDensity, exec: Exec) -> Result<WeakTypeCheck> {
    let radii = RadiiPolicy::for_density(f);
    let m = maximal_field(f, &radii, exec);
    let measures = vec![f.cell_volume(); m.len()];
    let report = weak_lorentz(&m, &measures, 1.0)?;
    Ok(WeakTypeCheck {
        weak_norm: report.value,
        l1_norm: f.l1_norm(),
    })
}
