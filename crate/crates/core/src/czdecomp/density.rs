use crate::fields::{Grid, SpaceTimeField};
use crate::{Error, Result};

use super::partition::Window;

/// Minimum samples per axis inside a window before an average over it is
/// trusted.
pub const MIN_SAMPLES: usize = 8;

/// Integral of the piecewise-linear interpolant of `value(k)` at `times`
/// over `[a, b]`, which must lie inside the sampled span.
pub(crate) fn interval_integral(times: &[f64], a: f64, b: f64, value: impl Fn(usize) -> f64) -> Result<f64> {
    let (first, last) = match (times.first(), times.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(Error::InsufficientData("no samples".into())),
    };
    let tol = 1e-12 * (last - first).abs().max(1.0);
    if a < first - tol || b > last + tol || b < a {
        return Err(Error::Range(format!(
            "interval [{a}, {b}] is not inside the sampled span [{first}, {last}]"
        )));
    }
    let (a, b) = (a.max(first), b.min(last));
    if times.len() == 1 || b == a {
        return Ok(0.0);
    }
    let at = |t: f64| -> f64 {
        let k = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1);
        let (t0, t1) = (times[k - 1], times[k]);
        let s = (t - t0) / (t1 - t0);
        (1.0 - s) * value(k - 1) + s * value(k)
    };
    let lo = times.partition_point(|&t| t <= a);
    let hi = times.partition_point(|&t| t < b);
    let mut prev_t = a;
    let mut prev_v = at(a);
    let mut acc = 0.0;
    for k in lo..hi.max(lo) {
        let v = value(k);
        acc += 0.5 * (times[k] - prev_t) * (v + prev_v);
        prev_t = times[k];
        prev_v = v;
    }
    acc += 0.5 * (b - prev_t) * (at(b) + prev_v);
    Ok(acc)
}

/// Exact integrals of a cell-centered space-time density over boxes, with
/// the density piecewise constant in space (periodic in `x`) and piecewise
/// linear in time.
#[derive(Clone, Debug)]
pub struct DensityIntegrator<'a> {
    field: &'a SpaceTimeField,
    /// Per frame, `(ny + 1) x (nx + 1)` corner values of
    /// `F(x, y) = int_0^x int_0^y f`.
    tables: Vec<f64>,
}

impl<'a> DensityIntegrator<'a> {
    pub fn new(field: &'a SpaceTimeField) -> Self {
        let g = field.grid();
        let (nx, ny) = (g.nx, g.ny);
        let area = g.cell_area();
        let stride = (nx + 1) * (ny + 1);
        let mut tables = vec![0.0; stride * field.nt()];
        for k in 0..field.nt() {
            let frame = field.frame(k);
            let table = &mut tables[k * stride..(k + 1) * stride];
            for j in 0..ny {
                let mut row = 0.0;
                for i in 0..nx {
                    row += frame[j * nx + i] * area;
                    table[(j + 1) * (nx + 1) + i + 1] = table[j * (nx + 1) + i + 1] + row;
                }
            }
        }
        DensityIntegrator { field, tables }
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn times(&self) -> &[f64] {
        self.field.times()
    }

    /// `F(x, y)` for `0 <= x <= W`, `0 <= y <= H` by bilinear interpolation
    /// of the corner table, which is exact for cellwise constant data.
    fn cumulative(&self, k: usize, x: f64, y: f64) -> f64 {
        let g = self.field.grid();
        let (nx, ny) = (g.nx, g.ny);
        let stride = (nx + 1) * (ny + 1);
        let table = &self.tables[k * stride..(k + 1) * stride];
        let fx = (x / g.dx()).clamp(0.0, nx as f64);
        let fy = (y / g.dy()).clamp(0.0, ny as f64);
        let i = (fx.floor() as usize).min(nx - 1);
        let j = (fy.floor() as usize).min(ny - 1);
        let (a, b) = (fx - i as f64, fy - j as f64);
        let c = |jj: usize, ii: usize| table[jj * (nx + 1) + ii];
        (1.0 - a) * (1.0 - b) * c(j, i) + a * (1.0 - b) * c(j, i + 1) + (1.0 - a) * b * c(j + 1, i) + a * b * c(j + 1, i + 1)
    }

    /// `F` extended to all `x` by periodicity of the density.
    fn cumulative_periodic(&self, k: usize, x: f64, y: f64) -> f64 {
        let w = self.field.grid().width();
        let turns = (x / w).floor();
        let r = x - turns * w;
        turns * self.cumulative(k, w, y) + self.cumulative(k, r, y)
    }

    /// `int int f(t_k)` over `(x0, x1) x (y0, y1)`, with `y` clamped to the
    /// channel (zero extension).
    pub fn space_integral(&self, k: usize, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        let h = self.field.grid().height();
        let (y0, y1) = (y0.clamp(0.0, h), y1.clamp(0.0, h));
        if y1 <= y0 || x1 <= x0 {
            return 0.0;
        }
        self.cumulative_periodic(k, x1, y1) - self.cumulative_periodic(k, x0, y1) - self.cumulative_periodic(k, x1, y0)
            + self.cumulative_periodic(k, x0, y0)
    }

    /// Fails unless the window holds at least `MIN_SAMPLES` sample times and
    /// cells per spatial axis.
    pub fn check_resolution(&self, win: &Window) -> Result<()> {
        let g = self.field.grid();
        let times = self.field.times();
        let tol = 1e-9 * (win.t1 - win.t0).abs();
        let lo = times.partition_point(|&t| t < win.t0 - tol);
        let hi = times.partition_point(|&t| t <= win.t1 + tol);
        let nt = hi.saturating_sub(lo);
        let nx = (win.x1 - win.x0) / g.dx();
        let ny = (win.y1 - win.y0) / g.dy();
        let need = MIN_SAMPLES as f64 - 1e-9;
        if nt < MIN_SAMPLES || nx < need || ny < need {
            return Err(Error::Resolution(format!(
                "window t in ({}, {}), x in ({}, {}), y in ({}, {}) holds {nt} times, {nx:.2} x {ny:.2} cells; need {MIN_SAMPLES} per axis",
                win.t0, win.t1, win.x0, win.x1, win.y0, win.y1
            )));
        }
        Ok(())
    }

    /// `int_W f`, without a resolution check.
    pub fn integral(&self, win: &Window) -> Result<f64> {
        interval_integral(self.field.times(), win.t0, win.t1, |k| {
            self.space_integral(k, win.x0, win.x1, win.y0, win.y1)
        })
    }

    /// Mean of `f` over the window, after the resolution check.
    pub fn average(&self, win: &Window) -> Result<f64> {
        self.check_resolution(win)?;
        let vol = win.volume();
        if vol <= 0.0 {
            return Err(Error::Range("empty window".into()));
        }
        Ok(self.integral(win)? / vol)
    }
}
