use crate::fields::{wall_normal_derivative, Grid, VelocityField, Wall};
use crate::{Error, Result};

/// Vector-valued samples at strictly increasing times.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} times but {} sample rows",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("sample times must be strictly increasing".into()));
        }
        if let Some(first) = values.first() {
            if values.iter().any(|v| v.len() != first.len()) {
                return Err(Error::Shape("sample rows differ in length".into()));
            }
        }
        Ok(TimeSeries { times, values })
    }

    pub fn push(&mut self, t: f64, row: Vec<f64>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::InvalidConfig(format!("sample time {t} does not follow {last}")));
            }
            if row.len() != self.values[0].len() {
                return Err(Error::Shape("sample rows differ in length".into()));
            }
        }
        self.times.push(t);
        self.values.push(row);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn width(&self) -> usize {
        self.values.first().map_or(0, |v| v.len())
    }

    pub fn span(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Number of stored samples with `a <= t <= b`.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        let lo = self.times.partition_point(|&t| t < a);
        let hi = self.times.partition_point(|&t| t <= b);
        hi.saturating_sub(lo)
    }

    /// Linear interpolation of component `c` at time `t` inside the span.
    fn value_at(&self, c: usize, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.values[0][c];
        }
        if k == self.times.len() {
            return self.values[k - 1][c];
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let s = (t - t0) / (t1 - t0);
        (1.0 - s) * self.values[k - 1][c] + s * self.values[k][c]
    }

    /// `int_a^b f dt` per component: trapezoid rule over the stored samples,
    /// with linearly interpolated end values.
    pub fn integrate(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let (first, last) = match (self.times.first(), self.times.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(Error::InsufficientData("empty time series".into())),
        };
        let tol = 1e-12 * (last - first).abs().max(1.0);
        if a < first - tol || b > last + tol || b < a {
            return Err(Error::Range(format!(
                "interval [{a}, {b}] is not inside the sampled span [{first}, {last}]"
            )));
        }
        let (a, b) = (a.max(first), b.min(last));
        let lo = self.times.partition_point(|&t| t <= a);
        let hi = self.times.partition_point(|&t| t < b);
        let mut nodes = Vec::with_capacity(hi.saturating_sub(lo) + 2);
        nodes.push(a);
        nodes.extend_from_slice(&self.times[lo..hi.max(lo)]);
        nodes.push(b);
        let width = self.width();
        let mut out = vec![0.0; width];
        for c in 0..width {
            let mut prev_t = nodes[0];
            let mut prev_v = self.value_at(c, prev_t);
            let mut acc = 0.0;
            for (idx, &t) in nodes.iter().enumerate().skip(1) {
                let v = if idx < nodes.len() - 1 {
                    self.values[lo + idx - 1][c]
                } else {
                    self.value_at(c, t)
                };
                acc += 0.5 * (t - prev_t) * (v + prev_v);
                prev_t = t;
                prev_v = v;
            }
            out[c] = acc;
        }
        Ok(out)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> TimeSeries {
        TimeSeries {
            times: self.times.clone(),
            values: self.values.iter().map(|r| r.iter().map(|&v| f(v)).collect()).collect(),
        }
    }

    pub fn map_times(&self, f: impl Fn(f64) -> f64) -> TimeSeries {
        TimeSeries {
            times: self.times.iter().map(|&t| f(t)).collect(),
            values: self.values.clone(),
        }
    }
}

/// Wall vorticity at the `x` faces, `omega = -d u1 / d y` on both walls.
pub fn wall_vorticity(u: &VelocityField, wall: Wall) -> Vec<f64> {
    wall_normal_derivative(u, wall).into_iter().map(|d| -d).collect()
}

/// Sliding average `(1/w) int_{t-w}^t f(s) ds`, evaluated at every stored
/// sample time `t >= t_0 + w`.
pub fn time_mollify(series: &TimeSeries, window: f64) -> Result<TimeSeries> {
    if !(window > 0.0) {
        return Err(Error::InvalidWindow(format!("window must be positive, got {window}")));
    }
    if series.is_empty() || window > series.span() * (1.0 + 1e-12) {
        return Err(Error::InvalidWindow(format!(
            "window {window} exceeds the trace span {}",
            series.span()
        )));
    }
    let start = series.times[0] + window;
    let mut out = TimeSeries::default();
    for &t in &series.times {
        if t < start * (1.0 - 1e-14) - 1e-300 {
            continue;
        }
        let avg = series.integrate(t - window, t)?.into_iter().map(|v| v / window).collect();
        out.push(t, avg)?;
    }
    Ok(out)
}

/// Wall vorticity samples on both walls, at the `x` faces `i dx` of `grid`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryVorticityTrace {
    pub grid: Grid,
    pub walls: [TimeSeries; 2],
}

impl BoundaryVorticityTrace {
    pub fn new(grid: Grid) -> Self {
        BoundaryVorticityTrace {
            grid,
            walls: [TimeSeries::default(), TimeSeries::default()],
        }
    }

    pub fn push(&mut self, t: f64, bottom: Vec<f64>, top: Vec<f64>) -> Result<()> {
        if bottom.len() != self.grid.nx || top.len() != self.grid.nx {
            return Err(Error::Shape(format!("wall rows must have {} samples", self.grid.nx)));
        }
        self.walls[0].push(t, bottom)?;
        self.walls[1].push(t, top)
    }

    pub fn wall(&self, wall: Wall) -> &TimeSeries {
        &self.walls[wall.index()]
    }

    pub fn times(&self) -> &[f64] {
        self.walls[0].times()
    }

    /// Long-format CSV with header `t,wall,x,omega`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,wall,x,omega\n");
        for (k, &t) in self.times().iter().enumerate() {
            for wall in Wall::BOTH {
                for (i, v) in self.wall(wall).values()[k].iter().enumerate() {
                    s.push_str(&format!("{t},{},{},{v}\n", wall.name(), self.grid.x_face(i)));
                }
            }
        }
        s
    }

    /// Inverse of [`to_csv`](Self::to_csv) for a known grid.
    pub fn from_csv(grid: Grid, text: &str) -> Result<Self> {
        let mut rows: Vec<(f64, usize, usize, f64)> = Vec::new();
        let dx = grid.dx();
        for (n, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            let bad = || Error::Shape(format!("malformed trace line {}: `{line}`", n + 1));
            if parts.len() != 4 {
                return Err(bad());
            }
            let t: f64 = parts[0].parse().map_err(|_| bad())?;
            let w = match parts[1] {
                "bottom" => 0,
                "top" => 1,
                _ => return Err(bad()),
            };
            let x: f64 = parts[2].parse().map_err(|_| bad())?;
            let v: f64 = parts[3].parse().map_err(|_| bad())?;
            let i = (x / dx).round() as usize;
            if i >= grid.nx {
                return Err(bad());
            }
            rows.push((t, w, i, v));
        }
        let mut trace = BoundaryVorticityTrace::new(grid);
        let mut k = 0;
        while k < rows.len() {
            let t = rows[k].0;
            let mut walls = [vec![f64::NAN; grid.nx], vec![f64::NAN; grid.nx]];
            while k < rows.len() && rows[k].0 == t {
                walls[rows[k].1][rows[k].2] = rows[k].3;
                k += 1;
            }
            if walls.iter().flatten().any(|v| v.is_nan()) {
                return Err(Error::Shape(format!("trace at t = {t} is incomplete")));
            }
            let [b, tp] = walls;
            trace.push(t, b, tp)?;
        }
        Ok(trace)
    }
}
