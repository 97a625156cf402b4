use crate::{Error, Result};

use super::{Grid, Wall};

/// Staggered (marker-and-cell) velocity on a periodic channel.
///
/// * `u1[j * nx + i]` is the `x` velocity at the `x` face `(i dx, (j + 1/2) dy)`,
///   `0 <= i < nx`, `0 <= j < ny`.
/// * `u2[j * nx + i]` is the `y` velocity at the `y` face `((i + 1/2) dx, j dy)`,
///   `0 <= j <= ny`; rows `0` and `ny` lie on the walls.
/// * `wall_u1[w][i]` is the tangential velocity on wall `w` at `x = i dx`. It
///   feeds the ghost values `2 w - u1` used by wall stencils and is zero for
///   no-slip data.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    grid: Grid,
    u1: Vec<f64>,
    u2: Vec<f64>,
    wall_u1: [Vec<f64>; 2],
}

impl VelocityField {
    pub fn zeros(grid: Grid) -> Self {
        VelocityField {
            u1: vec![0.0; grid.nx * grid.ny],
            u2: vec![0.0; grid.nx * (grid.ny + 1)],
            wall_u1: [vec![0.0; grid.nx], vec![0.0; grid.nx]],
            grid,
        }
    }

    /// Build from raw arrays; wall tangential values default to zero.
    pub fn from_parts(grid: Grid, u1: Vec<f64>, u2: Vec<f64>) -> Result<Self> {
        if u1.len() != grid.nx * grid.ny {
            return Err(Error::Shape(format!(
                "u1 has {} samples, grid needs {}",
                u1.len(),
                grid.nx * grid.ny
            )));
        }
        if u2.len() != grid.nx * (grid.ny + 1) {
            return Err(Error::Shape(format!(
                "u2 has {} samples, grid needs {}",
                u2.len(),
                grid.nx * (grid.ny + 1)
            )));
        }
        Ok(VelocityField {
            u1,
            u2,
            wall_u1: [vec![0.0; grid.nx], vec![0.0; grid.nx]],
            grid,
        })
    }

    /// Sample `(f1, f2)` at the face centers; wall tangential values are
    /// sampled from `f1` on the walls.
    pub fn from_fn(grid: Grid, f1: impl Fn(f64, f64) -> f64, f2: impl Fn(f64, f64) -> f64) -> Self {
        let (nx, ny) = (grid.nx, grid.ny);
        let mut u = VelocityField::zeros(grid);
        for j in 0..ny {
            for i in 0..nx {
                u.u1[j * nx + i] = f1(grid.x_face(i), grid.y_center(j));
            }
        }
        for j in 0..=ny {
            for i in 0..nx {
                u.u2[j * nx + i] = f2(grid.x_center(i), grid.y_face(j));
            }
        }
        for i in 0..nx {
            u.wall_u1[0][i] = f1(grid.x_face(i), 0.0);
            u.wall_u1[1][i] = f1(grid.x_face(i), grid.height());
        }
        u
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn u1(&self) -> &[f64] {
        &self.u1
    }

    pub fn u2(&self) -> &[f64] {
        &self.u2
    }

    pub fn u1_mut(&mut self) -> &mut [f64] {
        &mut self.u1
    }

    pub fn u2_mut(&mut self) -> &mut [f64] {
        &mut self.u2
    }

    pub fn u1_at(&self, i: usize, j: usize) -> f64 {
        self.u1[j * self.grid.nx + i]
    }

    pub fn u2_at(&self, i: usize, j: usize) -> f64 {
        self.u2[j * self.grid.nx + i]
    }

    pub fn wall_tangential(&self, wall: Wall) -> &[f64] {
        &self.wall_u1[wall.index()]
    }

    pub fn set_wall_tangential(&mut self, wall: Wall, values: Vec<f64>) -> Result<()> {
        if values.len() != self.grid.nx {
            return Err(Error::Shape(format!(
                "wall row has {} samples, grid needs {}",
                values.len(),
                self.grid.nx
            )));
        }
        self.wall_u1[wall.index()] = values;
        Ok(())
    }

    /// Reinterpret the same samples on another grid with equal cell counts.
    pub fn with_grid(mut self, grid: Grid) -> Result<Self> {
        if !self.grid.same_shape(&grid) {
            return Err(Error::Shape("cell counts differ".into()));
        }
        self.grid = grid;
        Ok(self)
    }

    /// Set the wall-normal velocity on both walls and the tangential wall
    /// values to zero.
    pub fn enforce_no_slip(&mut self) {
        let nx = self.grid.nx;
        let ny = self.grid.ny;
        self.u2[..nx].iter_mut().for_each(|v| *v = 0.0);
        self.u2[ny * nx..].iter_mut().for_each(|v| *v = 0.0);
        for w in &mut self.wall_u1 {
            w.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    pub fn max_abs(&self) -> (f64, f64) {
        let m = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        (m(&self.u1), m(&self.u2))
    }

    pub fn is_finite(&self) -> bool {
        self.u1.iter().chain(&self.u2).all(|v| v.is_finite())
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_all(|v| c * v)
    }

    fn map_all(&self, f: impl Fn(f64) -> f64) -> Self {
        VelocityField {
            grid: self.grid,
            u1: self.u1.iter().map(|&v| f(v)).collect(),
            u2: self.u2.iter().map(|&v| f(v)).collect(),
            wall_u1: [
                self.wall_u1[0].iter().map(|&v| f(v)).collect(),
                self.wall_u1[1].iter().map(|&v| f(v)).collect(),
            ],
        }
    }

    fn zip(&self, other: &VelocityField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let z = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect::<Vec<_>>();
        Ok(VelocityField {
            grid: self.grid,
            u1: z(&self.u1, &other.u1),
            u2: z(&self.u2, &other.u2),
            wall_u1: [
                z(&self.wall_u1[0], &other.wall_u1[0]),
                z(&self.wall_u1[1], &other.wall_u1[1]),
            ],
        })
    }

    pub fn sub(&self, other: &VelocityField) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add(&self, other: &VelocityField) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &VelocityField) -> Result<Self> {
        self.zip(other, |a, b| a + c * b)
    }

    /// Largest deviation of any sample row from its mean along `x`.
    pub fn max_x_variation(&self) -> f64 {
        let nx = self.grid.nx;
        let var = |v: &[f64]| {
            v.chunks(nx)
                .map(|row| {
                    let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    hi - lo
                })
                .fold(0.0, f64::max)
        };
        var(&self.u1).max(var(&self.u2))
    }
}

/// Cell-centered scalar, `data[j * nx + i]` at `((i + 1/2) dx, (j + 1/2) dy)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            data: vec![0.0; grid.nx * grid.ny],
            grid,
        }
    }

    pub fn from_vec(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.nx * grid.ny {
            return Err(Error::Shape(format!(
                "scalar has {} samples, grid needs {}",
                data.len(),
                grid.nx * grid.ny
            )));
        }
        Ok(ScalarField { grid, data })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.nx * grid.ny);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                data.push(f(grid.x_center(i), grid.y_center(j)));
            }
        }
        ScalarField { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.grid.nx + i]
    }

    pub fn scale(&self, c: f64) -> Self {
        ScalarField {
            grid: self.grid,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, b| a.max(b.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// Cell-centered scalar sampled at a sequence of times, stored as
/// `data[(k * ny + j) * nx + i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    grid: Grid,
    times: Vec<f64>,
    data: Vec<f64>,
}

impl SpaceTimeField {
    pub fn new(grid: Grid, times: Vec<f64>, data: Vec<f64>) -> Result<Self> {
        if data.len() != times.len() * grid.nx * grid.ny {
            return Err(Error::Shape(format!(
                "space-time data has {} samples, expected {} x {} x {}",
                data.len(),
                times.len(),
                grid.ny,
                grid.nx
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("sample times must be strictly increasing".into()));
        }
        Ok(SpaceTimeField { grid, times, data })
    }

    pub fn from_fn(grid: Grid, times: Vec<f64>, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(times.len() * grid.nx * grid.ny);
        for &t in &times {
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    data.push(f(t, grid.x_center(i), grid.y_center(j)));
                }
            }
        }
        SpaceTimeField::new(grid, times, data)
    }

    pub fn empty(grid: Grid) -> Self {
        SpaceTimeField {
            grid,
            times: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, frame: &ScalarField) -> Result<()> {
        self.grid.check_same(frame.grid())?;
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::InvalidConfig(format!(
                    "sample time {t} does not follow {last}"
                )));
            }
        }
        self.times.push(t);
        self.data.extend_from_slice(frame.data());
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn nt(&self) -> usize {
        self.times.len()
    }

    pub fn frame(&self, k: usize) -> &[f64] {
        let n = self.grid.nx * self.grid.ny;
        &self.data[k * n..(k + 1) * n]
    }

    pub fn at(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.grid.ny + j) * self.grid.nx + i]
    }

    /// Same samples with times multiplied by `time_factor`, lengths by
    /// `length_factor` and values by `value_factor`.
    pub fn rescaled(&self, time_factor: f64, length_factor: f64, value_factor: f64) -> Self {
        SpaceTimeField {
            grid: self.grid.scaled(length_factor),
            times: self.times.iter().map(|t| t * time_factor).collect(),
            data: self.data.iter().map(|v| v * value_factor).collect(),
        }
    }

    /// Trapezoid-in-time, midpoint-in-space integral over the sampled span.
    pub fn integral(&self) -> f64 {
        let n = self.grid.nx * self.grid.ny;
        let area = self.grid.cell_area();
        let sums: Vec<f64> = (0..self.nt())
            .map(|k| self.data[k * n..(k + 1) * n].iter().sum::<f64>() * area)
            .collect();
        self.times
            .windows(2)
            .zip(sums.windows(2))
            .map(|(t, s)| 0.5 * (t[1] - t[0]) * (s[0] + s[1]))
            .sum()
    }
}
