use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Periodic channel `(0, W) x (0, H)`, periodic in `x`, walls at `y = 0` and `y = H`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelGeometry {
    pub width: f64,
    pub height: f64,
    /// Spatial dimension. Only `2` is runnable; `3` is accepted so that
    /// volume and boundary measures can be evaluated in formulas.
    #[serde(default = "default_dim")]
    pub dim: u8,
}

fn default_dim() -> u8 {
    2
}

impl ChannelGeometry {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        Self::with_dim(width, height, 2)
    }

    pub fn with_dim(width: f64, height: f64, dim: u8) -> Result<Self> {
        let g = ChannelGeometry { width, height, dim };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidConfig(format!("width must be positive, got {}", self.width)));
        }
        if !(self.height > 0.0 && self.height.is_finite()) {
            return Err(Error::InvalidConfig(format!("height must be positive, got {}", self.height)));
        }
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::InvalidConfig(format!("dimension must be 2 or 3, got {}", self.dim)));
        }
        Ok(())
    }

    /// `|Omega| = W^(d-1) H`.
    pub fn volume(&self) -> f64 {
        self.width.powi(self.dim as i32 - 1) * self.height
    }

    /// `|dOmega| = 2 W^(d-1)` (both walls).
    pub fn boundary_measure(&self) -> f64 {
        2.0 * self.width.powi(self.dim as i32 - 1)
    }

    /// `max{H/W, 1}^2`.
    pub fn aspect_factor(&self) -> f64 {
        (self.height / self.width).max(1.0).powi(2)
    }

    /// Same channel with all lengths multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        ChannelGeometry {
            width: self.width * factor,
            height: self.height * factor,
            dim: self.dim,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wall {
    Bottom,
    Top,
}

impl Wall {
    pub const BOTH: [Wall; 2] = [Wall::Bottom, Wall::Top];

    pub fn index(self) -> usize {
        match self {
            Wall::Bottom => 0,
            Wall::Top => 1,
        }
    }

    /// `y` component of the outer unit normal.
    pub fn outer_normal_y(self) -> f64 {
        match self {
            Wall::Bottom => -1.0,
            Wall::Top => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Wall::Bottom => "bottom",
            Wall::Top => "top",
        }
    }
}

/// Uniform cell grid on a 2D channel.
///
/// Cell `(i, j)` covers `[i dx, (i+1) dx] x [j dy, (j+1) dy]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub geometry: ChannelGeometry,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(geometry: ChannelGeometry, nx: usize, ny: usize) -> Result<Self> {
        geometry.validate()?;
        if geometry.dim != 2 {
            return Err(Error::InvalidConfig(
                "grids are two-dimensional; a d = 3 geometry cannot be discretized".into(),
            ));
        }
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidConfig(format!("grid needs nx, ny >= 4, got {nx} x {ny}")));
        }
        Ok(Grid { geometry, nx, ny })
    }

    /// Unit square channel with `n x n` cells.
    pub fn unit(n: usize) -> Result<Self> {
        Grid::new(ChannelGeometry::new(1.0, 1.0)?, n, n)
    }

    pub fn width(&self) -> f64 {
        self.geometry.width
    }

    pub fn height(&self) -> f64 {
        self.geometry.height
    }

    pub fn dx(&self) -> f64 {
        self.geometry.width / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.geometry.height / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x_face(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    pub fn y_face(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    pub fn y_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dy()
    }

    /// Same cell counts on the channel scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Grid {
            geometry: self.geometry.scaled(factor),
            nx: self.nx,
            ny: self.ny,
        }
    }

    pub(crate) fn same_shape(&self, other: &Grid) -> bool {
        self.nx == other.nx && self.ny == other.ny
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::Shape(format!(
                "grid {}x{} vs {}x{}",
                self.nx, self.ny, other.nx, other.ny
            )));
        }
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        if !rel(self.width(), other.width()) || !rel(self.height(), other.height()) {
            return Err(Error::Shape("grids describe different channels".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measures() {
        let g = ChannelGeometry::new(2.0, 0.5).unwrap();
        assert_eq!(g.volume(), 1.0);
        assert_eq!(g.boundary_measure(), 4.0);
        assert_eq!(g.aspect_factor(), 1.0);
        let tall = ChannelGeometry::new(1.0, 3.0).unwrap();
        assert_eq!(tall.aspect_factor(), 9.0);
        let g3 = ChannelGeometry::with_dim(2.0, 1.0, 3).unwrap();
        assert_eq!(g3.volume(), 4.0);
        assert_eq!(g3.boundary_measure(), 8.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ChannelGeometry::new(0.0, 1.0).is_err());
        assert!(ChannelGeometry::new(1.0, -1.0).is_err());
        assert!(ChannelGeometry::with_dim(1.0, 1.0, 4).is_err());
        let g = ChannelGeometry::new(1.0, 1.0).unwrap();
        assert!(Grid::new(g, 3, 8).is_err());
        let g3 = ChannelGeometry::with_dim(1.0, 1.0, 3).unwrap();
        assert!(Grid::new(g3, 8, 8).is_err());
    }

    #[test]
    fn coordinates() {
        let grid = Grid::new(ChannelGeometry::new(2.0, 1.0).unwrap(), 8, 4).unwrap();
        assert_eq!(grid.dx(), 0.25);
        assert_eq!(grid.dy(), 0.25);
        assert_eq!(grid.x_center(0), 0.125);
        assert_eq!(grid.y_face(4), 1.0);
    }
}
