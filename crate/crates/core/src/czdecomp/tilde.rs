use serde::{Deserialize, Serialize};

use crate::fields::Wall;
use crate::nschannel::BoundaryVorticityTrace;
use crate::{Error, Result};

use super::partition::ParabolicCube;
use super::refine::Decomposition;

/// Minimum trace samples per cube, in time and across the wall.
pub const MIN_TRACE_SAMPLES: usize = 4;

/// The piecewise-constant averaged boundary vorticity: on each cube,
/// the wall average of the absolute value of the time-averaged vorticity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TildeOmega {
    pub period: f64,
    pub entries: Vec<TildeEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TildeEntry {
    pub cube: ParabolicCube,
    pub value: f64,
}

impl TildeOmega {
    /// Value on the cube whose closed face contains `(t, x)`.
    pub fn lookup(&self, wall: Wall, t: f64, x: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.cube.wall == wall && e.cube.contains(t, x, self.period))
            .map(|e| e.value)
    }

    pub fn max_value(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.value))
    }

    /// `max_i omega~_i r_i^2`, the smallest `c1` with
    /// `omega~ <= c1 r^-2` on every cube.
    pub fn fitted_c1(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.value * e.cube.r * e.cube.r))
    }
}

/// Quadrature weights of the wall samples `x_i = i dx` (cells of width `dx`
/// centered on the samples) over the periodic box `(a, b)`.
pub(crate) fn box_weights(n: usize, dx: f64, a: f64, b: f64) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    let first = ((a / dx) - 0.5).floor() as i64;
    let last = ((b / dx) + 0.5).ceil() as i64;
    for m in first..=last {
        let lo = (m as f64 - 0.5) * dx;
        let hi = lo + dx;
        let w = hi.min(b) - lo.max(a);
        if w > 0.0 {
            let i = m.rem_euclid(n as i64) as usize;
            match out.iter_mut().find(|(j, _)| *j == i) {
                Some(e) => e.1 += w,
                None => out.push((i, w)),
            }
        }
    }
    out
}

pub fn tilde_omega(decomp: &Decomposition, trace: &BoundaryVorticityTrace) -> Result<TildeOmega> {
    let g = &trace.grid;
    let period = decomp.scales.width;
    if (g.width() - period).abs() > 1e-9 * period {
        return Err(Error::Shape(format!(
            "trace lives on a channel of width {}, decomposition on {period}",
            g.width()
        )));
    }
    let dx = g.dx();
    let mut entries = Vec::with_capacity(decomp.len());
    for c in &decomp.cubes {
        let cube = c.cube;
        let series = trace.wall(cube.wall);
        let samples = series.count_in(cube.s, cube.t);
        let across = cube.w / dx;
        if samples < MIN_TRACE_SAMPLES || across < MIN_TRACE_SAMPLES as f64 - 1e-9 {
            return Err(Error::Resolution(format!(
                "cube t in ({}, {}) of width {} holds {samples} trace times and {across:.2} wall samples; need {MIN_TRACE_SAMPLES}",
                cube.s, cube.t, cube.w
            )));
        }
        let integrals = series.integrate(cube.s, cube.t)?;
        let l = cube.length();
        let weights = box_weights(g.nx, dx, cube.center - 0.5 * cube.w, cube.center + 0.5 * cube.w);
        let value = weights.iter().map(|&(i, w)| w * (integrals[i] / l).abs()).sum::<f64>() / cube.w;
        entries.push(TildeEntry { cube, value });
    }
    Ok(TildeOmega { period, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::czdecomp::{initial_partition, Decomposition, DecomposedCube};
    use crate::fields::Grid;

    fn decomposition(depth: u32) -> Decomposition {
        let p = initial_partition(1.0, 1.0, 1.0, depth).unwrap();
        Decomposition {
            scales: p.scales,
            depth,
            c0: 1.0,
            max_generation: depth,
            cubes: p
                .cubes
                .iter()
                .map(|&cube| DecomposedCube {
                    cube,
                    average: 0.0,
                    parent_average: None,
                    clamped: cube.s == 0.0,
                })
                .collect(),
        }
    }

    fn trace(n: usize, nt: usize, f: impl Fn(f64, f64) -> f64) -> BoundaryVorticityTrace {
        let g = Grid::unit(n).unwrap();
        let mut tr = BoundaryVorticityTrace::new(g);
        for k in 0..nt {
            let t = k as f64 / (nt - 1) as f64;
            let row: Vec<f64> = (0..n).map(|i| f(t, i as f64 / n as f64)).collect();
            tr.push(t, row.clone(), row).unwrap();
        }
        tr
    }

    #[test]
    fn constant_vorticity() {
        let d = decomposition(2);
        let om = tilde_omega(&d, &trace(32, 257, |_, _| -1.5)).unwrap();
        assert!(om.entries.iter().all(|e| (e.value - 1.5).abs() < 1e-12));
    }

    #[test]
    fn oscillation_cancels_inside_the_absolute_value() {
        let d = decomposition(1);
        let om = tilde_omega(&d, &trace(32, 1025, |t, _| (2.0 * std::f64::consts::PI * t * 8.0).sin())).unwrap();
        for e in &om.entries {
            assert!(e.value < 1e-4, "{e:?}");
        }
    }

    #[test]
    fn odd_in_space_does_not_cancel() {
        let d = decomposition(0);
        let om = tilde_omega(&d, &trace(64, 257, |_, x| (2.0 * std::f64::consts::PI * x).sin())).unwrap();
        let e = om.entries[0];
        assert_eq!(e.cube.w, 0.5);
        let exact = 2.0 / std::f64::consts::PI;
        assert!((e.value - exact).abs() < 1e-2, "{} {exact}", e.value);
        assert!(om.fitted_c1() > 0.0);
        assert_eq!(om.lookup(Wall::Top, 0.9, 0.1), Some(om.entries.iter().find(|e| e.cube.wall == Wall::Top && e.cube.contains(0.9, 0.1, 1.0)).unwrap().value));
    }

    #[test]
    fn coarse_trace_is_rejected() {
        let d = decomposition(2);
        assert!(matches!(tilde_omega(&d, &trace(32, 9, |_, _| 1.0)), Err(Error::Resolution(_))));
    }

    #[test]
    fn box_weights_sum_to_width() {
        let w = box_weights(16, 1.0 / 16.0, -0.13, 0.3);
        let s: f64 = w.iter().map(|e| e.1).sum();
        assert!((s - 0.43).abs() < 1e-14);
    }
}
