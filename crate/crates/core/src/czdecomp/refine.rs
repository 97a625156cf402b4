use serde::{Deserialize, Serialize};

use crate::fields::Wall;
use crate::par::Exec;
use crate::{Error, Result};

use super::density::DensityIntegrator;
use super::partition::{BaseScales, InitialPartition, ParabolicCube};

/// Default suitability constant `c0 = 2^-8`.
pub const DEFAULT_C0: f64 = 1.0 / 256.0;

/// Result of testing `mean_{2Q} |grad u|^2 <= c0 r^-4` on one cube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Suitability {
    pub average: f64,
    pub threshold: f64,
    /// The doubled cube reached below `t = 0` and was clamped.
    pub clamped: bool,
}

impl Suitability {
    pub fn suitable(&self) -> bool {
        self.average <= self.threshold
    }
}

/// Evaluate the suitability condition on `cube` against the dissipation
/// density. Errors when the doubled cube is under-sampled.
pub fn suitability(cube: &ParabolicCube, density: &DensityIntegrator, c0: f64) -> Result<Suitability> {
    if !(c0 > 0.0) {
        return Err(Error::InvalidConfig(format!("c0 must be positive, got {c0}")));
    }
    let (win, clamped) = cube.enlarged(density.grid().height());
    let average = density.average(&win)?;
    Ok(Suitability {
        average,
        threshold: c0 * cube.r.powi(-4),
        clamped,
    })
}

/// A suitable cube of the final decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposedCube {
    pub cube: ParabolicCube,
    /// `mean_{2Q} |grad u|^2`
    pub average: f64,
    /// The same mean over the parent's doubled cube, which exceeded the
    /// parent's threshold; absent for cubes of the initial selection.
    pub parent_average: Option<f64>,
    pub clamped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub scales: BaseScales,
    pub depth: u32,
    pub c0: f64,
    pub max_generation: u32,
    /// Sorted by wall, start time, then position across the wall.
    pub cubes: Vec<DecomposedCube>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Sum of face measures; equals `T |dOmega|` for a partition.
    pub fn total_measure(&self) -> f64 {
        self.cubes.iter().map(|c| c.cube.face_measure()).sum()
    }

    pub fn deepest_generation(&self) -> u32 {
        self.cubes.iter().map(|c| c.cube.generation).max().unwrap_or(0)
    }

    /// Number of pairs of cubes whose open faces intersect.
    pub fn overlapping_pairs(&self) -> usize {
        let period = self.scales.width;
        let mut count = 0;
        for (i, a) in self.cubes.iter().enumerate() {
            let tol = 1e-12 * period;
            for b in &self.cubes[i + 1..] {
                if b.cube.wall != a.cube.wall || b.cube.s >= a.cube.t - tol {
                    break;
                }
                let time = a.cube.t.min(b.cube.t) - a.cube.s.max(b.cube.s) > tol;
                let d = (a.cube.center - b.cube.center).rem_euclid(period);
                let d = d.min(period - d);
                let space = d < 0.5 * (a.cube.w + b.cube.w) - tol;
                if time && space {
                    count += 1;
                }
            }
        }
        count
    }

    /// Index of a cube whose closed face contains the wall point.
    pub fn locate(&self, wall: Wall, t: f64, x: f64) -> Option<usize> {
        self.cubes
            .iter()
            .position(|c| c.cube.wall == wall && c.cube.contains(t, x, self.scales.width))
    }
}

/// Recursively split every unsuitable cube of the initial selection into
/// its 8 boundary children until each piece is suitable. Initial cubes are
/// refined independently (in parallel under `Exec::Parallel`).
pub fn refine(
    initial: &InitialPartition,
    density: &DensityIntegrator,
    c0: f64,
    max_generation: u32,
    exec: Exec,
) -> Result<Decomposition> {
    let g = density.grid();
    let sc = &initial.scales;
    let tol = 1e-9;
    if (g.width() - sc.width).abs() > tol * sc.width || (g.height() - sc.height).abs() > tol * sc.height {
        return Err(Error::Shape(format!(
            "density lives on a {} x {} channel, decomposition on {} x {}",
            g.width(),
            g.height(),
            sc.width,
            sc.height
        )));
    }
    let last = density.times().last().copied().unwrap_or(f64::NEG_INFINITY);
    if last < sc.length * (1.0 - tol) {
        return Err(Error::Range(format!(
            "density sampled up to t = {last}, decomposition needs {}",
            sc.length
        )));
    }
    let branches = exec.map(&initial.cubes, |cube| refine_branch(cube, density, c0, max_generation));
    let mut cubes = Vec::new();
    let mut offenders = Vec::new();
    for b in branches {
        match b {
            Ok(Branch { done, unresolved }) => {
                cubes.extend(done);
                offenders.extend(unresolved);
            }
            Err(e) => return Err(e),
        }
    }
    if !offenders.is_empty() {
        return Err(Error::Unresolved {
            max_generation,
            offenders,
        });
    }
    cubes.sort_by(|a, b| {
        (a.cube.wall.index(), a.cube.s, a.cube.center)
            .partial_cmp(&(b.cube.wall.index(), b.cube.s, b.cube.center))
            .unwrap()
    });
    Ok(Decomposition {
        scales: *sc,
        depth: initial.depth,
        c0,
        max_generation,
        cubes,
    })
}

struct Branch {
    done: Vec<DecomposedCube>,
    unresolved: Vec<String>,
}

fn refine_branch(root: &ParabolicCube, density: &DensityIntegrator, c0: f64, max_generation: u32) -> Result<Branch> {
    let mut done = Vec::new();
    let mut unresolved = Vec::new();
    let mut stack = vec![(*root, None)];
    while let Some((cube, parent_average)) = stack.pop() {
        let test = suitability(&cube, density, c0)?;
        if test.suitable() {
            done.push(DecomposedCube {
                cube,
                average: test.average,
                parent_average,
                clamped: test.clamped,
            });
        } else if cube.generation >= max_generation {
            unresolved.push(format!(
                "{} wall, t in ({:.6e}, {:.6e}), x' = {:.6e}, generation {}: mean {:.6e} > {:.6e}",
                cube.wall.name(),
                cube.s,
                cube.t,
                cube.center,
                cube.generation,
                test.average,
                test.threshold
            ));
        } else {
            for child in cube.children().into_iter().rev() {
                stack.push((child, Some(test.average)));
            }
        }
    }
    Ok(Branch { done, unresolved })
}
