#![allow(dead_code)]

use layersep::czdecomp::{
    initial_partition, refine, suitability, BaseScales, Decomposition, DensityIntegrator, InitialPartition,
    ParabolicCube, MIN_SAMPLES,
};
use layersep::fields::{l2_distance, ChannelGeometry, Grid, SpaceTimeField, SquareIntegrable, VelocityField};
use layersep::nschannel::{make_initial_shear, ChannelSolver, Shear, SolverConfig};
use layersep::par::Exec;
use layersep::prandtl::ShearProfile;
use layersep::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gaussian blob of dissipation hugging one wall.
#[derive(Clone, Copy, Debug)]
pub struct Bump {
    pub amp: f64,
    pub t: f64,
    pub x: f64,
    pub top: bool,
    pub st: f64,
    pub sx: f64,
    pub sy: f64,
}

/// A random dissipation density on `(0, L) x (0, W) x (0, H)`.
#[derive(Clone, Debug)]
pub struct DensitySpec {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub base: f64,
    pub bumps: Vec<Bump>,
}

pub const CELLS: usize = 64;
pub const TIMES: usize = 257;

impl DensitySpec {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let length = 10f64.powf(rng.random_range(-0.6..0.6));
        let width = 10f64.powf(rng.random_range(-0.3..0.3));
        let height = 10f64.powf(rng.random_range(-0.3..0.3));
        let n = rng.random_range(0..5);
        let bumps = (0..n)
            .map(|_| Bump {
                amp: 10f64.powf(rng.random_range(-1.0..3.0)),
                t: rng.random_range(0.0..1.0),
                x: rng.random_range(0.0..1.0),
                top: rng.random_bool(0.5),
                st: rng.random_range(0.02..0.5),
                sx: rng.random_range(0.02..0.5),
                sy: rng.random_range(0.02..0.5),
            })
            .collect();
        DensitySpec {
            length,
            width,
            height,
            base: if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..2.0) },
            bumps,
        }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::random(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Bump positions and widths are relative to `L`, `W` and `H`.
    pub fn field(&self, cells: usize) -> SpaceTimeField {
        let g = Grid::new(ChannelGeometry::new(self.width, self.height).unwrap(), cells, cells).unwrap();
        let times = (0..TIMES).map(|k| self.length * k as f64 / (TIMES - 1) as f64).collect();
        let (l, w, h) = (self.length, self.width, self.height);
        SpaceTimeField::from_fn(g, times, |t, x, y| {
            let mut v = self.base;
            for b in &self.bumps {
                let dx = (x / w - b.x).rem_euclid(1.0);
                let dx = dx.min(1.0 - dx);
                let dy = if b.top { 1.0 - y / h } else { y / h };
                let q = ((t / l - b.t) / b.st).powi(2) + (dx / b.sx).powi(2) + (dy / b.sy).powi(2);
                v += b.amp * (-q).exp();
            }
            v
        })
        .unwrap()
    }
}

/// Deepest generation whose doubled cubes still hold `MIN_SAMPLES` samples
/// per axis on a `cells x cells` grid with `TIMES` frames.
pub fn resolvable_generation(sc: &BaseScales, cells: usize) -> Option<u32> {
    let (dx, dy) = (sc.width / cells as f64, sc.height / cells as f64);
    let dt = sc.length / (TIMES - 1) as f64;
    let need = MIN_SAMPLES as f64;
    (0..12u32)
        .take_while(|&k| {
            2.0 * sc.cube_width(k) / dx >= need
                && 2.0 * sc.cube_height(k) / dy >= need
                && sc.cube_length(k) / dt >= need + 1.0
        })
        .last()
}

/// Refine with `c0`, multiplying it by 4 while some cube stays unsuitable.
pub fn refine_escalating(
    initial: &InitialPartition,
    density: &DensityIntegrator,
    mut c0: f64,
    max_generation: u32,
) -> Decomposition {
    for _ in 0..60 {
        match refine(initial, density, c0, max_generation, Exec::Sequential) {
            Ok(d) => return d,
            Err(Error::Unresolved { .. }) => c0 *= 4.0,
            Err(e) => panic!("{e}"),
        }
    }
    panic!("no admissible c0")
}

/// Parent of a refined cube: the dyadic cube one generation up that
/// contains it.
pub fn parent_of(c: &ParabolicCube) -> ParabolicCube {
    let l = 4.0 * (c.t - c.s);
    let w = 2.0 * c.w;
    let s = ((c.s / l) + 1e-9).floor() * l;
    ParabolicCube {
        generation: c.generation - 1,
        wall: c.wall,
        s,
        t: s + l,
        center: ((c.center / w) + 1e-9).floor() * w + 0.5 * w,
        w,
        h: 2.0 * c.h,
        r: 2.0 * c.r,
    }
}

#[derive(Debug, Default)]
pub struct InvariantReport {
    pub measure_error: f64,
    pub overlaps: usize,
    pub bracket_failures: usize,
    pub witness_failures: usize,
    pub uncovered: usize,
}

impl InvariantReport {
    pub fn ok(&self) -> bool {
        self.measure_error <= 1e-10
            && self.overlaps == 0
            && self.bracket_failures == 0
            && self.witness_failures == 0
            && self.uncovered == 0
    }
}

/// Every structural invariant of a decomposition, each computed
/// independently of the refinement code.
pub fn check_invariants(dec: &Decomposition, density: &DensityIntegrator, probes: &mut ChaCha8Rng) -> InvariantReport {
    let sc = &dec.scales;
    let expected = sc.length * 2.0 * sc.width;
    let total: f64 = dec.cubes.iter().map(|c| (c.cube.t - c.cube.s) * c.cube.w).sum();
    let mut rep = InvariantReport {
        measure_error: (total - expected).abs() / expected,
        overlaps: dec.overlapping_pairs(),
        ..Default::default()
    };
    for c in &dec.cubes {
        let q = &c.cube;
        let l = q.t - q.s;
        let tol = 1e-12;
        let bracket = [l.sqrt(), q.w, q.h].iter().all(|&v| v >= q.r * (1.0 - tol) && v <= 2.0 * q.r * (1.0 + tol));
        rep.bracket_failures += usize::from(!bracket);
        if let Some(pa) = c.parent_average {
            let p = parent_of(q);
            let s = suitability(&p, density, dec.c0).unwrap();
            let same = (s.average - pa).abs() <= 1e-9 * pa.abs().max(1e-300);
            rep.witness_failures += usize::from(s.suitable() || !same);
        }
    }
    for wall in layersep::fields::Wall::BOTH {
        for _ in 0..200 {
            let t = probes.random_range(0.0..sc.length);
            let x = probes.random_range(0.0..sc.width);
            rep.uncovered += usize::from(dec.locate(wall, t, x).is_none());
        }
    }
    rep
}

pub struct DecompositionCase {
    pub spec: DensitySpec,
    pub initial: InitialPartition,
    pub max_generation: u32,
}

/// Geometry, initial selection and refinement depth for a random density;
/// `None` when the grid cannot resolve even the initial selection.
pub fn decomposition_case(spec: DensitySpec, depth: u32) -> Option<DecompositionCase> {
    let initial = initial_partition(spec.length, spec.width, spec.height, depth).ok()?;
    let max_generation = resolvable_generation(&initial.scales, CELLS)?;
    (max_generation >= depth).then_some(DecompositionCase {
        spec,
        initial,
        max_generation,
    })
}

/// Relative `L^2` error of the solver against the heat-series oracle for
/// the unperturbed ramped constant shear, maximized over the sample times.
pub fn oracle_error(ny: usize, nu: f64, ramp: f64, t_end: f64, samples: usize, dt_max: f64) -> f64 {
    let grid = Grid::new(ChannelGeometry::new(1.0, 1.0).unwrap(), 16, ny).unwrap();
    let cells = (ramp / grid.dy()).round() as usize;
    assert!((cells as f64 * grid.dy() - ramp).abs() < 1e-12, "ramp must be a whole number of cells");
    let init = make_initial_shear(grid, &Shear::constant(1.0), cells, None).unwrap();
    let oracle = ShearProfile::ramped_constant(1.0, ramp, 1.0, nu, 8192).unwrap();
    let mut cfg = SolverConfig::new(nu, t_end);
    cfg.sample_dt = Some(t_end / samples as f64);
    cfg.dt_max = Some(dt_max);
    let mut worst: f64 = 0.0;
    ChannelSolver::new(init.field, cfg)
        .unwrap()
        .run(|s| {
            if s.t > 0.0 {
                let exact = VelocityField::from_fn(grid, |_, y| oracle.evaluate(s.t, y), |_, _| 0.0);
                let e = l2_distance(s.field, &exact)? / exact.l2_norm();
                worst = worst.max(e);
            }
            Ok(())
        })
        .unwrap();
    worst
}
