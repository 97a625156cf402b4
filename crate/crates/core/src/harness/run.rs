use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fields::{
    j_of, read_field, write_field, ChannelGeometry, Grid, SpaceTimeField, SquareIntegrable, StoredField,
    VelocityField, Wall,
};
use crate::nschannel::{make_initial_shear, BoundaryVorticityTrace, ChannelSolver, EnergyLedger, Shear};
use crate::par::Exec;
use crate::prandtl::{snap_t_nu, t_star, SnappedTime};
use crate::{Error, Result};

use super::config::{CaseSpec, ExperimentConfig};

/// Size statistics of the background shear.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearStats {
    /// `A = ||ubar||_inf`
    pub amplitude: f64,
    /// `G = ||grad ubar||_inf`
    pub max_gradient: f64,
    /// `E = ||ubar||^2`
    pub energy: f64,
    pub nu: f64,
    pub width: f64,
    pub height: f64,
    /// `|Omega|`
    pub volume: f64,
    /// `|dOmega|`, both walls.
    pub boundary_measure: f64,
    /// `max{H/W, 1}^2`
    pub aspect: f64,
}

impl ShearStats {
    pub fn new(geometry: &ChannelGeometry, shear: &Shear, nu: f64) -> Self {
        ShearStats {
            amplitude: shear.amplitude(),
            max_gradient: shear.max_gradient(geometry.height),
            energy: shear.energy(geometry),
            nu,
            width: geometry.width,
            height: geometry.height,
            volume: geometry.volume(),
            boundary_measure: geometry.boundary_measure(),
            aspect: geometry.aspect_factor(),
        }
    }

    /// `Re = A H / nu`.
    pub fn reynolds(&self) -> f64 {
        self.amplitude * self.height / self.nu
    }

    /// `Re^-1` without dividing by a zero amplitude.
    pub fn inverse_reynolds(&self) -> f64 {
        self.nu / (self.amplitude * self.height)
    }

    /// `T_nu` snapped below `T*`; `None` for a vanishing shear, where `T*`
    /// is infinite and the whole run is treated as the Prandtl span.
    pub fn snapped_t_nu(&self, t_end: f64) -> Result<SnappedTime> {
        if self.energy == 0.0 {
            return Ok(SnappedTime {
                t_star: f64::MAX,
                t_nu: t_end,
                k: 0,
                degenerate: true,
            });
        }
        snap_t_nu(t_end, t_star(self.energy, self.boundary_measure, self.nu)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationSample {
    pub t: f64,
    /// `||u(t) - ubar||^2`
    pub separation: f64,
    /// `nu ||grad u||^2_{L^2((0,t) x Omega)}`
    pub dissipation: f64,
    /// `int_0^t int_wall J[ubar] nu omega dx' ds`, bottom then top.
    pub boundary: [f64; 2],
}

/// Integrals over the main span `(T_nu, T)` taken from the full-resolution
/// trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainSpan {
    pub t_nu: SnappedTime,
    /// `int_{T_nu}^T int_wall nu omega dx' dt`, bottom then top.
    pub wall_vorticity: [f64; 2],
    /// `int_{T_nu}^T ||u - ubar||^2 dt`
    pub separation_integral: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationRecord {
    pub case: CaseSpec,
    pub stats: ShearStats,
    pub shear: Shear,
    pub t_end: f64,
    /// `||u(0) - ubar||^2`
    pub initial_deviation: f64,
    pub main: MainSpan,
    pub samples: Vec<SeparationSample>,
}

impl SeparationRecord {
    pub fn last(&self) -> &SeparationSample {
        self.samples.last().expect("records hold at least the initial sample")
    }

    /// CSV with header `t,separation,dissipation,boundary_bottom,boundary_top`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,separation,dissipation,boundary_bottom,boundary_top\n");
        for r in &self.samples {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.t, r.separation, r.dissipation, r.boundary[0], r.boundary[1]
            ));
        }
        s
    }

    pub fn dissipation_is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].dissipation >= w[0].dissipation)
    }

    /// `sup_t (||u - ubar||^2(t) + nu/2 ||grad u||^2_{L^2(0,t)})` over the
    /// samples.
    pub fn sup_energy_deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.separation + 0.5 * s.dissipation)
            .fold(0.0, f64::max)
    }
}

/// Everything one case produces.
#[derive(Clone, Debug)]
pub struct CaseOutput {
    pub record: SeparationRecord,
    pub trace: BoundaryVorticityTrace,
    pub ledger: EnergyLedger,
    pub final_field: VelocityField,
    pub density: Option<SpaceTimeField>,
}

fn with_case(case: &CaseSpec, e: Error) -> Error {
    Error::Case {
        index: case.index,
        amplitude: case.amplitude,
        nu: case.nu,
        ny: case.ny,
        source: Box::new(e),
    }
}

/// Run one case of the sweep (no files are written).
pub fn run_case(cfg: &ExperimentConfig, index: usize) -> Result<CaseOutput> {
    cfg.validate()?;
    cfg.check_runnable()?;
    let case = cfg.case(index)?;
    simulate(cfg, &case).map_err(|e| with_case(&case, e))
}

fn simulate(cfg: &ExperimentConfig, case: &CaseSpec) -> Result<CaseOutput> {
    let grid = cfg.grid(case)?;
    let shear = cfg.case_shear(case);
    let stats = ShearStats::new(&grid.geometry, &shear, case.nu);
    let perturbation = cfg.perturbation_spec();
    let init = make_initial_shear(grid, &shear, cfg.ramp_cells_for(&grid), perturbation.as_ref())?;
    let ubar = shear.as_field(grid);
    let mut samples = Vec::new();
    let out = ChannelSolver::new(init.field, cfg.solver_config(case.nu))?
        .with_density(cfg.record_density)
        .run(|s| {
            samples.push(SeparationSample {
                t: s.t,
                separation: s.field.sub(&ubar)?.l2_norm_sq(),
                dissipation: s.cumulative_dissipation,
                boundary: [0.0; 2],
            });
            Ok(())
        })?;
    let h = grid.height();
    let dx = grid.dx();
    for wall in Wall::BOTH {
        let j = j_of([shear.wall_value(wall, h), 0.0], wall);
        let series = out.trace.wall(wall);
        let mut acc = 0.0;
        for k in 1..samples.len() {
            let flux = series.integrate(samples[k - 1].t, samples[k].t)?;
            acc += j * case.nu * dx * flux.iter().sum::<f64>();
            samples[k].boundary[wall.index()] = acc;
        }
    }
    let t_nu = stats.snapped_t_nu(cfg.t_end)?;
    let main = main_span(&out.trace, &samples, t_nu, case.nu, dx, cfg.t_end)?;
    let record = SeparationRecord {
        case: *case,
        stats,
        shear,
        t_end: cfg.t_end,
        initial_deviation: init.deviation * init.deviation,
        main,
        samples,
    };
    Ok(CaseOutput {
        record,
        trace: out.trace,
        ledger: out.ledger,
        final_field: out.final_field,
        density: out.density,
    })
}

fn main_span(
    trace: &BoundaryVorticityTrace,
    samples: &[SeparationSample],
    t_nu: SnappedTime,
    nu: f64,
    dx: f64,
    t_end: f64,
) -> Result<MainSpan> {
    let mut wall_vorticity = [0.0; 2];
    if !t_nu.degenerate {
        for wall in Wall::BOTH {
            let flux = trace.wall(wall).integrate(t_nu.t_nu, t_end)?;
            wall_vorticity[wall.index()] = nu * dx * flux.iter().sum::<f64>();
        }
    }
    let separation_integral = if t_nu.degenerate {
        0.0
    } else {
        trapezoid_from(samples.iter().map(|s| (s.t, s.separation)), t_nu.t_nu)
    };
    Ok(MainSpan {
        t_nu,
        wall_vorticity,
        separation_integral,
    })
}

/// `int_a^{t_last} f dt` for piecewise-linear samples.
pub(crate) fn trapezoid_from(points: impl Iterator<Item = (f64, f64)>, a: f64) -> f64 {
    let pts: Vec<(f64, f64)> = points.collect();
    let mut acc = 0.0;
    for w in pts.windows(2) {
        let ((t0, f0), (t1, f1)) = (w[0], w[1]);
        if t1 <= a {
            continue;
        }
        let (s, fs) = if t0 < a {
            (a, f0 + (f1 - f0) * (a - t0) / (t1 - t0))
        } else {
            (t0, f0)
        };
        acc += 0.5 * (t1 - s) * (fs + f1);
    }
    acc
}

/// File names inside a case directory.
pub mod artifact {
    pub const RECORD: &str = "record.json";
    pub const SEPARATION: &str = "separation.csv";
    pub const LEDGER: &str = "ledger.csv";
    pub const VORTICITY: &str = "vorticity.csv";
    pub const FINAL_FIELD: &str = "final";
    pub const DENSITY: &str = "density";
    pub const GRID: &str = "grid.json";
}

pub fn write_case(dir: &Path, out: &CaseOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(artifact::RECORD), serde_json::to_string_pretty(&out.record)?)?;
    fs::write(dir.join(artifact::SEPARATION), out.record.to_csv())?;
    fs::write(dir.join(artifact::LEDGER), out.ledger.to_csv())?;
    fs::write(dir.join(artifact::VORTICITY), out.trace.to_csv())?;
    fs::write(dir.join(artifact::GRID), serde_json::to_string_pretty(&out.trace.grid)?)?;
    write_field(&dir.join(artifact::FINAL_FIELD), &StoredField::Velocity(out.final_field.clone()))?;
    if let Some(d) = &out.density {
        write_field(&dir.join(artifact::DENSITY), &StoredField::SpaceTime(d.clone()))?;
    }
    Ok(())
}

fn require(path: PathBuf, what: &str) -> Result<PathBuf> {
    if path.exists() {
        Ok(path)
    } else {
        Err(Error::Dependency(format!(
            "{what} not found at {} (run the `run` stage first)",
            path.display()
        )))
    }
}

pub fn read_record(dir: &Path) -> Result<SeparationRecord> {
    let p = require(dir.join(artifact::RECORD), "separation record")?;
    Ok(serde_json::from_str(&fs::read_to_string(p)?)?)
}

pub fn read_trace(dir: &Path) -> Result<BoundaryVorticityTrace> {
    let g = require(dir.join(artifact::GRID), "grid description")?;
    let grid: Grid = serde_json::from_str(&fs::read_to_string(g)?)?;
    let p = require(dir.join(artifact::VORTICITY), "vorticity trace")?;
    BoundaryVorticityTrace::from_csv(grid, &fs::read_to_string(p)?)
}

pub fn read_density(dir: &Path) -> Result<SpaceTimeField> {
    require(dir.join(artifact::DENSITY).with_extension("json"), "dissipation density")?;
    match read_field(&dir.join(artifact::DENSITY))? {
        StoredField::SpaceTime(f) => Ok(f),
        _ => Err(Error::Shape("density artifact is not a space-time field".into())),
    }
}

/// Sweep summary written next to the case directories.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cases: Vec<CaseSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case: CaseSpec,
    pub directory: String,
    pub final_separation: f64,
    pub dissipation: f64,
    /// `max_t (kinetic(t) + dissipation(0, t) - kinetic(0))`
    pub energy_residual: f64,
    pub kinetic0: f64,
}

pub const SUMMARY: &str = "summary.json";

/// Run every case (in parallel under `Exec::Parallel`), write all artifacts
/// and the sweep summary. Results are ordered by case index.
pub fn run_sweep(cfg: &ExperimentConfig, exec: Exec) -> Result<(SweepSummary, Vec<SeparationRecord>)> {
    cfg.validate()?;
    cfg.check_runnable()?;
    let root = cfg.output_root();
    fs::create_dir_all(&root)?;
    fs::write(root.join("config.json"), cfg.to_json()?)?;
    let cases = cfg.cases();
    let results = exec.map(&cases, |case| -> Result<(CaseSummary, SeparationRecord)> {
        let out = simulate(cfg, case).map_err(|e| with_case(case, e))?;
        let dir = cfg.case_dir(case);
        write_case(&dir, &out).map_err(|e| with_case(case, e))?;
        let kinetic0 = out.ledger.records().first().map_or(0.0, |r| r.kinetic);
        let summary = CaseSummary {
            case: *case,
            directory: dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            final_separation: out.record.last().separation,
            dissipation: out.record.last().dissipation,
            energy_residual: out.ledger.energy_residual(),
            kinetic0,
        };
        Ok((summary, out.record))
    });
    let mut summaries = Vec::with_capacity(cases.len());
    let mut records = Vec::with_capacity(cases.len());
    for r in results {
        let (s, rec) = r?;
        summaries.push(s);
        records.push(rec);
    }
    let summary = SweepSummary { cases: summaries };
    fs::write(root.join(SUMMARY), serde_json::to_string_pretty(&summary)?)?;
    Ok((summary, records))
}

/// Records of a previous `run_sweep`, in case order.
pub fn load_records(cfg: &ExperimentConfig) -> Result<Vec<SeparationRecord>> {
    cfg.cases().iter().map(|c| read_record(&cfg.case_dir(c))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nschannel::PerturbationSpec;

    fn small(dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::single(ChannelGeometry::new(1.0, 1.0).unwrap(), 1.0, 0.02, 0.05, 16, dir);
        c.sample_dt = Some(0.01);
        c
    }

    #[test]
    fn rest_state_has_zero_separation() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small(dir.path());
        c.amplitudes = vec![0.0];
        let out = run_case(&c, 0).unwrap();
        assert!(out.record.samples.iter().all(|s| s.separation == 0.0 && s.dissipation == 0.0));
        assert_eq!(out.record.samples.len(), 6);
        assert!(out.record.main.t_nu.degenerate);
    }

    #[test]
    fn record_is_consistent() {
        let dir = tempfile::tempdir().unwrap();
        let c = small(dir.path());
        let out = run_case(&c, 0).unwrap();
        let r = &out.record;
        assert!(r.dissipation_is_monotone());
        assert!((r.samples[0].separation - r.initial_deviation).abs() < 1e-14);
        assert!(r.last().separation > r.initial_deviation);
        assert!(r.stats.reynolds() == 50.0);
        assert!(!r.main.t_nu.degenerate && r.main.t_nu.t_nu <= r.main.t_nu.t_star);
        // the layer drags the flow: on the bottom wall omega = -du/dy < 0 and J = A > 0
        assert!(r.last().boundary[0] < 0.0 && r.last().boundary[1] < 0.0);
        let full = trapezoid_from(r.samples.iter().map(|s| (s.t, s.separation)), 0.0);
        assert!(r.main.separation_integral <= full && r.main.separation_integral > 0.9 * full);
    }

    #[test]
    fn sweep_is_deterministic_and_round_trips() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let mut ca = small(a.path());
        ca.perturbation = Some(PerturbationSpec::new(0.05, 3));
        ca.amplitudes = vec![0.5, 1.0];
        let mut cb = ca.clone();
        cb.output_dir = b.path().to_path_buf();
        let (_, ra) = run_sweep(&ca, Exec::Parallel).unwrap();
        let (_, rb) = run_sweep(&cb, Exec::Sequential).unwrap();
        assert_eq!(ra, rb);
        for case in ca.cases() {
            for f in [artifact::SEPARATION, artifact::VORTICITY, artifact::LEDGER, artifact::RECORD] {
                let x = fs::read(ca.case_dir(&case).join(f)).unwrap();
                let y = fs::read(cb.case_dir(&case).join(f)).unwrap();
                assert_eq!(x, y, "{f}");
            }
        }
        assert_eq!(load_records(&ca).unwrap(), ra);
        let dir = ca.case_dir(&ca.cases()[1]);
        let tr = read_trace(&dir).unwrap();
        assert_eq!(tr.times().len(), 6);
        assert_eq!(read_density(&dir).unwrap().nt(), 6);
    }

    #[test]
    fn missing_artifacts_are_dependency_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_record(dir.path()), Err(Error::Dependency(_))));
        assert!(matches!(read_density(dir.path()), Err(Error::Dependency(_))));
    }

    #[test]
    fn trapezoid_cut() {
        let pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)];
        assert!((trapezoid_from(pts.into_iter(), 0.5) - (0.375 + 1.0)).abs() < 1e-15);
    }
}
