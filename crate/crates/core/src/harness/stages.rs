use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::czdecomp::{cube_records, TildeOmega};
use crate::par::Exec;
use crate::prandtl::SnappedTime;
use crate::{Error, Result};

use super::bounds::{
    assemble_combined_bound, constant_shear_terms, general_shear_terms, reduce_to_constant_shear, trivial_bound,
    CombinedBound, ConstantShearTerms, GeneralShearTerms, Reduction, TrivialBound,
};
use super::config::{CaseSpec, ExperimentConfig};
use super::decompose::{decompose_common, DecomposeSettings, RescaledRun, RunDecomposition};
use super::run::{load_records, read_density, read_trace, SeparationRecord, ShearStats};
use super::scaling::{fit_scaling, resolution_stability, ResolutionStability, ScalingFit, ScalingPoint};
use super::split::{split_boundary_term, SplitInputs, SplitReport};

pub const DECOMPOSITION: &str = "decomposition.json";
pub const CUBES: &str = "cubes.json";
pub const TILDE: &str = "tilde.json";
pub const STATISTIC: &str = "statistic.json";
pub const LORENTZ: &str = "lorentz.csv";
pub const BOUNDS: &str = "bounds.json";
pub const BOUNDS_CSV: &str = "bounds.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub case: CaseSpec,
    pub cubes: usize,
    pub deepest_generation: u32,
    pub c0: f64,
    pub escalations: u32,
    pub statistic_lhs: f64,
    pub dissipation: f64,
    pub ratio: Option<f64>,
}

impl DecompositionSummary {
    fn new(case: CaseSpec, d: &RunDecomposition) -> Self {
        DecompositionSummary {
            case,
            cubes: d.decomposition.len(),
            deepest_generation: d.decomposition.deepest_generation(),
            c0: d.c0,
            escalations: d.escalations,
            statistic_lhs: d.statistic.lhs,
            dissipation: d.statistic.rhs_raw,
            ratio: d.ratio(),
        }
    }
}

pub fn decompose_settings(cfg: &ExperimentConfig) -> DecomposeSettings {
    DecomposeSettings::new(cfg.c0, cfg.max_generation, cfg.depth)
}

/// Decompose every stored run in unit-viscosity variables with one common
/// `c0` and write the cube tables, averaged vorticity and statistics.
pub fn decompose_sweep(cfg: &ExperimentConfig, exec: Exec) -> Result<Vec<DecompositionSummary>> {
    let cases = cfg.cases();
    let runs: Vec<RescaledRun> = cases
        .iter()
        .map(|c| {
            let dir = cfg.case_dir(c);
            RescaledRun::new(&read_density(&dir)?, &read_trace(&dir)?, c.nu, cfg.t_end)
        })
        .collect::<Result<_>>()?;
    let decomps = decompose_common(&runs, &decompose_settings(cfg), exec)?;
    let mut out = Vec::with_capacity(cases.len());
    for (case, d) in cases.iter().zip(&decomps) {
        let dir = cfg.case_dir(case);
        fs::write(dir.join(DECOMPOSITION), serde_json::to_string(&d.decomposition)?)?;
        fs::write(
            dir.join(CUBES),
            serde_json::to_string_pretty(&cube_records(&d.decomposition, Some(&d.tilde))?)?,
        )?;
        fs::write(dir.join(TILDE), serde_json::to_string(&d.tilde)?)?;
        fs::write(dir.join(STATISTIC), serde_json::to_string_pretty(&d.statistic)?)?;
        fs::write(dir.join(LORENTZ), d.statistic.lorentz.to_csv())?;
        out.push(DecompositionSummary::new(*case, d));
    }
    fs::write(
        cfg.output_root().join("decomposition_summary.json"),
        serde_json::to_string_pretty(&out)?,
    )?;
    Ok(out)
}

pub fn read_tilde(dir: &Path) -> Result<TildeOmega> {
    let p = dir.join(TILDE);
    if !p.exists() {
        return Err(Error::Dependency(format!(
            "averaged vorticity not found at {} (run the `decompose` stage first)",
            p.display()
        )));
    }
    Ok(serde_json::from_str(&fs::read_to_string(p)?)?)
}

/// Split of the wall pairing of one stored run; needs the decomposition.
pub fn split_for_record(record: &SeparationRecord, tilde: &TildeOmega) -> Result<SplitReport> {
    let st = &record.stats;
    let t_nu = record.main.t_nu;
    if t_nu.degenerate {
        return Err(Error::Domain("T <= T_nu: the run lies inside the Prandtl span and has no split".into()));
    }
    split_boundary_term(
        tilde,
        &SplitInputs {
            amplitude: st.amplitude,
            width: st.width,
            height: st.height,
            nu: st.nu,
            t_nu: t_nu.t_nu,
            t_end: record.t_end,
            dissipation: record.last().dissipation,
        },
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub case: CaseSpec,
    pub stats: ShearStats,
    pub reynolds: f64,
    pub t_nu: SnappedTime,
    pub combined: CombinedBound,
    pub constant_shear: ConstantShearTerms,
    pub general_shear: GeneralShearTerms,
    pub reduction: Option<Reduction>,
    pub trivial: TrivialBound,
    /// Smallest constant of the constant-shear estimate over all sample
    /// times of this run.
    pub minimal_c: f64,
    /// The constant-shear estimate holds at every sample time with the
    /// sweep-wide fitted constant.
    pub holds_at_fitted_c: bool,
    pub split: Option<SplitReport>,
    /// Why the split is absent.
    pub split_note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityGroup {
    pub amplitude: f64,
    pub nu: f64,
    pub stability: ResolutionStability,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub runs: Vec<BoundReport>,
    pub fit: Option<ScalingFit>,
    pub fit_note: Option<String>,
    /// Largest per-run minimal constant.
    pub fitted_c: f64,
    pub all_hold: bool,
    pub stability: Vec<StabilityGroup>,
}

impl SweepReport {
    pub fn any_flagged(&self) -> bool {
        self.stability.iter().any(|g| g.stability.flagged)
    }

    /// One row per run: the displayed terms of both estimates.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "case,amplitude,nu,ny,reynolds,lhs,initial,cubic,log_term,viscous,energy_term,aspect,envelope,minimal_c,holds\n",
        );
        for r in &self.runs {
            let g = &r.general_shear;
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.case.index,
                r.case.amplitude,
                r.case.nu,
                r.case.ny,
                r.reynolds,
                r.constant_shear.lhs,
                r.constant_shear.initial,
                r.constant_shear.cubic,
                r.constant_shear.log_term,
                g.viscous,
                g.energy_term,
                g.aspect,
                g.envelope,
                r.minimal_c,
                r.holds_at_fitted_c
            ));
        }
        s
    }
}

fn points_hold(points: &[ScalingPoint], c: f64) -> bool {
    points.iter().all(|p| {
        let lhs = p.separation + p.half_dissipation;
        lhs <= (4.0 * p.initial_deviation + c * p.c_factor()) * (1.0 + 1e-12) + 1e-300
    })
}

fn minimal_over_points(points: &[ScalingPoint]) -> f64 {
    points.iter().fold(0.0, |m: f64, p| {
        let excess = p.separation + p.half_dissipation - 4.0 * p.initial_deviation;
        if excess <= 0.0 {
            m
        } else if p.c_factor() > 0.0 {
            m.max(excess / p.c_factor())
        } else {
            f64::INFINITY
        }
    })
}

/// Assemble the bound report of a set of records. `tildes[i]` is the
/// averaged vorticity of record `i`, when the decomposition stage ran.
pub fn assemble_report(records: &[SeparationRecord], tildes: &[Option<TildeOmega>]) -> Result<SweepReport> {
    let points: Vec<Vec<ScalingPoint>> = records.iter().map(ScalingPoint::from_record).collect();
    let minimal: Vec<f64> = points.iter().map(|p| minimal_over_points(p)).collect();
    let fitted_c = minimal.iter().copied().fold(0.0, f64::max);
    let all: Vec<ScalingPoint> = points.iter().flatten().copied().collect();
    let (fit, fit_note) = match fit_scaling(&all) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut runs = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let (split, split_note) = match tildes.get(i).and_then(|t| t.as_ref()) {
            None => (None, Some("decomposition not available".to_string())),
            Some(t) => match split_for_record(r, t) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            },
        };
        runs.push(BoundReport {
            case: r.case,
            stats: r.stats,
            reynolds: r.stats.reynolds(),
            t_nu: r.main.t_nu,
            combined: assemble_combined_bound(r)?,
            constant_shear: constant_shear_terms(r),
            general_shear: general_shear_terms(r),
            reduction: reduce_to_constant_shear(r).ok(),
            trivial: trivial_bound(r),
            minimal_c: minimal[i],
            holds_at_fitted_c: points_hold(&points[i], fitted_c),
            split,
            split_note,
        });
    }
    let mut groups: Vec<StabilityGroup> = Vec::new();
    for (r, &c) in records.iter().zip(&minimal) {
        let (a, nu) = (r.case.amplitude, r.case.nu);
        match groups.iter_mut().find(|g| g.amplitude == a && g.nu == nu) {
            Some(g) => g.stability.levels.push((r.case.ny, c)),
            None => groups.push(StabilityGroup {
                amplitude: a,
                nu,
                stability: resolution_stability(&[(r.case.ny, c)]),
            }),
        }
    }
    for g in &mut groups {
        g.stability.levels.sort_by_key(|l| l.0);
        g.stability = resolution_stability(&g.stability.levels);
    }
    let all_hold = runs.iter().all(|r| r.holds_at_fitted_c);
    Ok(SweepReport {
        runs,
        fit,
        fit_note,
        fitted_c,
        all_hold,
        stability: groups,
    })
}

/// Read the stored runs (and decompositions when present), assemble and
/// write `bounds.json` and `bounds.csv`.
pub fn bounds_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let records = load_records(cfg)?;
    let tildes: Vec<Option<TildeOmega>> = cfg
        .cases()
        .iter()
        .map(|c| {
            let dir = cfg.case_dir(c);
            dir.join(TILDE).exists().then(|| read_tilde(&dir)).transpose()
        })
        .collect::<Result<_>>()?;
    let report = assemble_report(&records, &tildes)?;
    let root = cfg.output_root();
    fs::write(root.join(BOUNDS), serde_json::to_string_pretty(&report)?)?;
    fs::write(root.join(BOUNDS_CSV), report.to_csv())?;
    Ok(report)
}

/// Two-column whitespace-separated data files for plotting, under
/// `<output>/report/`.
pub fn report_data(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let records = load_records(cfg)?;
    let dir = cfg.output_root().join("report");
    fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, rows: Vec<(f64, f64)>| -> Result<()> {
        let mut s = String::new();
        for (x, y) in rows {
            s.push_str(&format!("{x} {y}\n"));
        }
        let p = dir.join(name);
        fs::write(&p, s)?;
        written.push(p);
        Ok(())
    };
    for r in &records {
        let i = r.case.index;
        put(format!("case_{i:03}_separation.dat"), r.samples.iter().map(|s| (s.t, s.separation)).collect())?;
        put(format!("case_{i:03}_dissipation.dat"), r.samples.iter().map(|s| (s.t, s.dissipation)).collect())?;
        let stat = cfg.case_dir(&r.case).join(STATISTIC);
        if stat.exists() {
            let st: crate::czdecomp::BoundaryStatistic = serde_json::from_str(&fs::read_to_string(stat)?)?;
            put(
                format!("case_{i:03}_lorentz.dat"),
                st.lorentz.curve.iter().map(|&(s, _, w)| (s, w)).collect(),
            )?;
        }
    }
    let bounds = cfg.output_root().join(BOUNDS);
    if bounds.exists() {
        let rep: SweepReport = serde_json::from_str(&fs::read_to_string(bounds)?)?;
        put(
            "minimal_c_vs_reynolds.dat".into(),
            rep.runs.iter().map(|r| (r.reynolds, r.minimal_c)).collect(),
        )?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ChannelGeometry;
    use crate::harness::run::run_sweep;

    #[test]
    fn pipeline_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        // R0 = 2 in rescaled units: generation-1 doubled cubes span 8 cells at ny = 32
        let mut cfg = ExperimentConfig::single(ChannelGeometry::new(1.0, 1.0).unwrap(), 1.0, 0.1, 0.4, 32, dir.path());
        cfg.amplitudes = vec![0.5, 1.0, 1.5];
        cfg.resolutions = vec![32, 64];
        cfg.sample_dt = Some(0.4 / 32.0);
        cfg.max_generation = 1;
        assert!(matches!(bounds_sweep(&cfg), Err(Error::Dependency(_))));
        run_sweep(&cfg, Exec::Parallel).unwrap();
        let without = bounds_sweep(&cfg).unwrap();
        assert!(without.runs.iter().all(|r| r.split.is_none()));
        let dec = decompose_sweep(&cfg, Exec::Parallel).unwrap();
        assert_eq!(dec.len(), 6);
        assert!(dec.windows(2).all(|w| w[0].c0 == w[1].c0));
        let rep = bounds_sweep(&cfg).unwrap();
        assert!(rep.all_hold && rep.fitted_c.is_finite() && rep.fitted_c > 0.0);
        let fit = rep.fit.as_ref().unwrap();
        assert!(fit.exponents.is_some());
        assert_eq!(rep.stability.len(), 3);
        for r in &rep.runs {
            assert!(r.combined.holds(), "{:?}", r.combined);
            assert!(r.reduction.unwrap().max_gap() < 1e-12);
            let s = r.split.as_ref().unwrap();
            assert!(s.accounting_error() < 1e-10);
        }
        let files = report_data(&cfg).unwrap();
        assert!(files.len() >= 3 * 6 + 1);
        let rep2: SweepReport = serde_json::from_str(&fs::read_to_string(dir.path().join(BOUNDS)).unwrap()).unwrap();
        assert_eq!(rep2.runs.len(), 6);
    }
}
