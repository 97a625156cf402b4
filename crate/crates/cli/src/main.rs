use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use layersep::harness::{
    bounds_sweep, decompose_sweep, report_data, run_case, run_sweep, write_case, ExperimentConfig, OUTPUT_ENV,
};
use layersep::par::Exec;
use layersep::nschannel::Shear;
use layersep::prandtl::{decay_curve, decay_curve_csv, series_bound_check, sine_coefficients, ShearProfile};
use layersep::subsolution::{energy_rate_formula, profile_csv, rescale_profile, SubsolutionParams};
use layersep::{Error, Result};

#[derive(Parser)]
#[command(name = "layersep", version, about = "Channel flow layer-separation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Replaces the perturbation seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output root; takes precedence over the config and the environment.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run every loop on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate every case of the sweep (or one case) and store the records.
    Run {
        #[command(flatten)]
        common: Common,
        /// Run only this case index.
        #[arg(long)]
        case: Option<usize>,
    },
    /// Boundary decompositions of stored runs with one common c0.
    Decompose {
        #[command(flatten)]
        common: Common,
    },
    /// Assemble every bound term and fit the constants.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form relaxed Euler subsolution rates.
    Subsolution {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        /// Only used for the output directory.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heat-series bounds and shear-layer decay for every case.
    PrandtlCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Two-column data files for plotting.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
        std::env::remove_var(OUTPUT_ENV);
    }
    Ok(cfg)
}

fn exec(common: &Common) -> Exec {
    if common.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn run(cmd: Command) -> Result<String> {
    match cmd {
        Command::Run { common, case } => {
            let cfg = load(&common)?;
            match case {
                Some(i) => {
                    let out = run_case(&cfg, i)?;
                    let dir = cfg.case_dir(&out.record.case);
                    write_case(&dir, &out)?;
                    let last = out.record.last();
                    Ok(format!(
                        "run: case {i} separation {:.6e} dissipation {:.6e} -> {}",
                        last.separation,
                        last.dissipation,
                        dir.display()
                    ))
                }
                None => {
                    let (summary, _) = run_sweep(&cfg, exec(&common))?;
                    let worst = summary.cases.iter().map(|c| c.final_separation).fold(0.0, f64::max);
                    Ok(format!(
                        "run: {} case(s), largest final separation {worst:.6e} -> {}",
                        summary.cases.len(),
                        cfg.output_root().display()
                    ))
                }
            }
        }
        Command::Decompose { common } => {
            let cfg = load(&common)?;
            let out = decompose_sweep(&cfg, exec(&common))?;
            let cubes: usize = out.iter().map(|d| d.cubes).sum();
            let c0 = out.first().map_or(cfg.c0, |d| d.c0);
            Ok(format!("decompose: {} run(s), {cubes} cubes, common c0 = {c0:e}", out.len()))
        }
        Command::Bounds { common } => {
            let cfg = load(&common)?;
            let rep = bounds_sweep(&cfg)?;
            let status = if rep.all_hold { "holds" } else { "FAILS" };
            let flag = if rep.any_flagged() { ", resolution growth flagged" } else { "" };
            Ok(format!(
                "bounds: {} run(s), fitted C = {:.6e}, estimate {status} at fitted C{flag}",
                rep.runs.len(),
                rep.fitted_c
            ))
        }
        Command::Subsolution {
            lambda,
            eps,
            amplitude,
            config,
            out,
        } => {
            let params = SubsolutionParams::new(lambda, eps, amplitude)?;
            let r = energy_rate_formula(lambda, eps);
            let dev = lambda - r;
            let c = rescale_profile(&params, 0.5 * params.horizon() / amplitude)?.c;
            let root = match (out, config) {
                (Some(o), _) => Some(o),
                (None, Some(p)) => Some(ExperimentConfig::load(&p)?.output_root()),
                (None, None) => None,
            };
            if let Some(root) = root {
                let dir = root.join("subsolution");
                fs::create_dir_all(&dir)?;
                let state = params.state();
                let residual = state.residual_check(64, 301, 1e-3)?;
                let json = serde_json::json!({
                    "params": params,
                    "energy_rate": r,
                    "deviation_rate": dev,
                    "c": c,
                    "residual": residual,
                });
                fs::write(dir.join("subsolution.json"), serde_json::to_string_pretty(&json)?)?;
                fs::write(dir.join("profile.csv"), profile_csv(&state, 200)?)?;
            }
            Ok(format!("subsolution: r = {r}, deviation = {dev}, C = {c}"))
        }
        Command::PrandtlCheck { common } => {
            let cfg = load(&common)?;
            cfg.validate()?;
            let dir = cfg.output_root().join("prandtl");
            fs::create_dir_all(&dir)?;
            let mut series = String::from("z,sum,bound,tail\n");
            let mut series_fail = 0;
            for k in 0..61 {
                let z = 10f64.powf(-3.0 + 0.1 * k as f64);
                let s = series_bound_check(z)?;
                series_fail += usize::from(!s.holds());
                series.push_str(&format!("{z},{},{},{}\n", s.sum, s.bound, s.tail));
            }
            fs::write(dir.join("series.csv"), series)?;
            let mut decay_fail = 0;
            let cases = cfg.cases();
            for case in &cases {
                let grid = cfg.grid(case)?;
                let ramp = cfg.ramp_cells_for(&grid) as f64 * grid.dy();
                let h = cfg.geometry.height;
                let modes = 4 * case.ny;
                let profile = match cfg.case_shear(case) {
                    Shear::Constant { amplitude } => ShearProfile::ramped_constant(amplitude, ramp, h, case.nu, modes)?,
                    shear => {
                        let samples: Vec<f64> = (0..case.ny)
                            .map(|j| {
                                let y = (j as f64 + 0.5) * grid.dy();
                                shear.value(y, h) * (y / ramp).min((h - y) / ramp).min(1.0)
                            })
                            .collect();
                        sine_coefficients(&samples, h, case.nu, case.ny)?
                    }
                };
                let times: Vec<f64> = (1..=32).map(|k| cfg.t_end * k as f64 / 32.0).collect();
                let rows = decay_curve(&profile, &times)?;
                decay_fail += rows.iter().filter(|(_, l, r)| l > r).count();
                fs::write(dir.join(format!("decay_{:03}.csv", case.index)), decay_curve_csv(&rows))?;
            }
            if series_fail + decay_fail > 0 {
                return Err(Error::Domain(format!(
                    "prandtl-check: {series_fail} series and {decay_fail} decay violation(s)"
                )));
            }
            Ok(format!(
                "prandtl-check: series bound holds at 61 points, decay bound holds for {} case(s) -> {}",
                cases.len(),
                dir.display()
            ))
        }
        Command::Report { common } => {
            let cfg = load(&common)?;
            let files = report_data(&cfg)?;
            Ok(format!(
                "report: {} data file(s) -> {}",
                files.len(),
                cfg.output_root().join("report").display()
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_blow_up() { 3 } else { 2 })
        }
    }
}
