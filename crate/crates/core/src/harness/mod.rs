//! Experiment sweeps over shear amplitude, viscosity and resolution.
//!
//! A sweep is driven by an [`ExperimentConfig`] and runs in stages that
//! communicate through the output directory (one `case_NNN` directory per
//! case):
//!
//! 1. [`run_sweep`] integrates every case and stores the separation record,
//!    energy ledger, wall vorticity trace, dissipation density and final
//!    field.
//! 2. [`decompose_sweep`] builds the boundary decomposition of every run in
//!    unit-viscosity variables with one common `c0`.
//! 3. [`bounds_sweep`] assembles every term of the energy estimates, splits
//!    the wall pairing when decompositions are present and fits the
//!    constants.
//!
//! # Config schema (version 1)
//!
//! ```json
//! {
//!   "version": 1,
//!   "geometry": {"width": 1.0, "height": 1.0},
//!   "shear": {"kind": "constant", "amplitude": 1.0},
//!   "amplitudes": [0.5, 1.0, 2.0],
//!   "viscosities": [0.01],
//!   "perturbation": {"amplitude": 0.05, "band": [2, 8], "seed": 1},
//!   "t_end": 1.0,
//!   "resolutions": [64, 128],
//!   "output_dir": "runs/sweep"
//! }
//! ```
//!
//! Optional keys: `shear_secondary` (3D only), `nx`, `ramp_width`,
//! `ramp_cells` (4), `c0` (1/256), `cfl` (0.4), `sample_dt` (`t_end/64`),
//! `dt_max`, `max_generation` (3), `depth` (1), `seed` (replaces the
//! perturbation seed), `record_density` (true). Unknown keys are rejected.
//! The `LAYERSEP_OUT` environment variable replaces `output_dir`.

mod bounds;
mod config;
mod decompose;
mod run;
mod scaling;
mod split;
mod stages;

pub use bounds::{
    assemble_combined_bound, constant_shear_terms, general_shear_terms, reduce_to_constant_shear,
    separation_integral, trivial_bound, CombinedBound, ConstantShearTerms, GeneralShearTerms, Reduction,
    TrivialBound,
};
pub use config::{CaseSpec, ExperimentConfig, CONFIG_VERSION, OUTPUT_ENV};
pub use decompose::{
    decompose_common, decompose_run, decompose_with, DecomposeSettings, RescaledRun, RunDecomposition,
};
pub use run::{
    artifact, load_records, read_density, read_record, read_trace, run_case, run_sweep, write_case, CaseOutput,
    CaseSummary, MainSpan, SeparationRecord, SeparationSample, ShearStats, SweepSummary, SUMMARY,
};
pub use scaling::{
    fit_scaling, heat_layer_separation, resolution_stability, ResolutionStability, ScalingFit, ScalingPoint,
};
pub use split::{split_boundary_term, SplitInputs, SplitReport, YoungSplit};
pub use stages::{
    assemble_report, bounds_sweep, decompose_settings, decompose_sweep, read_tilde, report_data, split_for_record,
    BoundReport, DecompositionSummary, StabilityGroup, SweepReport, BOUNDS, BOUNDS_CSV, CUBES, DECOMPOSITION,
    LORENTZ, STATISTIC, TILDE,
};
