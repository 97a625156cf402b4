//! Incompressible Navier–Stokes in a periodic channel with no-slip walls.
//!
//! The solver advances a marker-and-cell field with a low-storage
//! three-stage Runge–Kutta / Crank–Nicolson scheme: energy-conserving
//! advection is explicit, viscosity is implicit in both directions (FFT in
//! `x`, tridiagonal in `y`), and every stage ends with an exact discrete
//! projection. Runs record an energy ledger and the wall vorticity trace.

mod config;
mod energy;
mod initial;
mod ledger;
mod rescale;
mod solver;
mod spectral;
mod trace;

pub use config::{PerturbationSpec, Shear, SolverConfig};
pub use energy::{energy_identity_terms, EnergyIdentityTerms, Snapshot};
pub use initial::{make_initial_shear, perturbation_field, InitialShear};
pub use ledger::{EnergyLedger, LedgerRecord};
pub use rescale::{rescale_density, rescale_snapshot, rescale_trace};
pub use solver::{project, step, ChannelSolver, RunOutput, Sample, StepReport};
pub use trace::{time_mollify, wall_vorticity, BoundaryVorticityTrace, TimeSeries};
