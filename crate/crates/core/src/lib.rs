//! Numerical laboratory for viscous channel flow near no-slip walls.
//!
//! The crate couples a 2D marker-and-cell Navier–Stokes solver for a periodic
//! channel with the diagnostics needed to study layer separation from a
//! background shear flow:
//!
//! * [`fields`]: geometry, staggered grids, discrete differential operators
//!   and integral norms.
//! * [`nschannel`]: time integration with energy ledgers and wall vorticity
//!   traces, time mollification and the unit-viscosity rescaling.
//! * [`prandtl`]: the sine-series shear-layer oracle and its decay bounds.
//! * [`czdecomp`]: parabolic dyadic boundary decompositions, averaged
//!   boundary vorticity, maximal functions and weak Lorentz norms.
//! * [`subsolution`]: closed-form relaxed Euler subsolution with linear
//!   energy decay and its layer-separation profile.
//! * [`harness`]: experiment sweeps, bound assembly and constant fitting.
//!
//! Data-parallel loops go through [`par::Exec`]; with the `parallel` feature
//! disabled every loop runs sequentially and results are identical.

pub mod czdecomp;
pub mod error;
pub mod fields;
pub mod harness;
pub mod nschannel;
pub mod par;
pub mod prandtl;
pub mod subsolution;

pub use error::{Error, Result};
