//! Geometry, marker-and-cell grids, discrete operators and integral norms.

mod geometry;
mod io;
mod ops;
mod velocity;

pub use geometry::{ChannelGeometry, Grid, Wall};
pub use io::{read_field, write_field, FieldKind, FieldMeta, StoredField};
pub use ops::{
    curl2d, dissipation_inner, dissipation_norm_sq, divergence, gradient, inner_product, j_of, l2_distance,
    max_abs_divergence, scalar_gradient, wall_normal_derivative, GradientField, SquareIntegrable,
};
pub use velocity::{ScalarField, SpaceTimeField, VelocityField};
