use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{Grid, SquareIntegrable, VelocityField};
use crate::{Error, Result};

use super::{PerturbationSpec, Shear};

#[derive(Clone, Debug)]
pub struct InitialShear {
    pub field: VelocityField,
    /// `||u0 - ubar||_{L^2}`
    pub deviation: f64,
    /// Physical ramp width `ramp_cells * dy`.
    pub ramp_width: f64,
    /// `||noise||_{L^2}`, zero without a perturbation.
    pub perturbation_norm: f64,
}

/// Ramped shear `Ubar(y) s(y) e1` plus optional solenoidal noise.
///
/// `s` rises linearly from 0 on each wall to 1 at distance
/// `ramp_cells * dy` and is sampled at the `u1` faces; the result vanishes on
/// the walls and is exactly divergence free.
pub fn make_initial_shear(
    grid: Grid,
    shear: &Shear,
    ramp_cells: usize,
    perturbation: Option<&PerturbationSpec>,
) -> Result<InitialShear> {
    if ramp_cells < 2 {
        return Err(Error::InvalidConfig(format!("ramp needs at least 2 cells, got {ramp_cells}")));
    }
    if 2 * ramp_cells > grid.ny {
        return Err(Error::InvalidConfig(format!(
            "ramp of {ramp_cells} cells is wider than half of the {} cell channel",
            grid.ny
        )));
    }
    let h = grid.height();
    let delta = ramp_cells as f64 * grid.dy();
    let ramp = |y: f64| (y / delta).min((h - y) / delta).min(1.0);
    let mut field = VelocityField::from_fn(grid, |_, y| shear.value(y, h) * ramp(y), |_, _| 0.0);
    field.enforce_no_slip();
    let mut perturbation_norm = 0.0;
    if let Some(spec) = perturbation {
        let noise = perturbation_field(grid, spec, shear.amplitude())?;
        perturbation_norm = noise.l2_norm();
        field = field.add(&noise)?;
    }
    let deviation = field.sub(&shear.as_field(grid))?.l2_norm();
    Ok(InitialShear {
        field,
        deviation,
        ramp_width: delta,
        perturbation_norm,
    })
}

/// Divergence-free noise from a random stream function on the cell corners,
/// `psi = window(y) sum a_km cos(2 pi k x / W + phase) sin(m pi eta)`, with
/// `window` vanishing within `wall_margin * H` of both walls. The result is
/// scaled to RMS velocity `amplitude * reference`.
pub fn perturbation_field(grid: Grid, spec: &PerturbationSpec, reference: f64) -> Result<VelocityField> {
    spec.validate()?;
    let (nx, ny) = (grid.nx, grid.ny);
    let (lo, hi) = spec.band;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut modes = Vec::new();
    for k in lo..=hi {
        for m in 1..=hi {
            let a: f64 = rng.random_range(-1.0..1.0);
            let phase: f64 = rng.random_range(0.0..2.0 * PI);
            modes.push((k as f64, m as f64, a, phase));
        }
    }
    let margin = spec.wall_margin;
    let window = |eta: f64| {
        if eta <= margin || eta >= 1.0 - margin {
            0.0
        } else {
            (PI * (eta - margin) / (1.0 - 2.0 * margin)).sin().powi(2)
        }
    };
    let mut psi = vec![0.0; (ny + 1) * nx];
    for j in 0..=ny {
        let eta = j as f64 / ny as f64;
        let w = window(eta);
        if w == 0.0 {
            continue;
        }
        for i in 0..nx {
            let x = i as f64 / nx as f64;
            let s: f64 = modes
                .iter()
                .map(|&(k, m, a, ph)| a * (2.0 * PI * k * x + ph).cos() * (m * PI * eta).sin())
                .sum();
            psi[j * nx + i] = w * s;
        }
    }
    let (dx, dy) = (grid.dx(), grid.dy());
    let mut u1 = vec![0.0; ny * nx];
    let mut u2 = vec![0.0; (ny + 1) * nx];
    for j in 0..ny {
        for i in 0..nx {
            u1[j * nx + i] = (psi[(j + 1) * nx + i] - psi[j * nx + i]) / dy;
        }
    }
    for j in 0..=ny {
        for i in 0..nx {
            u2[j * nx + i] = -(psi[j * nx + (i + 1) % nx] - psi[j * nx + i]) / dx;
        }
    }
    let raw = VelocityField::from_parts(grid, u1, u2)?;
    let norm = raw.l2_norm();
    let target = spec.amplitude * reference * grid.geometry.volume().sqrt();
    if norm == 0.0 || target == 0.0 {
        return Ok(VelocityField::zeros(grid));
    }
    Ok(raw.scale(target / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{max_abs_divergence, ChannelGeometry};

    #[test]
    fn rest_state() {
        let g = Grid::unit(16).unwrap();
        let s = make_initial_shear(g, &Shear::constant(0.0), 2, None).unwrap();
        assert_eq!(s.field.l2_norm(), 0.0);
        assert_eq!(s.deviation, 0.0);
    }

    #[test]
    fn ramp_deviation_closed_form() {
        // sum_{m<r} (m + 1/2)^2 = r^3/3 - r/12 per wall
        for &(ny, r, w, a) in &[(256usize, 4usize, 1.0, 1.0), (64, 2, 2.0, 0.5), (128, 16, 1.0, 3.0)] {
            let g = Grid::new(ChannelGeometry::new(w, 1.0).unwrap(), 8, ny).unwrap();
            let s = make_initial_shear(g, &Shear::constant(a), r, None).unwrap();
            let dy = g.dy();
            let rf = r as f64;
            let exact = w * a * a * dy * (2.0 * rf / 3.0 - 1.0 / (6.0 * rf));
            assert!((s.deviation.powi(2) - exact).abs() < 1e-12 * exact, "{} {}", s.deviation.powi(2), exact);
            assert_eq!(max_abs_divergence(&s.field), 0.0);
        }
    }

    #[test]
    fn ramp_bounds() {
        let g = Grid::unit(16).unwrap();
        assert!(make_initial_shear(g, &Shear::constant(1.0), 1, None).is_err());
        assert!(make_initial_shear(g, &Shear::constant(1.0), 9, None).is_err());
        assert!(make_initial_shear(g, &Shear::constant(1.0), 8, None).is_ok());
    }

    #[test]
    fn noise_is_solenoidal_and_scaled() {
        let g = Grid::new(ChannelGeometry::new(2.0, 1.0).unwrap(), 64, 32).unwrap();
        let spec = PerturbationSpec::new(0.05, 3);
        let n = perturbation_field(g, &spec, 2.0).unwrap();
        assert!(max_abs_divergence(&n) < 1e-13);
        assert!((n.l2_norm() - 0.05 * 2.0 * 2f64.sqrt()).abs() < 1e-12);
        // wall rows stay clean
        for i in 0..64 {
            assert_eq!(n.u1_at(i, 0), 0.0);
            assert_eq!(n.u2_at(i, 0), 0.0);
            assert_eq!(n.u2_at(i, 32), 0.0);
        }
        let again = perturbation_field(g, &spec, 2.0).unwrap();
        assert_eq!(n, again);
        let other = perturbation_field(g, &PerturbationSpec::new(0.05, 4), 2.0).unwrap();
        assert_ne!(n, other);
    }
}
