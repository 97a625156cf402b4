use crate::fields::{dissipation_inner, dissipation_norm_sq, j_of, SquareIntegrable, VelocityField, Wall};
use crate::{Error, Result};

use super::{wall_vorticity, Shear};

#[derive(Clone, Copy, Debug)]
pub struct Snapshot<'a> {
    pub t: f64,
    pub field: &'a VelocityField,
}

/// The three terms of the energy balance of `u - ubar` for a static shear
/// `ubar`:
/// `d/dt 1/2 ||u - ubar||^2 = dissipation_term + boundary_term`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyIdentityTerms {
    /// Three-point difference of `1/2 ||u - ubar||^2` at the middle snapshot.
    pub lhs_rate: f64,
    /// `-nu ||grad u||^2 + nu (grad ubar, grad u) - int u1 u2 Ubar'`.
    pub dissipation_term: f64,
    /// `-sum_walls int J[ubar] nu omega dx'`.
    pub boundary_term: f64,
}

impl EnergyIdentityTerms {
    pub fn residual(&self) -> f64 {
        self.lhs_rate - self.dissipation_term - self.boundary_term
    }
}

/// Evaluate the balance at the middle of three consecutive snapshots.
pub fn energy_identity_terms(snapshots: &[Snapshot], shear: &Shear, nu: f64) -> Result<EnergyIdentityTerms> {
    if snapshots.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "the time derivative needs three snapshots, got {}",
            snapshots.len()
        )));
    }
    let (s0, s1, s2) = (snapshots[0], snapshots[1], snapshots[2]);
    if !(s0.t < s1.t && s1.t < s2.t) {
        return Err(Error::InvalidConfig("snapshot times must increase".into()));
    }
    let g = *s1.field.grid();
    let ubar = shear.as_field(g);
    let half_dev = |s: &Snapshot| -> Result<f64> { Ok(0.5 * s.field.sub(&ubar)?.l2_norm_sq()) };
    let (f0, f1, f2) = (half_dev(&s0)?, half_dev(&s1)?, half_dev(&s2)?);
    let (t0, t1, t2) = (s0.t, s1.t, s2.t);
    let lhs_rate = f0 * (t1 - t2) / ((t0 - t1) * (t0 - t2))
        + f1 * (2.0 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2))
        + f2 * (t1 - t0) / ((t2 - t0) * (t2 - t1));

    let u = s1.field;
    let (nx, ny) = (g.nx, g.ny);
    let h = g.height();
    let slope = shear.derivative(h);
    let mut production = 0.0;
    if slope != 0.0 {
        for j in 0..ny {
            for i in 0..nx {
                let c1 = 0.5 * (u.u1_at(i, j) + u.u1_at((i + 1) % nx, j));
                let c2 = 0.5 * (u.u2_at(i, j) + u.u2_at(i, j + 1));
                production += c1 * c2 * slope;
            }
        }
        production *= g.cell_area();
    }
    let dissipation_term = -nu * dissipation_norm_sq(u) + nu * dissipation_inner(&ubar, u)? - production;

    let mut boundary_term = 0.0;
    for wall in Wall::BOTH {
        let j = j_of([shear.wall_value(wall, h), 0.0], wall);
        let omega: f64 = wall_vorticity(u, wall).iter().sum::<f64>() * g.dx();
        boundary_term -= j * nu * omega;
    }
    Ok(EnergyIdentityTerms {
        lhs_rate,
        dissipation_term,
        boundary_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    #[test]
    fn slip_state_and_rest_state() {
        let g = Grid::unit(16).unwrap();
        let shear = Shear::constant(1.5);
        let ubar = shear.as_field(g);
        let snaps = [0.0, 0.1, 0.2].map(|t| Snapshot { t, field: &ubar });
        let terms = energy_identity_terms(&snaps, &shear, 0.1).unwrap();
        assert!(terms.lhs_rate.abs() < 1e-14);
        assert!(terms.dissipation_term.abs() < 1e-12);
        assert!(terms.boundary_term.abs() < 1e-12);

        let zero = VelocityField::zeros(g);
        let snaps = [0.0, 0.1, 0.2].map(|t| Snapshot { t, field: &zero });
        let terms = energy_identity_terms(&snaps, &shear, 0.1).unwrap();
        assert_eq!((terms.lhs_rate.abs(), terms.dissipation_term, terms.boundary_term), (0.0, 0.0, 0.0));
    }

    #[test]
    fn needs_three_snapshots() {
        let g = Grid::unit(8).unwrap();
        let zero = VelocityField::zeros(g);
        let snaps = [Snapshot { t: 0.0, field: &zero }, Snapshot { t: 1.0, field: &zero }];
        assert!(matches!(
            energy_identity_terms(&snaps, &Shear::constant(1.0), 0.1),
            Err(Error::InsufficientData(_))
        ));
    }
}
