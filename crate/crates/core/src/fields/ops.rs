use crate::Result;

use super::{ScalarField, VelocityField, Wall};

/// Midpoint-rule `L^2` norms on the staggered control volumes.
pub trait SquareIntegrable {
    fn l2_norm_sq(&self) -> f64;

    fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }
}

impl SquareIntegrable for VelocityField {
    /// `u1` faces own full cells; interior `u2` faces own full cells and the
    /// wall rows own half cells.
    fn l2_norm_sq(&self) -> f64 {
        velocity_inner(self, self)
    }
}

impl SquareIntegrable for ScalarField {
    fn l2_norm_sq(&self) -> f64 {
        self.data().iter().map(|v| v * v).sum::<f64>() * self.grid().cell_area()
    }
}

fn velocity_inner(a: &VelocityField, b: &VelocityField) -> f64 {
    let g = a.grid();
    let nx = g.nx;
    let ny = g.ny;
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let s1 = dot(a.u1(), b.u1());
    let (a2, b2) = (a.u2(), b.u2());
    let interior = dot(&a2[nx..ny * nx], &b2[nx..ny * nx]);
    let walls = dot(&a2[..nx], &b2[..nx]) + dot(&a2[ny * nx..], &b2[ny * nx..]);
    (s1 + interior + 0.5 * walls) * g.cell_area()
}

/// `L^2` inner product of two velocity fields on the same grid.
pub fn inner_product(a: &VelocityField, b: &VelocityField) -> Result<f64> {
    a.grid().check_same(b.grid())?;
    Ok(velocity_inner(a, b))
}

/// `||a - b||_{L^2}`.
pub fn l2_distance(a: &VelocityField, b: &VelocityField) -> Result<f64> {
    Ok(a.sub(b)?.l2_norm())
}

/// Cell-centered velocity gradient; entry `dj_ui` approximates `d u_i / d x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub d1u1: ScalarField,
    pub d2u1: ScalarField,
    pub d1u2: ScalarField,
    pub d2u2: ScalarField,
}

impl GradientField {
    /// Pointwise `|grad u|^2`.
    pub fn frobenius_sq(&self) -> ScalarField {
        let data = (0..self.d1u1.data().len())
            .map(|n| {
                self.d1u1.data()[n].powi(2)
                    + self.d2u1.data()[n].powi(2)
                    + self.d1u2.data()[n].powi(2)
                    + self.d2u2.data()[n].powi(2)
            })
            .collect();
        ScalarField::from_vec(*self.d1u1.grid(), data).expect("same grid")
    }
}

/// Cell-centered gradient.
///
/// `d1u1` and `d2u2` are compact differences across each cell. `d2u1` is the
/// centered difference of the cell-averaged `u1`; in the first and last rows
/// it is the one-sided quadratic through the wall value, the two nearest
/// cell averages, evaluated at the cell center: `(-4 w + 3 a + b) / (3 dy)`.
/// `d1u2` is the periodic centered difference of the cell-averaged `u2`.
pub fn gradient(u: &VelocityField) -> GradientField {
    let g = *u.grid();
    let (nx, ny) = (g.nx, g.ny);
    let (dx, dy) = (g.dx(), g.dy());
    let mut d1u1 = vec![0.0; nx * ny];
    let mut d2u1 = vec![0.0; nx * ny];
    let mut d1u2 = vec![0.0; nx * ny];
    let mut d2u2 = vec![0.0; nx * ny];
    let u1 = u.u1();
    let u2 = u.u2();
    let ip = |i: usize| (i + 1) % nx;
    let im = |i: usize| (i + nx - 1) % nx;
    let c1 = |i: usize, j: usize| 0.5 * (u1[j * nx + i] + u1[j * nx + ip(i)]);
    let c2 = |i: usize, j: usize| 0.5 * (u2[j * nx + i] + u2[(j + 1) * nx + i]);
    let wb = u.wall_tangential(Wall::Bottom);
    let wt = u.wall_tangential(Wall::Top);
    for j in 0..ny {
        for i in 0..nx {
            let n = j * nx + i;
            d1u1[n] = (u1[j * nx + ip(i)] - u1[n]) / dx;
            d2u2[n] = (u2[(j + 1) * nx + i] - u2[n]) / dy;
            d1u2[n] = (c2(ip(i), j) - c2(im(i), j)) / (2.0 * dx);
            d2u1[n] = if j == 0 {
                let w = 0.5 * (wb[i] + wb[ip(i)]);
                (-4.0 * w + 3.0 * c1(i, 0) + c1(i, 1)) / (3.0 * dy)
            } else if j == ny - 1 {
                let w = 0.5 * (wt[i] + wt[ip(i)]);
                -(-4.0 * w + 3.0 * c1(i, ny - 1) + c1(i, ny - 2)) / (3.0 * dy)
            } else {
                (c1(i, j + 1) - c1(i, j - 1)) / (2.0 * dy)
            };
        }
    }
    let mk = |d| ScalarField::from_vec(g, d).expect("grid-sized");
    GradientField {
        d1u1: mk(d1u1),
        d2u1: mk(d2u1),
        d1u2: mk(d1u2),
        d2u2: mk(d2u2),
    }
}

/// Scalar vorticity `d1 u2 - d2 u1` at cell centers, from [`gradient`].
pub fn curl2d(u: &VelocityField) -> ScalarField {
    let gr = gradient(u);
    let data = gr
        .d1u2
        .data()
        .iter()
        .zip(gr.d2u1.data())
        .map(|(a, b)| a - b)
        .collect();
    ScalarField::from_vec(*u.grid(), data).expect("grid-sized")
}

/// `d u1 / d y` on a wall at `x = i dx`, from the one-sided quadratic through
/// the wall value and the two nearest `u1` samples: `(-8 w + 9 a - b) / (3 dy)`
/// at the bottom, mirrored at the top.
pub fn wall_normal_derivative(u: &VelocityField, wall: Wall) -> Vec<f64> {
    let g = u.grid();
    let (nx, ny, dy) = (g.nx, g.ny, g.dy());
    let w = u.wall_tangential(wall);
    (0..nx)
        .map(|i| match wall {
            Wall::Bottom => (-8.0 * w[i] + 9.0 * u.u1_at(i, 0) - u.u1_at(i, 1)) / (3.0 * dy),
            Wall::Top => {
                -(-8.0 * w[i] + 9.0 * u.u1_at(i, ny - 1) - u.u1_at(i, ny - 2)) / (3.0 * dy)
            }
        })
        .collect()
}

/// `J[w] = n^perp . w` with `n^perp` the counter-clockwise rotation of the
/// outer normal: `e1` on the bottom wall, `-e1` on the top wall.
///
/// With this convention the energy balance of `u - ubar` for a shear `ubar`
/// reads `d/dt 1/2 |u - ubar|^2 = ... - sum_walls int J[ubar] nu omega`.
pub fn j_of(w: [f64; 2], wall: Wall) -> f64 {
    match wall {
        Wall::Bottom => w[0],
        Wall::Top => -w[0],
    }
}

/// Cell-centered discrete divergence.
pub fn divergence(u: &VelocityField) -> ScalarField {
    let g = *u.grid();
    let (nx, ny, dx, dy) = (g.nx, g.ny, g.dx(), g.dy());
    let u1 = u.u1();
    let u2 = u.u2();
    let mut d = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let n = j * nx + i;
            d[n] = (u1[j * nx + (i + 1) % nx] - u1[n]) / dx + (u2[n + nx] - u2[n]) / dy;
        }
    }
    ScalarField::from_vec(g, d).expect("grid-sized")
}

/// `max |div u|` scaled by `max(|u|) / min(dx, dy)`, i.e. relative to the
/// size of a single difference quotient.
pub fn max_abs_divergence(u: &VelocityField) -> f64 {
    let g = u.grid();
    let (a, b) = u.max_abs();
    let scale = a.max(b) / g.dx().min(g.dy());
    let d = divergence(u).max_abs();
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// Face-centered gradient of a cell-centered scalar, the negative adjoint of
/// [`divergence`] on fields with zero wall-normal velocity. Wall rows of `u2`
/// are zero.
pub fn scalar_gradient(f: &ScalarField) -> VelocityField {
    let g = *f.grid();
    let (nx, ny, dx, dy) = (g.nx, g.ny, g.dx(), g.dy());
    let p = f.data();
    let mut u1 = vec![0.0; nx * ny];
    let mut u2 = vec![0.0; nx * (ny + 1)];
    for j in 0..ny {
        for i in 0..nx {
            u1[j * nx + i] = (p[j * nx + i] - p[j * nx + (i + nx - 1) % nx]) / dx;
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            u2[j * nx + i] = (p[j * nx + i] - p[(j - 1) * nx + i]) / dy;
        }
    }
    VelocityField::from_parts(g, u1, u2).expect("grid-sized")
}

/// Staggered gradient energy `||grad u||_h^2`.
///
/// Normal derivatives live at cell centers; shear derivatives live at cell
/// corners, where wall corners use the linear ghost `2 w - u1` and carry half
/// weight. For fields with zero wall values this is exactly `-<u, L u>` for
/// the discrete vector Laplacian used by the solver, so it is the quantity
/// the energy ledger integrates.
pub fn dissipation_norm_sq(u: &VelocityField) -> f64 {
    let g = u.grid();
    let (nx, ny, dx, dy) = (g.nx, g.ny, g.dx(), g.dy());
    let u1 = u.u1();
    let u2 = u.u2();
    let mut centers = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let n = j * nx + i;
            centers += ((u1[j * nx + (i + 1) % nx] - u1[n]) / dx).powi(2);
            centers += ((u2[n + nx] - u2[n]) / dy).powi(2);
        }
    }
    let mut corners = 0.0;
    let mut wall_corners = 0.0;
    let wb = u.wall_tangential(Wall::Bottom);
    let wt = u.wall_tangential(Wall::Top);
    for i in 0..nx {
        wall_corners += (2.0 * (u1[i] - wb[i]) / dy).powi(2);
        wall_corners += (2.0 * (wt[i] - u1[(ny - 1) * nx + i]) / dy).powi(2);
        for j in [0, ny] {
            wall_corners += ((u2[j * nx + i] - u2[j * nx + (i + nx - 1) % nx]) / dx).powi(2);
        }
        for j in 1..ny {
            corners += ((u1[j * nx + i] - u1[(j - 1) * nx + i]) / dy).powi(2);
            corners += ((u2[j * nx + i] - u2[j * nx + (i + nx - 1) % nx]) / dx).powi(2);
        }
    }
    (centers + corners + 0.5 * wall_corners) * dx * dy
}

/// Polarized staggered gradient pairing `(grad a, grad b)_h`.
pub fn dissipation_inner(a: &VelocityField, b: &VelocityField) -> Result<f64> {
    let plus = a.add(b)?;
    let minus = a.sub(b)?;
    Ok(0.25 * (dissipation_norm_sq(&plus) - dissipation_norm_sq(&minus)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ChannelGeometry, Grid};
    use crate::Error;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit(n: usize) -> Grid {
        Grid::unit(n).unwrap()
    }

    #[test]
    fn norms_of_simple_fields() {
        let g = unit(16);
        assert_eq!(VelocityField::zeros(g).l2_norm(), 0.0);
        let c = VelocityField::from_fn(g, |_, _| 3.0, |_, _| 0.0);
        assert!((c.l2_norm() - 3.0).abs() < 1e-13);
        let s = ScalarField::from_fn(g, |_, _| -2.0);
        assert!((s.l2_norm() - 2.0).abs() < 1e-13);
        // second component alone, including the half-weighted wall rows
        let v = VelocityField::from_fn(g, |_, _| 0.0, |_, _| 1.5);
        assert!((v.l2_norm() - 1.5).abs() < 1e-13);
    }

    #[test]
    fn norm_of_sine() {
        let g = unit(256);
        let f = ScalarField::from_fn(g, |x, _| (2.0 * PI * x).sin());
        assert!((f.l2_norm() - 0.5f64.sqrt()).abs() < 1e-3);
        let u = VelocityField::from_fn(g, |x, _| (2.0 * PI * x).sin(), |_, _| 0.0);
        assert!((u.l2_norm() - 0.5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn distance_requires_matching_grids() {
        let a = VelocityField::zeros(unit(8));
        let b = VelocityField::zeros(unit(16));
        assert!(matches!(l2_distance(&a, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn gradient_of_constant_and_shear() {
        let g = unit(8);
        let c = VelocityField::from_fn(g, |_, _| 2.0, |_, _| -1.0);
        let gr = gradient(&c);
        for f in [&gr.d1u1, &gr.d2u1, &gr.d1u2, &gr.d2u2] {
            assert!(f.max_abs() < 1e-12);
        }
        let s = VelocityField::from_fn(g, |_, y| y, |_, _| 0.0);
        let gr = gradient(&s);
        assert!(gr.d2u1.data().iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(gr.d1u1.max_abs() < 1e-12 && gr.d1u2.max_abs() < 1e-12 && gr.d2u2.max_abs() < 1e-12);
    }

    #[test]
    fn gradient_is_second_order() {
        let err = |n: usize| {
            let g = unit(n);
            let u = VelocityField::from_fn(g, |x, _| (2.0 * PI * x).sin(), |_, _| 0.0);
            let gr = gradient(&u);
            let mut e = 0.0f64;
            for j in 0..n {
                for i in 0..n {
                    let exact = 2.0 * PI * (2.0 * PI * g.x_center(i)).cos();
                    e = e.max((gr.d1u1.at(i, j) - exact).abs());
                }
            }
            e
        };
        let (e1, e2) = (err(32), err(64));
        assert!((e1 / e2).log2() > 1.9, "{e1} {e2}");
    }

    #[test]
    fn wall_rows_are_second_order() {
        let err = |n: usize| {
            let g = unit(n);
            let u = VelocityField::from_fn(g, |_, y| (PI * y).sin() + y * y, |_, _| 0.0);
            let gr = gradient(&u);
            let exact = |y: f64| PI * (PI * y).cos() + 2.0 * y;
            let b = (gr.d2u1.at(0, 0) - exact(g.y_center(0))).abs();
            let t = (gr.d2u1.at(0, n - 1) - exact(g.y_center(n - 1))).abs();
            let wb = (wall_normal_derivative(&u, Wall::Bottom)[0] - exact(0.0)).abs();
            let wt = (wall_normal_derivative(&u, Wall::Top)[0] - exact(1.0)).abs();
            b.max(t).max(wb).max(wt)
        };
        let (e1, e2) = (err(32), err(64));
        assert!((e1 / e2).log2() > 1.8, "{e1} {e2}");
    }

    #[test]
    fn rigid_rotation_has_vorticity_two() {
        let g = unit(16);
        let u = VelocityField::from_fn(g, |_, y| -y, |x, _| x);
        let w = curl2d(&u);
        // x is not periodic for this field, so skip the seam columns
        for j in 0..16 {
            for i in 1..15 {
                assert!((w.at(i, j) - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shear_vorticity() {
        let g = unit(32);
        let u = VelocityField::from_fn(g, |_, y| y * y, |_, _| 0.0);
        let w = curl2d(&u);
        for j in 0..32 {
            assert!((w.at(3, j) + 2.0 * g.y_center(j)).abs() < 1e-10);
        }
    }

    #[test]
    fn j_convention() {
        assert_eq!(j_of([2.0, 0.0], Wall::Bottom), 2.0);
        assert_eq!(j_of([2.0, 0.0], Wall::Top), -2.0);
        assert_eq!(j_of([0.0, 0.0], Wall::Top), 0.0);
    }

    #[test]
    fn curl_of_gradient_vanishes_at_second_order() {
        let phi = |x: f64, y: f64| (2.0 * PI * x).sin() * (PI * y).cos() + (4.0 * PI * x).cos() * y;
        let dphi1 = |x: f64, y: f64| {
            2.0 * PI * (2.0 * PI * x).cos() * (PI * y).cos() - 4.0 * PI * (4.0 * PI * x).sin() * y
        };
        let dphi2 = |x: f64, y: f64| -PI * (2.0 * PI * x).sin() * (PI * y).sin() + (4.0 * PI * x).cos();
        let _ = phi;
        let err = |n: usize| {
            let u = VelocityField::from_fn(unit(n), dphi1, dphi2);
            curl2d(&u).max_abs()
        };
        let (e1, e2) = (err(32), err(64));
        assert!(e2 < 0.5 && (e1 / e2).log2() > 1.8, "{e1} {e2}");
    }

    #[test]
    fn sbp_norm_matches_laplacian_pairing() {
        // -<u, L u> computed with an independent stencil loop
        let g = Grid::new(ChannelGeometry::new(2.0, 1.0).unwrap(), 12, 8).unwrap();
        let mut u = VelocityField::from_fn(
            g,
            |x, y| (PI * x).sin() * y * (1.0 - y) + 0.3 * y,
            |x, y| (PI * x).cos() * (PI * y).sin(),
        );
        u.enforce_no_slip();
        let (nx, ny, dx, dy) = (g.nx, g.ny, g.dx(), g.dy());
        let mut pairing = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                let c = u.u1_at(i, j);
                let lx = (u.u1_at((i + 1) % nx, j) - 2.0 * c + u.u1_at((i + nx - 1) % nx, j)) / (dx * dx);
                let below = if j == 0 { -c } else { u.u1_at(i, j - 1) };
                let above = if j == ny - 1 { -c } else { u.u1_at(i, j + 1) };
                let ly = (above - 2.0 * c + below) / (dy * dy);
                pairing += c * (lx + ly);
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                let c = u.u2_at(i, j);
                let lx = (u.u2_at((i + 1) % nx, j) - 2.0 * c + u.u2_at((i + nx - 1) % nx, j)) / (dx * dx);
                let ly = (u.u2_at(i, j + 1) - 2.0 * c + u.u2_at(i, j - 1)) / (dy * dy);
                pairing += c * (lx + ly);
            }
        }
        pairing *= dx * dy;
        let n = dissipation_norm_sq(&u);
        assert!((n + pairing).abs() < 1e-10 * n, "{n} {pairing}");
    }

    proptest! {
        #[test]
        fn summation_by_parts(seed in proptest::collection::vec(-1.0f64..1.0, 8 * 6 + 8 * 7)) {
            let g = Grid::new(ChannelGeometry::new(1.5, 1.0).unwrap(), 8, 6).unwrap();
            let f = ScalarField::from_vec(g, seed[..48].to_vec()).unwrap();
            let mut w = VelocityField::from_parts(g, seed[..48].iter().rev().cloned().collect(), seed[48..].to_vec()).unwrap();
            w.enforce_no_slip();
            let lhs = inner_product(&scalar_gradient(&f), &w).unwrap();
            let div = divergence(&w);
            let rhs: f64 = f.data().iter().zip(div.data()).map(|(a, b)| a * b).sum::<f64>() * g.cell_area();
            prop_assert!((lhs + rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn norm_is_homogeneous(c in -50.0f64..50.0, a in -1.0f64..1.0, k in 1usize..4) {
            let g = unit(8);
            let u = VelocityField::from_fn(g, |x, y| a + (2.0 * PI * k as f64 * x).sin() * y, |x, _| x);
            let lhs = u.scale(c).l2_norm();
            let rhs = c.abs() * u.l2_norm();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(1.0));
        }
    }
}
