use serde::{Deserialize, Serialize};

use crate::fields::Wall;
use crate::{Error, Result};

/// Base scales of the parabolic dyadic decomposition of `(0, L) x Omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseScales {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    /// `min(sqrt(L), W/2, H/2)`
    pub r0: f64,
    pub l0: f64,
    pub w0: f64,
    pub h0: f64,
    pub k_l: u32,
    pub k_w: u32,
    pub k_h: u32,
}

impl BaseScales {
    /// Smallest nonnegative `k_L, k_W, k_H` with `L = 4^k_L L0`,
    /// `W = 2 * 2^k_W W0`, `H = 2 * 2^k_H H0` and
    /// `R0 <= sqrt(L0), W0, H0 <= 2 R0`.
    pub fn new(length: f64, width: f64, height: f64) -> Result<Self> {
        for (name, v) in [("time span", length), ("width", width), ("height", height)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        let r0 = length.sqrt().min(0.5 * width).min(0.5 * height);
        let fits = |v: f64| v <= 2.0 * r0 * (1.0 + 1e-12);
        let smallest = |start: f64, factor: f64, transform: &dyn Fn(f64) -> f64| -> Option<(u32, f64)> {
            let mut v = start;
            for k in 0..=200u32 {
                if fits(transform(v)) {
                    return Some((k, v));
                }
                v /= factor;
            }
            None
        };
        let (k_l, l0) = smallest(length, 4.0, &|v| v.sqrt())
            .ok_or_else(|| Error::Construction(format!("no admissible k_L for L = {length}")))?;
        let (k_w, w0) = smallest(0.5 * width, 2.0, &|v| v)
            .ok_or_else(|| Error::Construction(format!("no admissible k_W for W = {width}")))?;
        let (k_h, h0) = smallest(0.5 * height, 2.0, &|v| v)
            .ok_or_else(|| Error::Construction(format!("no admissible k_H for H = {height}")))?;
        let scales = BaseScales {
            length,
            width,
            height,
            r0,
            l0,
            w0,
            h0,
            k_l,
            k_w,
            k_h,
        };
        if !scales.brackets() {
            return Err(Error::Construction(format!("base scales do not bracket R0: {scales:?}")));
        }
        Ok(scales)
    }

    /// `R0 <= sqrt(L0), W0, H0 <= 2 R0` up to rounding.
    pub fn brackets(&self) -> bool {
        let tol = 1e-12;
        [self.l0.sqrt(), self.w0, self.h0]
            .iter()
            .all(|&v| v >= self.r0 * (1.0 - tol) && v <= 2.0 * self.r0 * (1.0 + tol))
    }

    /// Number of cubes in the coarsest family `Q^0`.
    pub fn coarse_count(&self) -> u128 {
        (1u128 << (2 * self.k_l)) * (1u128 << (self.k_w + 1)) * (1u128 << (self.k_h + 1))
    }

    /// Boundary cubes per wall in one time layer of generation `k`.
    pub fn cubes_across(&self, generation: u32) -> usize {
        1usize << (self.k_w + 1 + generation)
    }

    pub fn cube_length(&self, generation: u32) -> f64 {
        self.l0 * 0.25f64.powi(generation as i32)
    }

    pub fn cube_width(&self, generation: u32) -> f64 {
        self.w0 * 0.5f64.powi(generation as i32)
    }

    pub fn cube_height(&self, generation: u32) -> f64 {
        self.h0 * 0.5f64.powi(generation as i32)
    }

    pub fn cube_scale(&self, generation: u32) -> f64 {
        self.r0 * 0.5f64.powi(generation as i32)
    }

    /// Boundary cube of generation `k` on `wall` occupying `(s, s + l)` in
    /// time and the `m`-th box across the wall.
    pub fn cube(&self, generation: u32, wall: Wall, s: f64, m: usize) -> ParabolicCube {
        let l = self.cube_length(generation);
        let w = self.cube_width(generation);
        ParabolicCube {
            generation,
            wall,
            s,
            t: s + l,
            center: (m as f64 + 0.5) * w,
            w,
            h: self.cube_height(generation),
            r: self.cube_scale(generation),
        }
    }
}

/// A boundary cube `(s, t) x B_{w/2}(x') x (0, h)` (or the mirror strip at
/// the top wall).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicCube {
    pub generation: u32,
    pub wall: Wall,
    pub s: f64,
    pub t: f64,
    pub center: f64,
    pub w: f64,
    pub h: f64,
    pub r: f64,
}

/// Space-time box `(t0, t1) x (x0, x1) x (y0, y1)`; `x` is unwrapped and
/// understood periodically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn volume(&self) -> f64 {
        (self.t1 - self.t0) * (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

impl ParabolicCube {
    pub fn length(&self) -> f64 {
        self.t - self.s
    }

    /// Measure of the wall face `(s, t) x B_{w/2}(x')`.
    pub fn face_measure(&self) -> f64 {
        self.length() * self.w
    }

    pub fn volume(&self) -> f64 {
        self.length() * self.w * self.h
    }

    /// The doubled cube `2Q = (t - 2l, t) x B_w(x') x (0, 2h)` with its time
    /// range clamped to `t >= 0`; the flag tells whether clamping happened.
    pub fn enlarged(&self, height: f64) -> (Window, bool) {
        let t0 = self.t - 2.0 * self.length();
        let (y0, y1) = match self.wall {
            Wall::Bottom => (0.0, 2.0 * self.h),
            Wall::Top => (height - 2.0 * self.h, height),
        };
        let window = Window {
            t0: t0.max(0.0),
            t1: self.t,
            x0: self.center - self.w,
            x1: self.center + self.w,
            y0,
            y1,
        };
        (window, t0 < -1e-12 * self.t.abs().max(1.0))
    }

    /// The cube itself as a window.
    pub fn window(&self, height: f64) -> Window {
        let (y0, y1) = match self.wall {
            Wall::Bottom => (0.0, self.h),
            Wall::Top => (height - self.h, height),
        };
        Window {
            t0: self.s,
            t1: self.t,
            x0: self.center - 0.5 * self.w,
            x1: self.center + 0.5 * self.w,
            y0,
            y1,
        }
    }

    /// The 8 boundary children: 4 in time, 2 across the wall, lower half in
    /// height. Ordered by time, then position.
    pub fn children(&self) -> Vec<ParabolicCube> {
        let l = 0.25 * self.length();
        let w = 0.5 * self.w;
        let mut out = Vec::with_capacity(8);
        for a in 0..4 {
            for b in 0..2 {
                out.push(ParabolicCube {
                    generation: self.generation + 1,
                    wall: self.wall,
                    s: self.s + a as f64 * l,
                    t: self.s + (a + 1) as f64 * l,
                    center: self.center - 0.5 * self.w + (b as f64 + 0.5) * w,
                    w,
                    h: 0.5 * self.h,
                    r: 0.5 * self.r,
                });
            }
        }
        out
    }

    /// Whether the wall point `(t, x)` lies in the closed face, with `x`
    /// taken modulo the channel period.
    pub fn contains(&self, t: f64, x: f64, period: f64) -> bool {
        if t < self.s || t > self.t {
            return false;
        }
        let d = (x - self.center).rem_euclid(period);
        let d = d.min(period - d);
        d <= 0.5 * self.w * (1.0 + 1e-12)
    }

    /// `r <= sqrt(l), w, h <= 2r` up to rounding.
    pub fn brackets(&self) -> bool {
        let tol = 1e-12;
        [self.length().sqrt(), self.w, self.h]
            .iter()
            .all(|&v| v >= self.r * (1.0 - tol) && v <= 2.0 * self.r * (1.0 + tol))
    }
}

/// The graded initial selection: for `k = 1..=depth` every generation-`k`
/// cube in `[4^-k L0, 4^(1-k) L0]`, the generation-0 cubes for `t >= L0`,
/// and generation-`depth` cubes filling the remaining layer
/// `(0, 4^-depth L0)` next to the initial time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialPartition {
    pub scales: BaseScales,
    pub depth: u32,
    /// Boundary cubes of the selection, both walls.
    pub cubes: Vec<ParabolicCube>,
}

impl InitialPartition {
    /// Cubes of the coarsest family `Q^0` that touch a wall.
    pub fn coarse_boundary_cubes(&self) -> Vec<ParabolicCube> {
        let sc = &self.scales;
        let layers = 1usize << (2 * sc.k_l);
        let mut out = Vec::new();
        for wall in Wall::BOTH {
            for n in 0..layers {
                for m in 0..sc.cubes_across(0) {
                    out.push(sc.cube(0, wall, n as f64 * sc.l0, m));
                }
            }
        }
        out
    }
}

pub fn initial_partition(length: f64, width: f64, height: f64, depth: u32) -> Result<InitialPartition> {
    let scales = BaseScales::new(length, width, height)?;
    let mut cubes = Vec::new();
    for wall in Wall::BOTH {
        let mut push_layer = |generation: u32, s: f64| {
            for m in 0..scales.cubes_across(generation) {
                cubes.push(scales.cube(generation, wall, s, m));
            }
        };
        push_layer(depth, 0.0);
        for k in (1..=depth).rev() {
            let l = scales.cube_length(k);
            for a in 1..4 {
                push_layer(k, a as f64 * l);
            }
        }
        let layers = 1usize << (2 * scales.k_l);
        for n in 1..layers {
            push_layer(0, n as f64 * scales.l0);
        }
    }
    Ok(InitialPartition { scales, depth, cubes })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every admissible triple with exponents up to 60, by brute force.
    fn admissible(length: f64, width: f64, height: f64) -> Vec<(u32, u32, u32)> {
        let r0 = length.sqrt().min(width / 2.0).min(height / 2.0);
        let ok = |v: f64| v >= r0 * (1.0 - 1e-12) && v <= 2.0 * r0 * (1.0 + 1e-12);
        let mut out = Vec::new();
        for a in 0..=60u32 {
            for b in 0..=60u32 {
                for c in 0..=60u32 {
                    let l0 = length / 4f64.powi(a as i32);
                    let w0 = width / 2.0 / 2f64.powi(b as i32);
                    let h0 = height / 2.0 / 2f64.powi(c as i32);
                    if ok(l0.sqrt()) && ok(w0) && ok(h0) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn unit_box_scales() {
        let s = BaseScales::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.r0, 0.5);
        assert_eq!((s.k_l, s.k_w, s.k_h), (0, 0, 0));
        assert_eq!((s.l0, s.w0, s.h0), (1.0, 0.5, 0.5));
        let all = admissible(1.0, 1.0, 1.0);
        assert!(all.contains(&(0, 0, 0)) && all.contains(&(1, 0, 0)));
    }

    #[test]
    fn chosen_triple_is_the_smallest_admissible() {
        for &(l, w, h) in &[(1.0, 1.0, 1.0), (50.0, 100.0, 100.0), (0.01, 3.0, 1.0), (7.0, 0.3, 2.5)] {
            let s = BaseScales::new(l, w, h).unwrap();
            let all = admissible(l, w, h);
            assert!(all.contains(&(s.k_l, s.k_w, s.k_h)));
            assert!(all.iter().all(|&(a, b, c)| a >= s.k_l && b >= s.k_w && c >= s.k_h));
        }
    }

    #[test]
    fn long_channel_uses_coarse_cubes_after_l0() {
        let p = initial_partition(40.0, 1.0, 1.0, 2).unwrap();
        let s = p.scales;
        assert_eq!(s.r0, 0.5);
        assert!(s.k_l > 0 && s.l0 <= 1.0);
        let coarse = p.cubes.iter().filter(|c| c.generation == 0).count();
        assert_eq!(coarse, 2 * s.cubes_across(0) * ((1 << (2 * s.k_l)) - 1));
        assert!(p.cubes.iter().filter(|c| c.s >= s.l0).all(|c| c.generation == 0));
    }

    #[test]
    fn scaling_all_lengths_is_covariant() {
        let a = initial_partition(1.0, 3.0, 1.5, 3).unwrap();
        let b = initial_partition(4.0, 6.0, 3.0, 3).unwrap();
        assert_eq!(
            (a.scales.k_l, a.scales.k_w, a.scales.k_h),
            (b.scales.k_l, b.scales.k_w, b.scales.k_h)
        );
        assert_eq!(a.cubes.len(), b.cubes.len());
        for (p, q) in a.cubes.iter().zip(&b.cubes) {
            assert_eq!(p.generation, q.generation);
            assert!((4.0 * p.s - q.s).abs() < 1e-12);
            assert!((2.0 * p.center - q.center).abs() < 1e-12);
            assert!((2.0 * p.r - q.r).abs() < 1e-12);
        }
    }

    #[test]
    fn selection_covers_the_wall_once() {
        for depth in 0..5 {
            let p = initial_partition(3.0, 2.0, 0.7, depth).unwrap();
            let total: f64 = p.cubes.iter().map(|c| c.face_measure()).sum();
            assert!((total - 3.0 * 2.0 * 2.0).abs() < 1e-12 * 12.0);
            assert!(p.cubes.iter().all(|c| c.brackets()));
            for c in &p.cubes {
                let (_, clamped) = c.enlarged(0.7);
                assert_eq!(clamped, c.s == 0.0);
            }
        }
    }

    #[test]
    fn graded_bands_follow_the_selection_rule() {
        let p = initial_partition(1.0, 1.0, 1.0, 4).unwrap();
        for c in p.cubes.iter().filter(|c| c.s > 0.0 && c.generation > 0) {
            let k = c.generation as i32;
            assert!(c.s >= 0.25f64.powi(k) - 1e-15 && c.t <= 0.25f64.powi(k - 1) + 1e-15);
        }
    }

    #[test]
    fn children_tile_the_parent_face() {
        let s = BaseScales::new(1.0, 1.0, 1.0).unwrap();
        let c = s.cube(1, Wall::Top, 0.25, 1);
        let kids = c.children();
        assert_eq!(kids.len(), 8);
        let total: f64 = kids.iter().map(|k| k.face_measure()).sum();
        assert!((total - c.face_measure()).abs() < 1e-15);
        assert!(kids.iter().all(|k| k.brackets() && k.generation == 2));
        assert!(kids.iter().all(|k| k.contains(0.5 * (k.s + k.t), k.center, 1.0)));
        assert!(kids.iter().all(|k| c.contains(k.s, k.center, 1.0)));
    }

    #[test]
    fn doubled_cube_stays_inside_the_channel() {
        let p = initial_partition(2.0, 1.0, 1.0, 3).unwrap();
        for c in &p.cubes {
            let (win, _) = c.enlarged(1.0);
            assert!(win.y0 >= 0.0 && win.y1 <= 1.0);
            assert!(win.t0 >= 0.0 && win.t1 <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BaseScales::new(0.0, 1.0, 1.0).is_err());
        assert!(BaseScales::new(1.0, -1.0, 1.0).is_err());
    }
}
