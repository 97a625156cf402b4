//! Periodic-in-x, tridiagonal-in-y linear solves.
//!
//! A row-major block of `rows x nx` values is transformed row by row with an
//! FFT; each Fourier column is then an independent real tridiagonal system
//! whose coefficients depend on the wavenumber only through the eigenvalue
//! of the periodic second difference.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tridiagonal {
    pub lower: f64,
    pub diag: f64,
    pub upper: f64,
}

pub(crate) struct Spectral {
    nx: usize,
    dx: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(nx: usize, dx: f64) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            nx,
            dx,
            forward: planner.plan_fft_forward(nx),
            inverse: planner.plan_fft_inverse(nx),
        }
    }

    /// Eigenvalue of `(f[i+1] - 2 f[i] + f[i-1]) / dx^2` on `exp(2 pi i k x / W)`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        -4.0 / (self.dx * self.dx) * (PI * k as f64 / self.nx as f64).sin().powi(2)
    }

    /// Solve in place. `row(k, lambda, j)` returns the coefficients of row
    /// `j` for wavenumber `k`; `lower` of row 0 and `upper` of the last row
    /// are ignored. With `pin_mean`, the singular `k = 0` system has its
    /// first equation replaced by `f_0 = 0`, which fixes the free constant
    /// of a pure-Neumann problem.
    pub fn solve(
        &self,
        data: &mut [f64],
        rows: usize,
        pin_mean: bool,
        row: impl Fn(usize, f64, usize) -> Tridiagonal,
    ) {
        let nx = self.nx;
        debug_assert_eq!(data.len(), rows * nx);
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        // Thomas sweeps run over all wavenumbers of one row at a time, so
        // memory is walked row by row
        let half = nx / 2 + 1;
        let lambdas: Vec<f64> = (0..half).map(|k| self.eigenvalue(k)).collect();
        let coeff = |k: usize, j: usize| {
            if pin_mean && k == 0 && j == 0 {
                Tridiagonal { lower: 0.0, diag: 1.0, upper: 0.0 }
            } else {
                row(k, lambdas[k], j)
            }
        };
        if pin_mean {
            buf[0] = Complex64::new(0.0, 0.0);
        }
        let mut cp = vec![0.0; rows * half];
        for k in 0..half {
            let r = coeff(k, 0);
            cp[k] = r.upper / r.diag;
            buf[k] /= r.diag;
        }
        for j in 1..rows {
            let (done, rest) = buf.split_at_mut(j * nx);
            let prev = &done[(j - 1) * nx..];
            let cur = &mut rest[..nx];
            for k in 0..half {
                let r = coeff(k, j);
                let m = r.diag - r.lower * cp[(j - 1) * half + k];
                cp[j * half + k] = if j + 1 < rows { r.upper / m } else { 0.0 };
                cur[k] = (cur[k] - prev[k] * r.lower) / m;
            }
        }
        for j in (0..rows.saturating_sub(1)).rev() {
            let (head, tail) = buf.split_at_mut((j + 1) * nx);
            let cur = &mut head[j * nx..];
            let next = &tail[..nx];
            for k in 0..half {
                cur[k] -= next[k] * cp[j * half + k];
            }
        }
        for j in 0..rows {
            let line = &mut buf[j * nx..(j + 1) * nx];
            for k in 1..half {
                if 2 * k != nx {
                    line[nx - k] = line[k].conj();
                }
            }
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / nx as f64;
        for (d, b) in data.iter_mut().zip(&buf) {
            *d = b.re * scale;
        }
    }
}
