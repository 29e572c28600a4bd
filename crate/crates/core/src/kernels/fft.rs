//! Zero-padded spectral convolution and heat-semigroup engine.
//!
//! All transforms run on the `2n x 2n` padded grid so that linear
//! convolution of box-supported data is exact (no periodic aliasing back
//! into the box). Plans are cached per size.

use crate::error::{CoreError, Result};
use crate::lattice::{Field, Grid};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Plan = Arc<dyn Fft<f64>>;

fn plan(m: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((m, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(m)
            } else {
                planner.plan_fft_forward(m)
            }
        })
        .clone()
}

fn transpose(buf: &mut [Complex<f64>], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

/// In-place 2D FFT on an `m x m` complex buffer (rows, transpose, rows,
/// transpose back). Unnormalised; the inverse carries the 1/m^2.
fn fft2(buf: &mut [Complex<f64>], m: usize, inverse: bool) {
    let p = plan(m, inverse);
    let scratch_len = p.get_inplace_scratch_len();
    for _pass in 0..2 {
        buf.par_chunks_exact_mut(m).for_each_init(
            || vec![Complex::default(); scratch_len],
            |scratch, row| p.process_with_scratch(row, scratch),
        );
        transpose(buf, m);
    }
}

fn pad_into(f: &Field) -> Vec<Complex<f64>> {
    let n = f.grid().points_per_axis();
    let m = 2 * n;
    let mut buf = vec![Complex::default(); m * m];
    for i in 0..n {
        let src = &f.values()[i * n..(i + 1) * n];
        for (j, &v) in src.iter().enumerate() {
            buf[i * m + j] = Complex::new(v, 0.0);
        }
    }
    buf
}

/// Zero-padded discrete convolution scaled by the cell area, approximating
/// `(a * b)(x) = ∫ a(x - y) b(y) dy`. Both inputs are read as samples on
/// the common grid with the kernel origin at the centre node, so a discrete
/// delta of mass one (`1/h^2` at the origin) is the identity element.
pub fn convolve(a: &Field, b: &Field) -> Result<Field> {
    a.check_same_grid(b)?;
    let grid = *a.grid();
    let n = grid.points_per_axis();
    let m = 2 * n;
    let mut fa = pad_into(a);
    let mut fb = pad_into(b);
    fft2(&mut fa, m, false);
    fft2(&mut fb, m, false);
    fa.par_iter_mut().zip(fb.par_iter_mut()).for_each(|(x, y)| *x *= *y);
    drop(fb);
    fft2(&mut fa, m, true);
    let scale = grid.cell_area() / (m * m) as f64;
    let half = n / 2;
    let mut out = Field::zeros(grid);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, fa[(i + half) * m + (j + half)].re * scale);
        }
    }
    Ok(out)
}

/// A field's padded forward transform, cached for repeated convolutions
/// against many inputs (kernel sweeps, Monte Carlo loops).
pub struct PreparedKernel {
    grid: Grid,
    spectrum: Vec<Complex<f64>>,
}

impl PreparedKernel {
    pub fn new(kernel: &Field) -> Self {
        let n = kernel.grid().points_per_axis();
        let mut spectrum = pad_into(kernel);
        fft2(&mut spectrum, 2 * n, false);
        Self {
            grid: *kernel.grid(),
            spectrum,
        }
    }

    pub fn convolve(&self, f: &Field) -> Result<Field> {
        if !self.grid.same_as(f.grid()) {
            return Err(CoreError::GridMismatch(
                self.grid.points_per_axis(),
                f.grid().points_per_axis(),
            ));
        }
        let n = self.grid.points_per_axis();
        let m = 2 * n;
        let mut buf = pad_into(f);
        fft2(&mut buf, m, false);
        buf.par_iter_mut()
            .zip(self.spectrum.par_iter())
            .for_each(|(x, k)| *x *= *k);
        fft2(&mut buf, m, true);
        let scale = self.grid.cell_area() / (m * m) as f64;
        let half = n / 2;
        let mut out = Field::zeros(self.grid);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, buf[(i + half) * m + (j + half)].re * scale);
            }
        }
        Ok(out)
    }
}

/// Padded-grid wavenumbers: index p on a ring of `m` nodes with period
/// `m h` carries `k = 2 pi p~ / (m h)` with `p~` wrapped to `[-m/2, m/2)`.
fn wavenumbers(m: usize, h: f64) -> Vec<f64> {
    let period = m as f64 * h;
    (0..m)
        .map(|p| {
            let wrapped = if p <= m / 2 { p as f64 } else { p as f64 - m as f64 };
            2.0 * std::f64::consts::PI * wrapped / period
        })
        .collect()
}

/// The heat semigroup `exp(t Lap)` realised as the exact Fourier multiplier
/// `exp(-|k|^2 t)` on the zero-padded grid, pre-built once per `(grid, t)`
/// for solvers that apply the same step repeatedly.
pub struct HeatPropagator {
    grid: Grid,
    multiplier: Vec<f64>,
}

impl HeatPropagator {
    pub fn new(grid: Grid, t: f64) -> Result<Self> {
        if t < 0.0 {
            return Err(CoreError::NegativeTime(t));
        }
        let n = grid.points_per_axis();
        let m = 2 * n;
        let k = wavenumbers(m, grid.spacing());
        let mut multiplier = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                multiplier[i * m + j] = (-(k[i] * k[i] + k[j] * k[j]) * t).exp();
            }
        }
        Ok(Self { grid, multiplier })
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        if !self.grid.same_as(f.grid()) {
            return Err(CoreError::GridMismatch(
                self.grid.points_per_axis(),
                f.grid().points_per_axis(),
            ));
        }
        let n = self.grid.points_per_axis();
        let m = 2 * n;
        let mut buf = pad_into(f);
        fft2(&mut buf, m, false);
        let inv = 1.0 / (m * m) as f64;
        buf.par_iter_mut()
            .zip(self.multiplier.par_iter())
            .for_each(|(x, &w)| *x *= w * inv);
        fft2(&mut buf, m, true);
        let mut out = Field::zeros(self.grid);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, buf[i * m + j].re);
            }
        }
        Ok(out)
    }
}

/// One-shot heat flow; `t = 0` returns the input unchanged.
pub fn heat_semigroup(f: &Field, t: f64) -> Result<Field> {
    if t < 0.0 {
        return Err(CoreError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    HeatPropagator::new(*f.grid(), t)?.apply(f)
}
