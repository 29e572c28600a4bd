//! Feynman–Kac Monte Carlo oracle for the mollified equation.
//!
//! `u(t, x) = E[ u0(B_t) exp( ∫_0^t (xi_eps - c)(B_s) ds ) ]` over Brownian
//! paths with generator `Lap` (per-axis increment variance `2 dt` per
//! step), bilinear field interpolation and left-point time quadrature.
//! Walkers are embarrassingly parallel on per-walker substreams, so the
//! estimate is independent of scheduling.

use crate::error::{CoreError, Result};
use crate::lattice::Field;
use crate::rng::CounterRng;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug)]
pub struct FkEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Fraction of walkers that had to be resampled after leaving the box;
    /// above 1% the box is too small for the horizon and the caller should
    /// warn.
    pub exit_fraction: f64,
    pub walkers: usize,
}

impl FkEstimate {
    pub fn box_too_small(&self) -> bool {
        self.exit_fraction > 0.01
    }
}

const MAX_ATTEMPTS: u64 = 64;

/// Runs `walkers` independent paths started at `x` and averages the
/// exponential functional. A walker leaving the box is resampled on a
/// fresh substream (the exit is recorded in `exit_fraction`).
#[allow(clippy::too_many_arguments)]
pub fn feynman_kac(
    xi_eps: &Field,
    c: f64,
    u0: &Field,
    t: f64,
    x: (f64, f64),
    walkers: usize,
    dt_walk: f64,
    seed: u64,
) -> Result<FkEstimate> {
    xi_eps.check_same_grid(u0)?;
    let grid = *xi_eps.grid();
    let l = grid.half_width();
    if !(t > 0.0) || !(dt_walk > 0.0) {
        return Err(CoreError::InvalidConfig(
            "Feynman-Kac needs t > 0 and dt_walk > 0".into(),
        ));
    }
    if x.0.abs() >= l || x.1.abs() >= l {
        return Err(CoreError::WalkerStartOutside(x.0, x.1));
    }
    let steps = (t / dt_walk).round().max(1.0) as usize;
    let dt = t / steps as f64;
    let sigma = (2.0 * dt).sqrt();
    let root = CounterRng::new(seed);

    let results: Vec<(f64, bool)> = (0..walkers as u64)
        .into_par_iter()
        .map(|w| {
            let walker_rng = root.substream(w);
            let mut exited = false;
            for attempt in 0..MAX_ATTEMPTS {
                let rng = walker_rng.substream(attempt);
                let (mut bx, mut by) = x;
                let mut integral = 0.0;
                let mut ok = true;
                for step in 0..steps {
                    integral += (xi_eps.interp(bx, by) - c) * dt;
                    bx += sigma * rng.standard_normal(2 * step as u64);
                    by += sigma * rng.standard_normal(2 * step as u64 + 1);
                    if bx.abs() >= l || by.abs() >= l {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    return (u0.interp(bx, by) * integral.exp(), exited);
                }
                exited = true;
            }
            // every attempt left the box; count it and contribute nothing
            (0.0, true)
        })
        .collect();

    let n = results.len() as f64;
    let mean = results.iter().map(|(v, _)| v).sum::<f64>() / n;
    let var = results.iter().map(|(v, _)| (v - mean).powi(2)).sum::<f64>() / n;
    let exits = results.iter().filter(|(_, e)| *e).count();
    Ok(FkEstimate {
        mean,
        stderr: (var / n).sqrt(),
        exit_fraction: exits as f64 / n,
        walkers,
    })
}
