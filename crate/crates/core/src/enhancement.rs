//! The stochastic enhancement: all noise-derived fields the transformed
//! solver consumes, with deterministic quadrature oracles for the
//! renormalisation constant and for the variance of the renormalised
//! gradient-square.
//!
//! With `Y = G * xi_eps` and `C_eps = E |grad Y|^2`, the bundle carries
//! `Z = |grad Y|^2 - C_eps` (mean zero by construction) and the smooth
//! drift `F * xi_eps`. The expectation defining `C_eps` reduces, by the
//! white-noise isometry, to the deterministic kernel energy
//! `sum_i || (D_i G) * rho_eps ||_{L2}^2`, which is evaluated by grid
//! quadrature and cross-checked against Monte Carlo in the tests.

use crate::error::Result;
use crate::kernels::{build_green, convolve, GreenKernel};
use crate::lattice::{Field, Grid};
use crate::stochastics::{mollify, MollifierSpec, NoiseSample};
use rayon::prelude::*;

/// The fields the transformed equation needs, built once per `(seed, eps)`.
pub struct Enhancement {
    pub epsilon: f64,
    pub seed: u64,
    /// Mollified noise `rho_eps * xi`.
    pub xi_eps: Field,
    /// `Y = G * xi_eps`.
    pub y: Field,
    /// `grad Y`, tabulated from the analytic kernel gradient.
    pub grad_y: [Field; 2],
    /// `|grad Y|^2 - c_eps`, the renormalised gradient-square.
    pub z: Field,
    /// The renormalisation constant for this grid and eps.
    pub c_eps: f64,
    /// `F * xi_eps`, the smooth drift of the transformed equation.
    pub f_xi: Field,
}

/// Assembles the enhancement. `c_eps` comes from [`c_epsilon_quadrature`]
/// on the same grid, so the centering `E Z = 0` holds exactly at interior
/// nodes (those whose kernel support fits in the box).
pub fn build_enhancement(noise: &NoiseSample, eps: f64) -> Result<Enhancement> {
    let grid = *noise.field().grid();
    let spec = MollifierSpec::new(eps)?;
    let xi_eps = mollify(noise, &spec)?;
    let gk = build_green(grid)?;
    let y = convolve(gk.green(), &xi_eps)?;
    let gy1 = convolve(gk.grad(0), &xi_eps)?;
    let gy2 = convolve(gk.grad(1), &xi_eps)?;
    let f_xi = convolve(gk.remainder(), &xi_eps)?;
    let c_eps = c_epsilon_quadrature(eps, grid)?;
    let mut z = Field::zeros(grid);
    let n = grid.points_per_axis();
    for i in 0..n {
        for j in 0..n {
            let g1 = gy1.at(i, j);
            let g2 = gy2.at(i, j);
            z.set(i, j, g1 * g1 + g2 * g2 - c_eps);
        }
    }
    Ok(Enhancement {
        epsilon: eps,
        seed: noise.seed(),
        xi_eps,
        y,
        grad_y: [gy1, gy2],
        z,
        c_eps,
        f_xi,
    })
}

/// The renormalisation constant by deterministic grid quadrature:
/// `c_eps = sum_i || (D_i G) * rho_eps ||^2 h^2`, summed over both axes,
/// with the same discrete convolution the enhancement pipeline uses (so
/// the Monte Carlo identity `E |grad Y(0)|^2 = c_eps` is exact at grid
/// level). Diverges like `log(1/eps)/(2 pi)` as `eps` shrinks.
pub fn c_epsilon_quadrature(eps: f64, grid: Grid) -> Result<f64> {
    let gk = build_green(grid)?;
    let rho = MollifierSpec::new(eps)?.tabulate(grid)?;
    let mut total = 0.0;
    for axis in 0..2 {
        let k = convolve(gk.grad(axis), &rho)?;
        total += k.values().par_iter().map(|v| v * v).sum::<f64>() * grid.cell_area();
    }
    Ok(total)
}

/// Exact second moment of the renormalised gradient-square paired with a
/// bump at scale `lambda`:
///
/// `Var Z_eps(eta^lambda) = 2 sum_{i,j} ∬ eta^lambda(x) eta^lambda(x')
///     [ (D_i G_eps * D_j G_eps)(x - x') ]^2 dx dx'`,
///
/// the full Wick evaluation of a second-chaos variable (the factor 2 and
/// the mixed `i != j` correlations are required for the Monte Carlo
/// comparison to close). `eps = 0` uses the raw kernel gradient, realising
/// the mollifier-free limit. `eta` is the unit-mass bump profile rescaled
/// as `eta^lambda = lambda^-2 eta(./lambda)`.
pub fn z_covariance_quadrature(lambda: f64, eps: f64, grid: Grid) -> Result<f64> {
    let h = grid.spacing();
    if lambda < 4.0 * h {
        return Err(crate::error::CoreError::UnderResolvedScale {
            name: "lambda",
            value: lambda,
            min: 4.0 * h,
        });
    }
    let gk = build_green(grid)?;
    let kgrad: [Field; 2] = if eps == 0.0 {
        [gk.grad(0).clone(), gk.grad(1).clone()]
    } else {
        let rho = MollifierSpec::new(eps)?.tabulate(grid)?;
        [
            convolve(gk.grad(0), &rho)?,
            convolve(gk.grad(1), &rho)?,
        ]
    };

    // eta^lambda tabulated with exact unit discrete mass
    let inv_l2 = 1.0 / (lambda * lambda);
    let mut eta = Field::from_fn(grid, |x, y| {
        MollifierSpec::profile(x.hypot(y) / lambda) * inv_l2
    });
    let mass = eta.mass();
    for v in eta.values_mut() {
        *v /= mass;
    }

    // autocorrelation of eta on the offset lattice, support |w| <= 2 lambda
    let n = grid.points_per_axis();
    let h2 = grid.cell_area();
    let reach = (lambda / h).ceil() as i64 + 1;
    let eta_nodes: Vec<(i64, i64, f64)> = {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let e = eta.at(i, j);
                if e != 0.0 {
                    v.push((i as i64, j as i64, e));
                }
            }
        }
        v
    };
    // the gradients are odd, so their correlations equal their convolutions
    // up to sign, which squares away; the spectral convolution evaluates all
    // offsets at once
    let q11 = convolve(&kgrad[0], &kgrad[0])?;
    let q12 = convolve(&kgrad[0], &kgrad[1])?;
    let q22 = convolve(&kgrad[1], &kgrad[1])?;

    let origin = grid.origin_index() as i64;
    let mut acc = 0.0;
    for wi in -2 * reach..=2 * reach {
        for wj in -2 * reach..=2 * reach {
            // sum_x eta(x) eta(x - w) h^2
            let mut auto = 0.0;
            for &(i, j, e) in &eta_nodes {
                let ii = i - wi;
                let jj = j - wj;
                if ii >= 0 && jj >= 0 && ii < n as i64 && jj < n as i64 {
                    auto += e * eta.at(ii as usize, jj as usize);
                }
            }
            if auto == 0.0 {
                continue;
            }
            auto *= h2;
            // offset w as a grid node: w = (wi, wj) h sits at index origin + w
            let (iw, jw) = ((origin + wi) as usize, (origin + wj) as usize);
            let qsum = q11.at(iw, jw).powi(2)
                + 2.0 * q12.at(iw, jw).powi(2)
                + q22.at(iw, jw).powi(2);
            acc += 2.0 * auto * qsum * h2;
        }
    }
    Ok(acc)
}

/// Pairs a field against the bump `eta^lambda` centred at the origin:
/// `sum f(x) eta^lambda(x) h^2`.
pub fn pair_with_bump(f: &Field, lambda: f64) -> f64 {
    let grid = *f.grid();
    let inv_l2 = 1.0 / (lambda * lambda);
    let mut eta = Field::from_fn(grid, |x, y| {
        MollifierSpec::profile(x.hypot(y) / lambda) * inv_l2
    });
    let mass = eta.mass();
    for v in eta.values_mut() {
        *v /= mass;
    }
    f.values()
        .iter()
        .zip(eta.values())
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * grid.cell_area()
}

/// Green bundle accessor used by validation drivers that need the raw
/// kernels next to an enhancement.
pub fn green_for(grid: Grid) -> Result<GreenKernel> {
    build_green(grid)
}
