use super::{Field, WeightSpec};
use crate::error::{CoreError, Result};
use rayon::prelude::*;

/// Width of the boundary strip excluded from all norms. Convolutions are
/// zero-padded, so values within one kernel-support radius of the box edge
/// carry padding artifacts; the default keeps norms clear of them.
pub const DEFAULT_COLLAR: f64 = 1.0;

/// Grid size up to which the Hölder pair supremum enumerates every base
/// node; above it every second node is used as a base point (an
/// approximation knob, the target set stays complete).
const EXACT_PAIR_LIMIT: usize = 256;

/// `sup_x |f(x)| / w(x)` over the collar-trimmed interior.
pub fn weighted_sup_norm(f: &Field, w: &WeightSpec, collar: f64) -> f64 {
    let grid = *f.grid();
    let n = grid.points_per_axis();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut sup = 0.0_f64;
            for j in 0..n {
                if grid.is_interior(i, j, collar) {
                    let (x, y) = grid.node(i, j);
                    sup = sup.max(f.at(i, j).abs() / w.eval(x, y));
                }
            }
            sup
        })
        .reduce(|| 0.0, f64::max)
}

/// Weighted Hölder norm of positive non-integer order `alpha` in
/// `(0,1) ∪ (1,2)`:
///
/// * for `alpha ∈ (0,1)`: `sup |f|/w  +  sup_{0<|x-y|<=1} |f(x)-f(y)| / (w(x) |x-y|^alpha)`,
///   the pair supremum running over node pairs within Euclidean distance 1
///   (the weight is evaluated at the base point, not symmetrised);
/// * for `alpha ∈ (1,2)`: `sup |f|/w` plus the `(alpha-1)`-norm of each
///   centred-difference partial derivative.
pub fn holder_norm_positive(f: &Field, alpha: f64, w: &WeightSpec, collar: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 2.0) || alpha == 1.0 {
        return Err(CoreError::InvalidHolderExponent(alpha));
    }
    if alpha > 1.0 {
        let sup = weighted_sup_norm(f, w, collar);
        let d0 = holder_difference_part(&f.gradient_axis(0), alpha - 1.0, w, collar);
        let s0 = weighted_sup_norm(&f.gradient_axis(0), w, collar);
        let d1 = holder_difference_part(&f.gradient_axis(1), alpha - 1.0, w, collar);
        let s1 = weighted_sup_norm(&f.gradient_axis(1), w, collar);
        return Ok(sup + (s0 + d0) + (s1 + d1));
    }
    Ok(weighted_sup_norm(f, w, collar) + holder_difference_part(f, alpha, w, collar))
}

/// The pair-supremum term of the `(0,1)` Hölder norm.
fn holder_difference_part(f: &Field, alpha: f64, w: &WeightSpec, collar: f64) -> f64 {
    let grid = *f.grid();
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let window = (1.0 / h).floor() as i64;

    // offsets within Euclidean distance 1, with |dx|^(-alpha) precomputed
    let mut offsets: Vec<(i64, i64, f64)> = Vec::new();
    for di in -window..=window {
        for dj in -window..=window {
            if di == 0 && dj == 0 {
                continue;
            }
            let dist = h * ((di * di + dj * dj) as f64).sqrt();
            if dist <= 1.0 + 1e-12 {
                offsets.push((di, dj, dist.powf(-alpha)));
            }
        }
    }

    let stride = if n <= EXACT_PAIR_LIMIT { 1 } else { 2 };
    (0..n)
        .into_par_iter()
        .step_by(stride)
        .map(|i| {
            let mut sup = 0.0_f64;
            for j in (0..n).step_by(stride) {
                if !grid.is_interior(i, j, collar) {
                    continue;
                }
                let (x, y) = grid.node(i, j);
                let inv_w = 1.0 / w.eval(x, y);
                let base = f.at(i, j);
                for &(di, dj, inv_dist) in &offsets {
                    let ii = i as i64 + di;
                    let jj = j as i64 + dj;
                    if ii < 0 || jj < 0 || ii >= n as i64 || jj >= n as i64 {
                        continue;
                    }
                    let (ii, jj) = (ii as usize, jj as usize);
                    if !grid.is_interior(ii, jj, collar) {
                        continue;
                    }
                    let r = (base - f.at(ii, jj)).abs() * inv_w * inv_dist;
                    if r > sup {
                        sup = r;
                    }
                }
            }
            sup
        })
        .reduce(|| 0.0, f64::max)
}
