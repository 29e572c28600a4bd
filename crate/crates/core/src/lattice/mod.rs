//! Square lattices on `[-L, L]^2`, scalar fields, weight families and the
//! weighted positive-regularity Hölder norms.

mod field;
mod norms;
mod weight;

pub use field::Field;
pub use norms::{holder_norm_positive, weighted_sup_norm, DEFAULT_COLLAR};
pub use weight::{eval_weight, WeightSpec};

use crate::error::{CoreError, Result};

/// A uniform square lattice of `n x n` nodes on the box `[-L, L]^2`.
///
/// Node `(i, j)` sits at `(-L + i h, -L + j h)` with spacing `h = 2L/n`, so
/// the node set covers `[-L, L)` per axis. `n` is a power of two, which
/// keeps spectral transforms fast and wavelet levels dyadic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    half_width: f64,
    points_per_axis: usize,
    spacing: f64,
}

/// Builds a grid, rejecting non-power-of-two sizes and boxes smaller than
/// the unit scale the weights and kernels are calibrated to.
pub fn make_grid(half_width: f64, points_per_axis: usize) -> Result<Grid> {
    Grid::new(half_width, points_per_axis)
}

impl Grid {
    pub fn new(half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(half_width >= 1.0) {
            return Err(CoreError::HalfWidthTooSmall(half_width));
        }
        if !points_per_axis.is_power_of_two() {
            return Err(CoreError::NotPowerOfTwo(points_per_axis));
        }
        if points_per_axis < 8 {
            return Err(CoreError::GridTooSmall(points_per_axis));
        }
        Ok(Self {
            half_width,
            points_per_axis,
            spacing: 2.0 * half_width / points_per_axis as f64,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Coordinate of the node with axis index `i`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + self.spacing * i as f64
    }

    /// Position of node `(i, j)` (row-major: `i` indexes the first axis).
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.coord(i), self.coord(j))
    }

    /// Index of the origin node (the origin is always a node: `i = n/2`).
    #[inline]
    pub fn origin_index(&self) -> usize {
        self.points_per_axis / 2
    }

    /// Cell area `h^2`, the quadrature weight of one node.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    /// True when `(i, j)` lies at distance at least `collar` from the box
    /// boundary (sup-distance per axis). Norms are taken over this region
    /// to stay clear of zero-padding artifacts.
    #[inline]
    pub fn is_interior(&self, i: usize, j: usize, collar: f64) -> bool {
        let bound = self.half_width - collar;
        let (x, y) = self.node(i, j);
        x.abs() <= bound && y.abs() <= bound
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.points_per_axis == other.points_per_axis
            && (self.half_width - other.half_width).abs() < 1e-12
    }
}
