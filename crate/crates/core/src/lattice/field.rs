use super::Grid;
use crate::error::{CoreError, Result};

/// A scalar field sampled at the grid nodes, stored row-major:
/// `values[i * n + j]` is the value at `(-L + i h, -L + j h)`.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.points_per_axis();
        Self {
            grid,
            values: vec![0.0; n * n],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        let n = grid.points_per_axis();
        Self {
            grid,
            values: vec![c; n * n],
        }
    }

    /// Builds a field by evaluating `f` at every node position.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let n = grid.points_per_axis();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            let x = grid.coord(i);
            for j in 0..n {
                values.push(f(x, grid.coord(j)));
            }
        }
        Self { grid, values }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let n = grid.points_per_axis();
        if values.len() != n * n {
            return Err(CoreError::MalformedPamf(format!(
                "value count {} does not match {n}x{n} grid",
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.points_per_axis() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.grid.points_per_axis();
        self.values[i * n + j] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(CoreError::GridMismatch(
                self.grid.points_per_axis(),
                other.grid.points_per_axis(),
            ))
        }
    }

    /// Pointwise `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Field) -> Field {
        debug_assert!(self.grid.same_as(&other.grid));
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        Field {
            grid: self.grid,
            values,
        }
    }

    pub fn scale(&self, c: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn mul_pointwise(&self, other: &Field) -> Field {
        debug_assert!(self.grid.same_as(&other.grid));
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Field {
            grid: self.grid,
            values,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Discrete integral `sum f h^2`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// Squared discrete L2 norm `sum f^2 h^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()
    }

    /// Max of |f| over the collar-trimmed interior.
    pub fn interior_sup(&self, collar: f64) -> f64 {
        let n = self.grid.points_per_axis();
        let mut sup = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if self.grid.is_interior(i, j, collar) {
                    sup = sup.max(self.at(i, j).abs());
                }
            }
        }
        sup
    }

    /// Centred-difference partial derivative along `axis` (0 or 1), with the
    /// off-grid neighbours of boundary nodes treated as zero, consistent
    /// with the zero-padding convention of the convolutions.
    pub fn gradient_axis(&self, axis: usize) -> Field {
        let n = self.grid.points_per_axis();
        let inv2h = 1.0 / (2.0 * self.grid.spacing());
        let mut out = Field::zeros(self.grid);
        for i in 0..n {
            for j in 0..n {
                let (plus, minus) = if axis == 0 {
                    (
                        if i + 1 < n { self.at(i + 1, j) } else { 0.0 },
                        if i > 0 { self.at(i - 1, j) } else { 0.0 },
                    )
                } else {
                    (
                        if j + 1 < n { self.at(i, j + 1) } else { 0.0 },
                        if j > 0 { self.at(i, j - 1) } else { 0.0 },
                    )
                };
                out.set(i, j, (plus - minus) * inv2h);
            }
        }
        out
    }

    /// Point reflection `x -> -x`, realised on indices as `i -> (n - i) mod n`.
    /// Exact for fields vanishing on the `i = 0` and `j = 0` lines.
    pub fn reflect(&self) -> Field {
        let n = self.grid.points_per_axis();
        let mut out = Field::zeros(self.grid);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.at((n - i) % n, (n - j) % n));
            }
        }
        out
    }

    /// Bilinear interpolation at an arbitrary point of the box. Points in
    /// the half-cell fringe beyond the last node row clamp to it.
    pub fn interp(&self, x: f64, y: f64) -> f64 {
        let n = self.grid.points_per_axis();
        let h = self.grid.spacing();
        let l = self.grid.half_width();
        let fx = ((x + l) / h).clamp(0.0, (n - 1) as f64);
        let fy = ((y + l) / h).clamp(0.0, (n - 1) as f64);
        let i0 = (fx as usize).min(n - 2);
        let j0 = (fy as usize).min(n - 2);
        let tx = fx - i0 as f64;
        let ty = fy - j0 as f64;
        let v00 = self.at(i0, j0);
        let v10 = self.at(i0 + 1, j0);
        let v01 = self.at(i0, j0 + 1);
        let v11 = self.at(i0 + 1, j0 + 1);
        v00 * (1.0 - tx) * (1.0 - ty)
            + v10 * tx * (1.0 - ty)
            + v01 * (1.0 - tx) * ty
            + v11 * tx * ty
    }

    /// Block-mean downsampling by a factor of two per axis. The 2x2 cell
    /// mean of white noise with node variance 1/h^2 has node variance
    /// 1/(2h)^2, so downsampling couples noise realisations across grid
    /// resolutions.
    pub fn downsample_mean(&self) -> Result<Field> {
        let n = self.grid.points_per_axis();
        let coarse = Grid::new(self.grid.half_width(), n / 2)?;
        let m = n / 2;
        let mut values = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let s = self.at(2 * i, 2 * j)
                    + self.at(2 * i + 1, 2 * j)
                    + self.at(2 * i, 2 * j + 1)
                    + self.at(2 * i + 1, 2 * j + 1);
                values.push(s / 4.0);
            }
        }
        Field::from_values(coarse, values)
    }
}
