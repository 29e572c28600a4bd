//! Numerical laboratory for the renormalised two-dimensional parabolic
//! Anderson model
//!
//! ```text
//!     du/dt = Lap u + u (xi_eps - C_eps),      u(0, .) = u0,
//! ```
//!
//! where `xi_eps` is a mollified spatial white noise on a square box and
//! `C_eps = E|grad Y_eps|^2` is the logarithmically divergent
//! renormalisation constant attached to the Green-kernel potential
//! `Y_eps = G * xi_eps`.
//!
//! The crate provides the full pipeline:
//!
//! * [`lattice`] — grids, scalar fields, weight families and weighted
//!   positive-regularity Hölder norms;
//! * [`stochastics`] — reproducible white-noise sampling and bump
//!   mollification;
//! * [`kernels`] — the cut-off Green kernel, fast zero-padded spectral
//!   convolution, the exact heat semigroup and singular-kernel order norms;
//! * [`enhancement`] — the stochastic data (Y, grad Y, Z, C_eps, F*xi)
//!   consumed by the solver, plus deterministic quadrature oracles for the
//!   renormalisation constant and the variance of Z tested against Monte
//!   Carlo;
//! * [`besov`] — an orthonormal wavelet pyramid, weighted negative-Hölder
//!   norms read off coefficient decay, and regularity-exponent estimation;
//! * [`solver`] — a Strang split-step solver for the mollified equation, a
//!   Picard fixed-point solver for the exponentially transformed equation,
//!   a Feynman–Kac Monte Carlo oracle and the blow-up-weighted spacetime
//!   norm;
//! * [`pamf`] — the binary field interchange format.
//!
//! All types are immutable after construction and safe to share across
//! threads; heavy loops are data-parallel via rayon.

pub mod besov;
pub mod enhancement;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod pamf;
pub mod rng;
pub mod solver;
pub mod stochastics;

pub use error::CoreError;
pub use lattice::{Field, Grid, WeightSpec};
