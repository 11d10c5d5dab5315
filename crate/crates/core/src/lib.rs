//! Pseudospectral simulation and blow-up certificates for scalar stretching
//! equations `∂ₜω = ω R(ω)`, where `R` is a Fourier multiplier.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`grid`], [`field`], [`fft`] and [`multiplier`]: uniform periodic grids,
//!   sampled fields with cached Fourier coefficients, and diagonal Fourier
//!   multipliers together with their adjoints.
//! - [`weights`]: weight pairs `(W₂, W₁ = R*(W₂))`, closed-form or computed
//!   spectrally.
//! - [`certificate`]: the Jensen-inequality hypothesis check, the constant
//!   `c* = exp(J)` and the bound `T ≤ 1/c*` on the singularity time.
//! - [`simulator`]: exponential-Euler and RK4 time stepping, blow-up
//!   detection, dissipation diagnostics and exact-solution oracles.
//! - [`polar`]: angular modes, stream-function modes, the radial operators
//!   `L`/`L*`, the singular weight and the cone experiments for `R₁²`.
#![no_std]

extern crate alloc;

pub mod certificate;
pub mod error;
pub mod fft;
pub mod field;
pub mod function;
pub mod grid;
pub mod multiplier;
pub mod polar;
pub mod quadrature;
pub mod simulator;
pub mod weights;

pub use certificate::{BlowupCertificate, HypothesisReport};
pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::{Domain, Grid};
pub use multiplier::{MultiplierOp, ZeroModeRule};
pub use weights::{WeightFn, WeightPair};

pub use num_complex::Complex64;
