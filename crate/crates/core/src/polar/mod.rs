//! Polar-coordinate analysis of `∂ₜω = ω R₁²(ω)` in the plane.

pub mod cone;
pub mod experiment;
pub mod modes;
pub mod operator;
pub mod radial;
pub mod stream;
pub mod weight;
