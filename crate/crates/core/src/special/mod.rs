//! Special functions and quadrature rules used by the kernels.

pub mod airy;
pub mod bessel;
pub mod quadrature;

pub use airy::{airy, AiryValue};
pub use bessel::{bessel_j, bessel_j_with_derivative};
pub use quadrature::{GaussLegendre, QuadratureGrid};
