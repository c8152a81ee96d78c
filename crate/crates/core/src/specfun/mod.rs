//! Special functions and quadrature shared by every analytic formula.
//!
//! All routines are pure and reentrant.

mod bessel;
mod lambert;
mod marcum;
mod quad;

pub use bessel::{bessel_i0, bessel_i0_scaled};
pub use lambert::{lambert_w, WBranch};
pub use marcum::{marcum_q1, marcum_q1_pair, MarcumQ};
pub use quad::{adaptive_simpson, integrate_radial, integrate_segments, Quadrature};

pub(crate) use bessel::i0e_unchecked;
pub(crate) use marcum::marcum_unchecked;
pub(crate) use quad::gauss_legendre_composite;
