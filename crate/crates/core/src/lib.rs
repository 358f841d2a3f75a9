//! Hitting-time distributions of Yor's process `A_t = ∫ exp(2(B_u + νu)) du`
//! and of geometric Brownian motion with affine drift, together with the
//! valuation of the Guaranteed Minimum Withdrawal Benefit (GMWB) rider built
//! on top of them.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Gamma, Kummer, Whittaker, Bessel and related kernels.
//! * [`quad`]: adaptive Gauss–Kronrod quadrature, including the truncated
//!   spectral integrals over `p ∈ [0, ∞)`.
//! * [`hitting`]: Laplace transforms, densities and distribution functions
//!   of the hitting times `H_a`, `τ_{x,y}` and `ρ_{x,y}`.
//! * [`gmwb`]: reduced coordinates, the building blocks `h, a, b, c, d`, the
//!   two pricing equations and the fair-fee solver.
//! * [`mc`]: an independent Monte Carlo oracle for every analytic quantity.
//! * [`cli`]: table reproduction, grid dumps and the verification report.

pub mod cli;
pub mod error;
pub mod gmwb;
pub mod hitting;
mod exec;
pub mod mc;
pub mod quad;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
