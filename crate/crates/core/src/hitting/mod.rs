//! Hitting-time laws: Yor's process H_a, the passage times τ and ρ of
//! geometric Brownian motion with affine drift, their Laplace transforms,
//! densities and distribution functions.

mod diffusion;
mod law;
pub mod talbot;
mod yor;

pub use diffusion::{
    density_tau, laplace_rho, laplace_tau_general, laplace_tau_to_zero, prob_finite_tau,
};
pub use law::{Residue, TauLaw, SPECTRAL_MIN_T};
pub use yor::{cdf_a, density_h_first, density_h_second, laplace_h, laplace_h_increment};

use crate::error::{Error, Result};

/// Parameters of Yor's process and a target level.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct YorParams {
    pub nu: f64,
    pub a: f64,
}

impl YorParams {
    pub fn new(nu: f64, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !nu.is_finite() {
            return Err(Error::domain("YorParams", format!("nu={nu}, a={a}")));
        }
        Ok(Self { nu, a })
    }
}

/// dY = (μY − 1)dt + σY dB started at `start`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DiffusionParams {
    pub mu: f64,
    pub sigma: f64,
    pub start: f64,
}

impl DiffusionParams {
    pub fn new(mu: f64, sigma: f64, start: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() || !mu.is_finite() || !start.is_finite() {
            return Err(Error::domain(
                "DiffusionParams",
                format!("mu={mu}, sigma={sigma}, start={start}"),
            ));
        }
        Ok(Self { mu, sigma, start })
    }

    /// Index of the reduced process obtained by the time change t → σ²t/4.
    pub fn reduced_nu(&self) -> f64 {
        (2.0 * self.mu - self.sigma * self.sigma) / (self.sigma * self.sigma)
    }
}
