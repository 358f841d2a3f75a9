//! Passage times of geometric Brownian motion with affine drift,
//! dY = (μY − 1)dt + σY dB, and of its ascending twin X.

use super::law::{gamma_ratio, TauLaw};
use super::DiffusionParams;
use crate::error::{finite, Error, Result};
use crate::specfun::{kummer_m_real, kummer_m_scaled_real, kummer_u};

/// Exponents (k, b) of the fundamental solutions at transform variable s.
fn exponents(d: &DiffusionParams, s: f64) -> Result<(f64, f64)> {
    let s2 = d.sigma * d.sigma;
    let drift = 2.0 * d.mu - s2;
    let disc = drift * drift + 8.0 * s2 * s;
    if !(disc >= 0.0) {
        return Err(Error::domain("diffusion exponents", format!("s={s}")));
    }
    let k = (drift + disc.sqrt()) / (2.0 * s2);
    Ok((k, 2.0 * k + 2.0 - 2.0 * d.mu / s2))
}

/// E[e^{-sτ_{y,0}}] with y = d.start > 0.
pub fn laplace_tau_to_zero(d: &DiffusionParams, s: f64) -> Result<f64> {
    if !(d.start > 0.0) {
        return Err(Error::domain("laplace_tau_to_zero", format!("start={}", d.start)));
    }
    let (k, b) = exponents(d, s)?;
    let z = 2.0 / (d.sigma * d.sigma * d.start);
    let v = gamma_ratio(b - k, b)? * z.powf(k) * kummer_m_scaled_real(b - k, b, z)?;
    finite("laplace_tau_to_zero", v)
}

/// Density of τ_{y,0} for the reduced process with index ν.
pub fn density_tau(nu: f64, y: f64, t: f64) -> Result<f64> {
    TauLaw::new(nu, y)?.density(t)
}

/// P(τ_{y,0} < ∞) for the reduced process with index ν.
pub fn prob_finite_tau(nu: f64, y: f64) -> Result<f64> {
    Ok(TauLaw::new(nu, y)?.prob_finite())
}

/// E[e^{-sτ_{x,y}}] from x = d.start to `target`, for the three same-sign
/// orderings. Paths cannot cross zero upward, so mixed signs are rejected.
pub fn laplace_tau_general(d: &DiffusionParams, target: f64, s: f64) -> Result<f64> {
    let x = d.start;
    let y = target;
    if x == y {
        return Ok(1.0);
    }
    if !(s > 0.0) {
        return Err(Error::domain("laplace_tau_general", format!("s={s}")));
    }
    let (k, b) = exponents(d, s)?;
    let s2 = d.sigma * d.sigma;
    let zx = 2.0 / (s2 * x);
    let zy = 2.0 / (s2 * y);
    let ratio = (x / y).powf(-k);
    let v = if (x > y && y > 0.0) || (0.0 > y && y > x) {
        ratio * kummer_m_real(k, b, -zx)? / kummer_m_real(k, b, -zy)?
    } else if y > x && x > 0.0 {
        // increasing solution x^{-k} e^{-z} U(b−k, b, z), which vanishes at 0+
        ratio * (zy - zx).exp() * kummer_u(b - k, b, zx)? / kummer_u(b - k, b, zy)?
    } else if 0.0 > x && x > y {
        ratio * kummer_u(k, b, -zx)? / kummer_u(k, b, -zy)?
    } else {
        return Err(Error::Case { start: x, target: y });
    };
    finite("laplace_tau_general", v)
}

/// E[e^{-sρ_{x,y}}] for the ascending process X started at x = d.start.
pub fn laplace_rho(d: &DiffusionParams, target: f64, s: f64) -> Result<f64> {
    let x = d.start;
    let y = target;
    if x == y {
        return Ok(1.0);
    }
    if x == 0.0 {
        if !(y > 0.0) {
            return Err(Error::Case { start: x, target: y });
        }
        if !(s > 0.0) {
            return Err(Error::domain("laplace_rho", format!("s={s}")));
        }
        let (k, b) = exponents(d, s)?;
        let z = 2.0 / (d.sigma * d.sigma * y);
        return finite("laplace_rho", z.powf(-k) / kummer_u(k, b, z)?);
    }
    let mirrored = DiffusionParams { start: -x, ..*d };
    laplace_tau_general(&mirrored, -y, s)
}
