use std::f64::consts::PI;

use super::gamma::{ln_gamma_complex, rgamma_complex};
use super::kummer::kummer_m;
use super::{check_complex, Complex};
use crate::error::{Error, Result};

/// Whittaker function of the first kind
/// M_{κ,μ}(z) = e^{-z/2} z^{1/2+μ} M(1/2+μ−κ, 1+2μ, z).
pub fn whittaker_m(kappa: Complex, mu: Complex, z: Complex) -> Result<Complex> {
    let half = Complex::new(0.5, 0.0);
    let m = kummer_m(half + mu - kappa, 2.0 * mu + 1.0, z)?;
    check_complex("whittaker_m", (-0.5 * z + (half + mu) * z.ln()).exp() * m)
}

/// Whittaker function of the second kind from the two-term combination of
/// M_{κ,±μ}; 2μ must not be an integer.
pub fn whittaker_w(kappa: Complex, mu: Complex, z: Complex) -> Result<Complex> {
    let two_mu = 2.0 * mu;
    if two_mu.im.abs() < 1e-12 && (two_mu.re - two_mu.re.round()).abs() < 1e-12 {
        return Err(Error::domain("whittaker_w", format!("2mu={two_mu} is an integer")));
    }
    let half = Complex::new(0.5, 0.0);
    let g1 = ln_gamma_complex(-two_mu)?.exp() * rgamma_complex(half - mu - kappa);
    let g2 = ln_gamma_complex(two_mu)?.exp() * rgamma_complex(half + mu - kappa);
    let v = g1 * whittaker_m(kappa, mu, z)? + g2 * whittaker_m(kappa, -mu, z)?;
    check_complex("whittaker_w", v)
}

/// W_{−κ,ip/2}(z) · sinh(πp) · |Γ(1/2+κ+ip/2)|², computed as
/// −2π Im[M_{−κ,ip/2}(z) Γ(1/2+κ+ip/2) / Γ(1+ip)]. This product stays finite
/// where W alone would underflow against sinh.
pub fn whittaker_w_imag_weighted(kappa: f64, p: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !(p >= 0.0) {
        return Err(Error::domain("whittaker_w_imag", format!("p={p}, z={z}")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mu = Complex::new(0.0, 0.5 * p);
    let zc = Complex::new(z, 0.0);
    let m = kummer_m(mu + 0.5 + kappa, 2.0 * mu + 1.0, zc)?;
    let ln_pref = -0.5 * zc + (mu + 0.5) * zc.ln()
        + ln_gamma_complex(mu + 0.5 + kappa)?
        - ln_gamma_complex(Complex::new(1.0, p))?;
    let q = ln_pref.exp() * m;
    check_complex("whittaker_w_imag", q)?;
    Ok(-2.0 * PI * q.im)
}

fn w_imag_positive(kappa: f64, p: f64, z: f64) -> Result<f64> {
    let mu = Complex::new(0.0, 0.5 * p);
    let m = whittaker_m(Complex::new(-kappa, 0.0), mu, Complex::new(z, 0.0))?;
    let r = rgamma_complex(Complex::new(1.0, p)) * rgamma_complex(Complex::new(0.5 + kappa, -0.5 * p));
    let q = m * r;
    check_complex("whittaker_w_imag", q)?;
    Ok(-2.0 * PI / (PI * p).sinh() * q.im)
}

/// W_{−κ,ip/2}(z) for real κ, p ≥ 0 and z > 0; real by construction.
pub fn whittaker_w_imag(kappa: f64, p: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !(p >= 0.0) {
        return Err(Error::domain("whittaker_w_imag", format!("p={p}, z={z}")));
    }
    if p == 0.0 {
        // W is even in p, so Richardson on two one-sided steps removes the h² term
        let h = 1e-4;
        let w1 = w_imag_positive(kappa, h, z)?;
        let w2 = w_imag_positive(kappa, 2.0 * h, z)?;
        return Ok((4.0 * w1 - w2) / 3.0);
    }
    w_imag_positive(kappa, p, z)
}
