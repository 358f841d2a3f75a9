//! Hitting times H_a of Yor's process A_t = ∫_0^t e^{2(B_u + νu)} du.

use std::f64::consts::PI;

use super::law::TauLaw;
use super::YorParams;
use crate::error::{finite, Error, Result};
use crate::quad::{adaptive, integrate_semi_infinite, QuadConfig};
use crate::specfun::{bessel_i_scaled, gamma, parabolic_cylinder_u_scaled, Complex};

fn require_nonnegative_nu(p: &YorParams, func: &'static str) -> Result<()> {
    if p.nu < 0.0 {
        return Err(Error::domain(func, format!("nu={} must be non-negative", p.nu)));
    }
    Ok(())
}

/// E[e^{-sH_a}] for ν ≥ 0 and s ≥ 0.
pub fn laplace_h(p: &YorParams, s: f64) -> Result<f64> {
    require_nonnegative_nu(p, "laplace_H")?;
    if !(s >= 0.0) {
        return Err(Error::domain("laplace_H", format!("s={s}")));
    }
    // H_a^{(ν)} has the law of the passage to zero of Y^{(−ν)} from a
    TauLaw::new(-p.nu, p.a)?.laplace(s)
}

/// Density of H_a through the spectral (Whittaker) representation.
pub fn density_h_second(p: &YorParams, u: f64) -> Result<f64> {
    require_nonnegative_nu(p, "density_H_second")?;
    TauLaw::new(-p.nu, p.a)?.density(u)
}

/// P(A_t^{(ν)} < y) for any real ν.
pub fn cdf_a(nu: f64, t: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) || !(y > 0.0) {
        return Err(Error::domain("cdf_A", format!("t={t}, y={y}")));
    }
    let v = 1.0 - TauLaw::new(-nu, y)?.cdf(t)?;
    if !(-1e-6..=1.0 + 1e-6).contains(&v) {
        return Err(Error::OutOfRange { func: "cdf_A", value: v });
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Below this time the oscillatory real-axis form is replaced by the
/// contour-shifted one.
const FIRST_SHIFT_BELOW: f64 = 1.0;

/// Absolute accuracy aimed at in the density itself.
const FIRST_ABS_TOL: f64 = 1e-10;

/// Outer rule for an integral that is multiplied by `pref` afterwards.
fn first_cfg(pref: f64) -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-11,
        abs_tol: FIRST_ABS_TOL / pref.abs().max(1e-300),
        max_subdivisions: 4_000,
        tail_bound_constant: None,
    }
}

/// ∫_0^∞ t^{ν+2} exp(−at²/2 − ct) dt for complex c, along a ray rotated
/// into the sector where the integrand decays fastest.
fn moment_integral(nu: f64, a: f64, c: Complex) -> Result<Complex> {
    let s = c.im;
    let phi = -s.signum() * (PI / 4.0) * (s.abs() / (s.abs() + a.sqrt())).min(1.0);
    let e = Complex::new(0.0, phi).exp();
    let e2 = e * e;
    let scale = 1.0 / ((a * e2.re).sqrt() + (c * e).re.max(0.0) + 1e-3);
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_subdivisions: 2_000,
        tail_bound_constant: None,
    };
    integrate_semi_infinite(
        |tau: f64| {
            if tau == 0.0 {
                return Ok(Complex::new(0.0, 0.0));
            }
            let w = e * tau;
            let lnv = (nu + 2.0) * w.ln() - 0.5 * a * w * w - c * w;
            Ok(lnv.exp() * e)
        },
        0.0,
        scale,
        &cfg,
    )
}

fn first_shifted(nu: f64, a: f64, u: f64) -> Result<f64> {
    // y = x + iπ/2 turns e^{π²/(2u)} sin(πy/u) into a Gaussian of complex
    // centre, so the prefactor no longer cancels against the integral
    let pref = (-0.5 * nu * nu * u - 0.5 / a).exp() * (2.0 * PI.powi(3) * u).powf(-0.5) * a.powf(nu + 1.0);
    let reach = (90.0 * u).sqrt() + 1.0;
    let half_pi = Complex::new(0.0, 0.5 * PI);
    let f = |x: f64| -> Result<f64> {
        let g = moment_integral(nu, a, Complex::new(0.0, x.sinh()))?;
        let d = Complex::new(x, 0.0) - half_pi;
        let e = (-(d * d) / (2.0 * u)).exp();
        Ok((e * g).re * x.cosh())
    };
    let n = 16;
    let breaks: Vec<f64> = (0..=n).map(|j| reach * j as f64 / n as f64).collect();
    let v = adaptive(f, &breaks, &first_cfg(pref))?.value;
    finite("density_H_first", pref * v)
}

fn first_real_axis(nu: f64, a: f64, u: f64) -> Result<f64> {
    let pref = (-0.5 * nu * nu * u - 0.5 / a + PI * PI / (2.0 * u)).exp()
        * (2.0 * PI.powi(3) * u).powf(-0.5)
        * a.powf(nu + 1.0);
    let g_scale = a.powf(-0.5 * nu - 1.5) * gamma(nu + 3.0)?;
    let b = nu + 2.5;
    let root_a = a.sqrt();
    let f = |y: f64| -> Result<f64> {
        let g = g_scale * parabolic_cylinder_u_scaled(b, y.cosh() / root_a)?;
        Ok((-y * y / (2.0 * u)).exp() * y.sinh() * (PI * y / u).sin() * g)
    };
    let reach = (90.0 * u).sqrt() + 1.0;
    let mut breaks = vec![0.0];
    let mut k = 1.0;
    while k * u < reach {
        breaks.push(k * u);
        k += 1.0;
    }
    breaks.push(reach.max(k * u));
    let v = adaptive(f, &breaks, &first_cfg(pref))?.value;
    finite("density_H_first", pref * v)
}

/// Density of H_a through the parabolic-cylinder representation.
pub fn density_h_first(p: &YorParams, u: f64) -> Result<f64> {
    require_nonnegative_nu(p, "density_H_first")?;
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::domain("density_H_first", format!("u={u}")));
    }
    // the contour integrand cancels badly where the density is below e^{-50}
    if TauLaw::new(-p.nu, p.a)?.negligible_before(2.0 * u) {
        return Ok(0.0);
    }
    if u < FIRST_SHIFT_BELOW {
        first_shifted(p.nu, p.a, u)
    } else {
        first_real_axis(p.nu, p.a, u)
    }
}

/// E[e^{-s(H_y − H_x)}] for y > x > 0, ν ≥ 0 and s ≥ 0, by mixing the
/// transform of H over the Bessel-process law of R_x.
pub fn laplace_h_increment(p: &YorParams, x: f64, y: f64, s: f64) -> Result<f64> {
    require_nonnegative_nu(p, "laplace_H_increment")?;
    if !(y > x && x > 0.0) || !(s >= 0.0) {
        return Err(Error::domain("laplace_H_increment", format!("x={x}, y={y}, s={s}")));
    }
    let nu = p.nu;
    let gap = y - x;
    let f = |rho: f64| -> Result<f64> {
        if rho <= 0.0 {
            return Ok(0.0);
        }
        // Bessel density at time x from 1, with the e^{ρ/x} growth of I_ν
        // folded into the Gaussian factor
        let dens = rho.powf(nu + 1.0) / x * (-(1.0 - rho) * (1.0 - rho) / (2.0 * x)).exp()
            * bessel_i_scaled(nu, rho / x)?;
        if dens == 0.0 {
            return Ok(0.0);
        }
        let level = gap / (rho * rho);
        let l = TauLaw::new(-nu, level)?.laplace(s)?;
        Ok(l * dens)
    };
    let w = x.sqrt();
    let centre = 1.0 + (nu + 0.5) * x;
    let mut breaks = vec![0.0];
    for k in [-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0, 16.0] {
        let b = centre + k * w;
        if b > *breaks.last().unwrap() {
            breaks.push(b);
        }
    }
    let hi = *breaks.last().unwrap();
    let cfg = QuadConfig::with_tolerances(1e-10, 1e-14);
    let head = adaptive(f, &breaks, &cfg)?.value;
    let tail: f64 = integrate_semi_infinite(f, hi, w, &cfg)?;
    finite("laplace_H_increment", head + tail)
}
