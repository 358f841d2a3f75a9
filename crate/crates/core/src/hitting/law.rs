//! Law of the first passage to zero of the reduced process
//! dY = (2(ν+1)Y − 1)dt + 2Y dB started at y > 0.
//!
//! The transform L(s) = E[e^{-sτ}] has a branch cut on s ≤ −ν²/2 and, for
//! ν > 2, simple poles at s_k = −2k(ν−k), k < ν/2. Inverting along the cut
//! gives the spectral integrals below; the poles give the residue terms.

use std::f64::consts::PI;

use super::talbot;
use crate::error::{finite, Error, Result};
use crate::quad::{integrate_spectral, QuadConfig, SpectralEnvelope};
use crate::specfun::{
    gamma, gamma_p, kummer_m, kummer_m_real, kummer_m_scaled_real, ln_gamma, ln_gamma_complex,
    rgamma, whittaker_w_imag_weighted, Complex,
};

/// Below this horizon the spectral integrals are replaced by Talbot inversion.
pub const SPECTRAL_MIN_T: f64 = 0.2;

/// A pole of the transform below the branch cut: contributes weight·e^{rate·t}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residue {
    pub rate: f64,
    pub weight: f64,
}

/// Γ(a)/Γ(b) with sign, for real arguments.
pub(crate) fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if a > 0.0 && b > 0.0 {
        return finite("gamma_ratio", (ln_gamma(a)? - ln_gamma(b)?).exp());
    }
    finite("gamma_ratio", gamma(a)? * rgamma(b))
}

#[derive(Debug, Clone)]
pub struct TauLaw {
    nu: f64,
    y: f64,
    z: f64,
    kappa: f64,
    pref: f64,
    residues: Vec<Residue>,
    p_finite: f64,
    cfg: QuadConfig,
}

impl TauLaw {
    pub fn new(nu: f64, y: f64) -> Result<Self> {
        Self::with_config(nu, y, QuadConfig::default())
    }

    pub fn with_config(nu: f64, y: f64, cfg: QuadConfig) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() || !nu.is_finite() {
            return Err(Error::domain("TauLaw", format!("nu={nu}, y={y}")));
        }
        cfg.validate()?;
        let z = 0.5 / y;
        let kappa = 0.5 * (1.0 - nu);
        let pref = (2.0 * y).powf(kappa) * (-0.25 / y).exp() / (4.0 * PI * PI);
        let mut residues = Vec::new();
        let mut k = 1usize;
        while (k as f64) < 0.5 * nu {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            // 1/Γ(ν−2k) vanishes smoothly as ν approaches the even integer 2k
            let weight = 2.0
                * sign
                * (2.0 * y).powf(kf - nu)
                * kummer_m_real(nu - kf, nu - 2.0 * kf + 1.0, -z)?
                * rgamma(kf)
                * rgamma(nu - 2.0 * kf);
            residues.push(Residue {
                rate: -2.0 * kf * (nu - kf),
                weight,
            });
            k += 1;
        }
        let p_finite = if nu > 0.0 { gamma_p(nu, z)? } else { 1.0 };
        Ok(Self {
            nu,
            y,
            z,
            kappa,
            pref,
            residues,
            p_finite,
            cfg,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn level(&self) -> f64 {
        self.y
    }

    pub fn residues(&self) -> &[Residue] {
        &self.residues
    }

    pub fn quad_config(&self) -> &QuadConfig {
        &self.cfg
    }

    /// P(τ < ∞).
    pub fn prob_finite(&self) -> f64 {
        self.p_finite
    }

    /// Left end of the branch cut, −ν²/2.
    pub fn cut(&self) -> f64 {
        -0.5 * self.nu * self.nu
    }

    /// E[e^{-sτ}] for real s ≥ −ν²/2, including the analytic continuation
    /// below zero. Fails at the poles s_k.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        let disc = 2.0 * s + self.nu * self.nu;
        if !(disc >= 0.0) {
            return Err(Error::domain("laplace_tau", format!("s={s} is left of the branch cut")));
        }
        let lambda = disc.sqrt();
        let a = 0.5 * (lambda - self.nu) + 1.0;
        let b = lambda + 1.0;
        let ratio = gamma_ratio(a, b)?;
        let m = kummer_m_scaled_real(a, b, self.z)?;
        finite(
            "laplace_tau",
            (2.0 * self.y).powf(-0.5 * (self.nu + lambda)) * ratio * m,
        )
    }

    /// E[e^{-sτ}] for complex s off the branch cut.
    pub fn laplace_complex(&self, s: Complex) -> Result<Complex> {
        let lambda = (2.0 * s + self.nu * self.nu).sqrt();
        let a = 0.5 * (lambda - self.nu) + 1.0;
        let b = lambda + 1.0;
        let zc = Complex::new(self.z, 0.0);
        let ln_pref = -0.5 * (lambda + self.nu) * (2.0 * self.y).ln() - zc + ln_gamma_complex(a)?
            - ln_gamma_complex(b)?;
        let v = ln_pref.exp() * kummer_m(a, b, zc)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NotFinite { func: "laplace_tau" })
        }
    }

    /// Spectral weight φ(p): the jump of the transform across the cut,
    /// written so that f(t) = ∫ ω e^{-ωt} φ(p) dp + residues with ω = (ν²+p²)/2.
    pub fn spectral_weight(&self, p: f64) -> Result<f64> {
        if p == 0.0 {
            return Ok(0.0);
        }
        let g = whittaker_w_imag_weighted(self.kappa, p, self.z)?;
        finite(
            "spectral_weight",
            self.pref * 4.0 / (self.nu * self.nu + p * p) * p * g,
        )
    }

    /// Conservative power in the envelope of φ.
    fn envelope_power(&self) -> f64 {
        0.5 * self.nu.abs() + 1.0
    }

    /// ∫_0^∞ e^{-ωt} g(ω) φ(p) dp, where g grows at most like ω^degree.
    pub fn spectral<G>(&self, t: f64, degree: i32, mut g: G) -> Result<f64>
    where
        G: FnMut(f64) -> f64,
    {
        let nu2 = self.nu * self.nu;
        let env = SpectralEnvelope {
            alpha: self.envelope_power() + 2.0 * degree.max(0) as f64,
            beta: t,
        };
        let scale = (-0.5 * nu2 * t).exp();
        let v = integrate_spectral(
            |p| {
                let omega = 0.5 * (nu2 + p * p);
                Ok(scale * (-0.5 * p * p * t).exp() * g(omega) * self.spectral_weight(p)?)
            },
            env,
            &self.cfg,
        )?;
        finite("spectral integral", v)
    }

    /// Σ_k weight_k e^{rate_k t} m(rate_k).
    pub fn residue_sum<M>(&self, t: f64, mut m: M) -> f64
    where
        M: FnMut(f64) -> f64,
    {
        self.residues
            .iter()
            .map(|r| r.weight * (r.rate * t).exp() * m(r.rate))
            .sum()
    }

    fn check_t(t: f64, func: &'static str) -> Result<()> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(func, format!("t={t}")));
        }
        Ok(())
    }

    /// True when P(τ < t) is below e^{-50}. Reaching zero by t needs
    /// ∫_0^t e^{-2(B_s+νs)} ds = y, hence a Brownian maximum of at least
    /// ½ln(y/t) − |ν|t.
    pub(crate) fn negligible_before(&self, t: f64) -> bool {
        let c = 0.5 * (self.y / t).ln() - self.nu.abs() * t;
        c > 0.0 && c * c / (2.0 * t) > 50.0
    }

    /// Density of τ at t > 0.
    pub fn density(&self, t: f64) -> Result<f64> {
        Self::check_t(t, "density_tau")?;
        if self.negligible_before(2.0 * t) {
            return Ok(0.0);
        }
        if t < SPECTRAL_MIN_T {
            return talbot::invert(|q| self.laplace_complex(q), t, 0.0);
        }
        let cut = self.spectral(t, 1, |w| w)?;
        Ok(cut + self.residue_sum(t, |_| 1.0))
    }

    /// P(τ < t).
    pub fn cdf(&self, t: f64) -> Result<f64> {
        Self::check_t(t, "cdf_tau")?;
        if self.negligible_before(t) {
            return Ok(0.0);
        }
        if t < SPECTRAL_MIN_T {
            return talbot::invert(|q| Ok(self.laplace_complex(q)? / q), t, 0.0);
        }
        let cut = self.spectral(t, 0, |_| 1.0)?;
        Ok(self.p_finite - cut + self.residue_sum(t, |s| 1.0 / s))
    }
}
