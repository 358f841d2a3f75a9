//! Special-function kernels used by the closed forms: complex Gamma, Kummer's
//! `M` and `U`, the Whittaker function of imaginary index, modified Bessel
//! `I`, incomplete Gamma, `E1` and the parabolic cylinder function.
//!
//! All kernels run in double precision. Series loops accumulate with
//! Neumaier compensated summation.

mod bessel;
mod expint;
mod gamma;
mod kummer;
mod parabolic;
mod whittaker;

pub use bessel::{bessel_i, bessel_i_scaled};
pub use expint::exp_integral_e1;
pub use gamma::{
    gamma, gamma_abs_sq, gamma_complex, gamma_p, gamma_q, incomplete_gamma, ln_gamma,
    ln_gamma_complex, rgamma, rgamma_complex, IncompleteKind, EULER_GAMMA,
};
pub use kummer::{kummer_m, kummer_m_real, kummer_m_scaled_real, kummer_u, ln_kummer_m_real};
pub use parabolic::{parabolic_cylinder_u, parabolic_cylinder_u_scaled};
pub use whittaker::{whittaker_m, whittaker_w, whittaker_w_imag, whittaker_w_imag_weighted};

/// Complex scalar used throughout the special-function internals.
pub type Complex = num_complex::Complex64;

/// Distance below which an argument counts as sitting on a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Hard cap on terms in any power series.
pub(crate) const MAX_SERIES_TERMS: usize = 10_000;

/// Returns `Some(n)` when `x` is within `POLE_TOL` of the non-positive integer `-n`.
pub(crate) fn near_nonpositive_integer(x: f64) -> Option<i64> {
    if x > POLE_TOL {
        return None;
    }
    let n = x.round();
    if (x - n).abs() <= POLE_TOL {
        Some(-(n as i64))
    } else {
        None
    }
}

pub(crate) fn check_complex(func: &'static str, z: Complex) -> crate::Result<Complex> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(crate::Error::NotFinite { func })
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplexSum {
    pub(crate) fn add(&mut self, z: Complex) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub(crate) fn value(&self) -> Complex {
        Complex::new(self.re.value(), self.im.value())
    }
}

/// `sin(πx)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (std::f64::consts::PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}
