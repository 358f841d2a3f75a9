use std::f64::consts::PI;

use super::{check_complex, near_nonpositive_integer, sin_pi, Complex, POLE_TOL};
use crate::error::{finite, Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_ln_gamma(z: Complex) -> Complex {
    // valid for Re z >= 1/2
    let z = z - 1.0;
    let mut x = Complex::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + x.ln() + HALF_LN_2PI
}

fn lanczos_ln_gamma_real(x: f64) -> f64 {
    let z = x - 1.0;
    let mut s = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + s.ln() + HALF_LN_2PI
}

/// `ln sin(πz)` on a branch that stays accurate for large `|Im z|`.
fn ln_sin_pi(z: Complex) -> Complex {
    let w = z * PI;
    let i = Complex::i();
    if w.im > 1.0 {
        // sin w = (i/2) e^{-iw} (1 - e^{2iw})
        -i * w + Complex::new(0.5f64.ln(), PI / 2.0) + (Complex::new(1.0, 0.0) - (i * w * 2.0).exp()).ln()
    } else if w.im < -1.0 {
        // sin w = (-i/2) e^{iw} (1 - e^{-2iw})
        i * w + Complex::new(0.5f64.ln(), -PI / 2.0) + (Complex::new(1.0, 0.0) - (-i * w * 2.0).exp()).ln()
    } else {
        let n = z.re.round();
        let r = Complex::new(z.re - n, z.im) * PI;
        let s = r.sin();
        let s = if (n as i64) % 2 == 0 { s } else { -s };
        s.ln()
    }
}

/// Principal-ish `ln Γ(z)` for complex `z`; only `exp` of the result is
/// branch-independent.
pub fn ln_gamma_complex(z: Complex) -> Result<Complex> {
    if z.im.abs() <= POLE_TOL {
        if let Some(n) = near_nonpositive_integer(z.re) {
            return Err(Error::pole("ln_gamma_complex", -n));
        }
    }
    let v = if z.re >= 0.5 {
        lanczos_ln_gamma(z)
    } else {
        let one = Complex::new(1.0, 0.0);
        Complex::new(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos_ln_gamma(one - z)
    };
    check_complex("ln_gamma_complex", v)
}

/// Γ(z) for complex `z`.
pub fn gamma_complex(z: Complex) -> Result<Complex> {
    let lg = ln_gamma_complex(z)?;
    check_complex("gamma_complex", lg.exp())
}

/// 1/Γ(z), an entire function: exactly zero at the poles of Γ.
pub fn rgamma_complex(z: Complex) -> Complex {
    match ln_gamma_complex(z) {
        Ok(lg) => (-lg).exp(),
        Err(_) => Complex::new(0.0, 0.0),
    }
}

/// |Γ(x + ip/2)|².
pub fn gamma_abs_sq(x: f64, p: f64) -> Result<f64> {
    let lg = ln_gamma_complex(Complex::new(x, 0.5 * p)).map_err(|_| {
        Error::pole("gamma_abs_sq", format!("{x}+{}i", 0.5 * p))
    })?;
    finite("gamma_abs_sq", (2.0 * lg.re).exp())
}

/// ln|Γ(x)| for real `x`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if let Some(n) = near_nonpositive_integer(x) {
        return Err(Error::pole("ln_gamma", -n));
    }
    if x >= 0.5 {
        Ok(lanczos_ln_gamma_real(x))
    } else {
        Ok(PI.ln() - sin_pi(x).abs().ln() - lanczos_ln_gamma_real(1.0 - x))
    }
}

/// Γ(x) for real `x`.
pub fn gamma(x: f64) -> Result<f64> {
    if let Some(n) = near_nonpositive_integer(x) {
        return Err(Error::pole("gamma", -n));
    }
    if x >= 0.5 {
        if x == x.floor() && x <= 30.0 {
            let mut f = 1.0;
            let mut k = 2.0;
            while k < x {
                f *= k;
                k += 1.0;
            }
            return Ok(f);
        }
        finite("gamma", lanczos_ln_gamma_real(x).exp())
    } else {
        let g = lanczos_ln_gamma_real(1.0 - x).exp();
        finite("gamma", PI / (sin_pi(x) * g))
    }
}

/// 1/Γ(x); entire, so it returns exact zeros at non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x >= 0.5 {
        (-lanczos_ln_gamma_real(x)).exp()
    } else {
        sin_pi(x) * lanczos_ln_gamma_real(1.0 - x).exp() / PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IncompleteKind {
    Lower,
    Upper,
}

const FPMIN: f64 = 1e-300;

fn gamma_series(s: f64, x: f64) -> Result<f64> {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut ap = s;
    for _ in 0..super::MAX_SERIES_TERMS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            let ln_pref = -x + s * x.ln() - ln_gamma(s)?;
            return Ok(sum * ln_pref.exp());
        }
    }
    Err(Error::NonConvergence {
        what: "incomplete gamma series",
        iterations: super::MAX_SERIES_TERMS,
    })
}

fn gamma_cont_frac(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..super::MAX_SERIES_TERMS {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            let ln_pref = -x + s * x.ln() - ln_gamma(s)?;
            return Ok(ln_pref.exp() * h);
        }
    }
    Err(Error::NonConvergence {
        what: "incomplete gamma continued fraction",
        iterations: super::MAX_SERIES_TERMS,
    })
}

fn check_incomplete_args(func: &'static str, s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !(x >= 0.0) || !s.is_finite() {
        return Err(Error::domain(func, format!("s={s}, x={x}")));
    }
    Ok(())
}

/// Regularized lower incomplete Gamma P(s, x) = γ(s, x)/Γ(s).
pub fn gamma_p(s: f64, x: f64) -> Result<f64> {
    check_incomplete_args("gamma_p", s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    if x < s + 1.0 {
        gamma_series(s, x)
    } else {
        Ok(1.0 - gamma_cont_frac(s, x)?)
    }
}

/// Regularized upper incomplete Gamma Q(s, x) = Γ(s, x)/Γ(s).
pub fn gamma_q(s: f64, x: f64) -> Result<f64> {
    check_incomplete_args("gamma_q", s, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < s + 1.0 {
        Ok(1.0 - gamma_series(s, x)?)
    } else {
        gamma_cont_frac(s, x)
    }
}

/// Unregularized γ(s, x) or Γ(s, x).
pub fn incomplete_gamma(kind: IncompleteKind, s: f64, x: f64) -> Result<f64> {
    check_incomplete_args("incomplete_gamma", s, x)?;
    let g = gamma(s)?;
    let r = match kind {
        IncompleteKind::Lower => gamma_p(s, x)?,
        IncompleteKind::Upper => gamma_q(s, x)?,
    };
    finite("incomplete_gamma", g * r)
}
