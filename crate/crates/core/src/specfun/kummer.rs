use super::gamma::{ln_gamma_complex, rgamma};
use super::{
    check_complex, near_nonpositive_integer, Complex, CompensatedComplexSum, CompensatedSum,
    MAX_SERIES_TERMS, POLE_TOL,
};
use crate::error::{finite, Error, Result};
use crate::quad::{adaptive, integrate_semi_infinite, QuadConfig};

/// Radius beyond which `M` may switch to its large-argument expansion.
pub(crate) const M_SERIES_RADIUS: f64 = 50.0;

fn is_b_pole(b: Complex) -> bool {
    b.im.abs() <= POLE_TOL && near_nonpositive_integer(b.re).is_some()
}

fn terminates(a: Complex) -> bool {
    a.im.abs() <= POLE_TOL && near_nonpositive_integer(a.re).is_some()
}

pub(crate) fn m_series(a: Complex, b: Complex, z: Complex) -> Result<Complex> {
    let mut sum = CompensatedComplexSum::default();
    sum.add(Complex::new(1.0, 0.0));
    let mut term = Complex::new(1.0, 0.0);
    let floor = z.norm().max(-b.re).max(-a.re);
    let mut quiet = 0;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        term = term * (a + nf) * z / ((b + nf) * (nf + 1.0));
        if term.re == 0.0 && term.im == 0.0 {
            return Ok(sum.value());
        }
        sum.add(term);
        if nf > floor && term.norm() <= 1e-17 * sum.value().norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum.value());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "Kummer M series",
        iterations: MAX_SERIES_TERMS,
    })
}

fn m_asymptotic(a: Complex, b: Complex, z: Complex) -> Result<Complex> {
    m_asymptotic_shifted(a, b, z, Complex::new(0.0, 0.0))
}

/// Large-argument expansion multiplied by e^{-shift}.
fn m_asymptotic_shifted(a: Complex, b: Complex, z: Complex, shift: Complex) -> Result<Complex> {
    // Γ(b)/Γ(a) e^z z^{a-b} Σ (b-a)_n (1-a)_n / (n! z^n); the recessive
    // e^{-z} partner is below double precision once Re z > 50.
    let mut s = Complex::new(1.0, 0.0);
    let mut term = Complex::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for n in 0..200 {
        let nf = n as f64;
        term = term * (b - a + nf) * (1.0 - a + nf) / ((nf + 1.0) * z);
        let mag = term.norm();
        if mag > last {
            break;
        }
        s += term;
        last = mag;
        if mag < 1e-17 * s.norm() {
            break;
        }
    }
    let ln_pref = ln_gamma_complex(b)? - ln_gamma_complex(a)? + z - shift + (a - b) * z.ln();
    Ok(ln_pref.exp() * s)
}

/// Kummer's confluent hypergeometric function M(a, b, z) = ₁F₁(a; b; z).
pub fn kummer_m(a: Complex, b: Complex, z: Complex) -> Result<Complex> {
    if is_b_pole(b) {
        return Err(Error::pole("kummer_m", b));
    }
    for v in [a, b, z] {
        check_complex("kummer_m", v)?;
    }
    if terminates(a) {
        return check_complex("kummer_m", m_series(a, b, z)?);
    }
    if z.re < 0.0 {
        // Kummer's transformation keeps the series free of cancellation
        let v = z.exp() * kummer_m(b - a, b, -z)?;
        return check_complex("kummer_m", v);
    }
    let big = z.norm() > M_SERIES_RADIUS
        && z.re > M_SERIES_RADIUS
        && z.norm() > 4.0 * (a.norm() + b.norm());
    let v = if big && !terminates(b - a) {
        m_asymptotic(a, b, z)?
    } else {
        m_series(a, b, z)?
    };
    check_complex("kummer_m", v)
}

/// e^{-x} M(a, b, x) for real arguments; finite for arbitrarily large `x`.
pub fn kummer_m_scaled_real(a: f64, b: f64, x: f64) -> Result<f64> {
    if near_nonpositive_integer(b).is_some() {
        return Err(Error::pole("kummer_m", b));
    }
    if x > M_SERIES_RADIUS
        && x > 4.0 * (a.abs() + b.abs())
        && near_nonpositive_integer(a).is_none()
        && near_nonpositive_integer(b - a).is_none()
    {
        let ac = Complex::new(a, 0.0);
        let bc = Complex::new(b, 0.0);
        let xc = Complex::new(x, 0.0);
        let v = m_asymptotic_shifted(ac, bc, xc, xc)?;
        return finite("kummer_m", v.re);
    }
    if x < 0.0 && near_nonpositive_integer(a).is_none() {
        return finite("kummer_m", x.exp() * kummer_m_scaled_real(b - a, b, -x)?);
    }
    finite("kummer_m", (-x).exp() * m_series_real(a, b, x)?)
}

fn m_series_real(a: f64, b: f64, x: f64) -> Result<f64> {
    let mut sum = CompensatedSum::default();
    sum.add(1.0);
    let mut term = 1.0;
    let floor = x.abs().max(-b).max(-a);
    let mut quiet = 0;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        term *= (a + nf) * x / ((b + nf) * (nf + 1.0));
        if term == 0.0 {
            return Ok(sum.value());
        }
        sum.add(term);
        if nf > floor && term.abs() <= 1e-17 * sum.value().abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum.value());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "Kummer M series",
        iterations: MAX_SERIES_TERMS,
    })
}

/// Real-argument M(a, b, x).
pub fn kummer_m_real(a: f64, b: f64, x: f64) -> Result<f64> {
    if near_nonpositive_integer(b).is_some() {
        return Err(Error::pole("kummer_m", b));
    }
    if !(a.is_finite() && b.is_finite() && x.is_finite()) {
        return Err(Error::NotFinite { func: "kummer_m" });
    }
    if near_nonpositive_integer(a).is_some() {
        return finite("kummer_m", m_series_real(a, b, x)?);
    }
    if x < 0.0 {
        // Kummer's transformation: M(a,b,x) = e^x M(b-a,b,-x)
        return kummer_m_scaled_real(b - a, b, -x);
    }
    if x > M_SERIES_RADIUS && x > 4.0 * (a.abs() + b.abs()) && near_nonpositive_integer(b - a).is_none() {
        let v = m_asymptotic(Complex::new(a, 0.0), Complex::new(b, 0.0), Complex::new(x, 0.0))?;
        return finite("kummer_m", v.re);
    }
    finite("kummer_m", m_series_real(a, b, x)?)
}

/// ln M(a, b, x) for real arguments where M > 0.
pub fn ln_kummer_m_real(a: f64, b: f64, x: f64) -> Result<f64> {
    let scaled = kummer_m_scaled_real(a, b, x)?;
    if scaled <= 0.0 {
        return Err(Error::domain("ln_kummer_m_real", format!("M({a},{b},{x}) is not positive")));
    }
    Ok(x + scaled.ln())
}

fn u_asymptotic(a: f64, b: f64, z: f64) -> Option<f64> {
    // z^{-a} Σ (a)_n (a-b+1)_n / (n! (-z)^n), usable when the smallest term is tiny
    let mut s = 1.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for n in 0..400 {
        let nf = n as f64;
        term *= -(a + nf) * (a - b + 1.0 + nf) / ((nf + 1.0) * z);
        let mag = term.abs();
        if mag == 0.0 {
            return Some(s * z.powf(-a));
        }
        if mag > last {
            return None;
        }
        s += term;
        last = mag;
        if mag < 1e-16 * s.abs() {
            return Some(s * z.powf(-a));
        }
    }
    None
}

fn u_integral(a: f64, b: f64, z: f64) -> Result<f64> {
    // U = Γ(a)^{-1} ∫_0^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt,  a > 0
    let cfg = QuadConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-300,
        max_subdivisions: 2_000,
        tail_bound_constant: None,
    };
    let head = if a < 1.0 {
        // v = t^a removes the endpoint singularity
        let inv = 1.0 / a;
        let f = |v: f64| -> Result<f64> {
            let t = v.powf(inv);
            Ok((-z * t).exp() * (1.0 + t).powf(b - a - 1.0))
        };
        adaptive(f, &[0.0, 0.5, 1.0], &cfg)?.value / a
    } else {
        let f = |t: f64| -> Result<f64> {
            Ok((-z * t).exp() * t.powf(a - 1.0) * (1.0 + t).powf(b - a - 1.0))
        };
        adaptive(f, &[0.0, 0.5, 1.0], &cfg)?.value
    };
    let scale = ((b - 2.0).abs() + 1.0) / z;
    let tail: f64 = integrate_semi_infinite(
        |t: f64| Ok((-z * (t - 1.0)).exp() * t.powf(a - 1.0) * (1.0 + t).powf(b - a - 1.0)),
        1.0,
        scale,
        &cfg,
    )?;
    finite("kummer_u", (head + (-z).exp() * tail) * rgamma(a))
}

fn u_positive_a(a: f64, b: f64, z: f64) -> Result<f64> {
    if z > 30.0 + 2.0 * (a.abs() + b.abs()) {
        if let Some(v) = u_asymptotic(a, b, z) {
            return finite("kummer_u", v);
        }
    }
    u_integral(a, b, z)
}

/// Kummer's function of the second kind U(a, b, z) for real a, b and z > 0.
pub fn kummer_u(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain("kummer_u", format!("z={z}")));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NotFinite { func: "kummer_u" });
    }
    if let Some(n) = near_nonpositive_integer(a) {
        // U(-n,b,z) = (-1)^n Σ_{k=0}^n C(n,k) (b+k)_{n-k} (-z)^k
        let mut s = CompensatedSum::default();
        for k in 0..=n {
            let mut binom = 1.0;
            for j in 0..k {
                binom *= (n - j) as f64 / (j + 1) as f64;
            }
            let mut poch = 1.0;
            for j in k..n {
                poch *= b + j as f64;
            }
            s.add(binom * poch * (-z).powi(k as i32));
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return finite("kummer_u", sign * s.value());
    }
    if a > 0.0 {
        return u_positive_a(a, b, z);
    }
    if 1.0 + a - b > 0.0 {
        return finite("kummer_u", z.powf(1.0 - b) * u_positive_a(1.0 + a - b, 2.0 - b, z)?);
    }
    // lift a into the positive range and recur back down
    let n = (-a).floor() as i64 + 1;
    let top = a + n as f64;
    let mut hi = kummer_u(top + 1.0, b, z)?;
    let mut mid = kummer_u(top, b, z)?;
    let mut cur = top;
    while cur > a + 0.5 {
        // U(c-1) = -(b - 2c - z) U(c) - c (c - b + 1) U(c+1)
        let low = -(b - 2.0 * cur - z) * mid - cur * (cur - b + 1.0) * hi;
        hi = mid;
        mid = low;
        cur -= 1.0;
    }
    finite("kummer_u", mid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{exp_integral_e1, gamma};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn m_at_zero_and_equal_parameters() {
        let v = kummer_m(c(0.3, 1.0), c(2.5, -0.5), c(0.0, 0.0)).unwrap();
        assert_eq!(v, c(1.0, 0.0));
        let v = kummer_m_real(2.5, 2.5, 2.5).unwrap();
        assert!((v / 2.5f64.exp() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn m_complex_against_naive_series() {
        let (a, b, z) = (c(0.5, 0.75), c(1.0, 1.5), c(2.0, 0.0));
        let mut naive = c(1.0, 0.0);
        let mut term = c(1.0, 0.0);
        for n in 0..200 {
            let nf = n as f64;
            term = term * (a + nf) * z / ((b + nf) * (nf + 1.0));
            naive += term;
        }
        let v = kummer_m(a, b, z).unwrap();
        assert!((v - naive).norm() < 1e-13 * naive.norm());
    }

    #[test]
    fn m_rejects_b_poles() {
        assert!(matches!(kummer_m(c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(kummer_m_real(1.0, 0.0, 1.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn m_negative_argument_uses_transformation() {
        // M(1, 2, -x) = (1 - e^{-x}) / x
        let x = 7.5f64;
        let v = kummer_m_real(1.0, 2.0, -x).unwrap();
        assert!((v - (1.0 - (-x).exp()) / x).abs() < 1e-15);
        let w = kummer_m(c(1.0, 0.0), c(2.0, 0.0), c(-x, 0.0)).unwrap();
        assert!((w.re - v).abs() < 1e-15 && w.im.abs() < 1e-15);
    }

    #[test]
    fn m_series_and_asymptotic_overlap() {
        for &(a, b) in &[(0.5, 1.5), (1.3, 2.7), (2.0, 0.5)] {
            for &x in &[52.0, 60.0, 70.0] {
                let s = m_series(c(a, 0.0), c(b, 0.0), c(x, 0.0)).unwrap();
                let t = m_asymptotic(c(a, 0.0), c(b, 0.0), c(x, 0.0)).unwrap();
                assert!(((s - t).norm() / s.norm()) < 1e-9, "a={a} b={b} x={x}");
            }
        }
    }

    #[test]
    fn scaled_m_survives_huge_arguments() {
        // e^{-x} M(1, 2, x) = (1 - e^{-x}) / x
        let x = 5e4f64;
        let v = kummer_m_scaled_real(1.0, 2.0, x).unwrap();
        assert!((v * x - 1.0).abs() < 1e-12);
        let l = ln_kummer_m_real(1.0, 2.0, x).unwrap();
        assert!((l - (x - x.ln())).abs() < 1e-9);
        let m = kummer_m_real(1.0, 2.0, -x).unwrap();
        assert!((m * x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn u_closed_forms() {
        let v = kummer_u(2.0, 3.0, 3.0).unwrap();
        assert!((v - 1.0 / 9.0).abs() < 1e-14);
        let v = kummer_u(1.0, 1.0, 1.0).unwrap();
        let oracle = 1f64.exp() * exp_integral_e1(1.0).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.596_347_362_323_194).abs() < 1e-12);
    }

    #[test]
    fn u_small_argument_asymptote() {
        let v = kummer_u(3.5, 6.0, 0.01).unwrap();
        let lead = gamma(5.0).unwrap() / gamma(3.5).unwrap() * 0.01f64.powi(-5);
        assert!((v / lead - 1.0).abs() < 0.01);
    }

    #[test]
    fn u_large_argument_asymptote() {
        let z = 400.0f64;
        let v = kummer_u(1.7, 0.4, z).unwrap();
        assert!((v * z.powf(1.7) - 1.0).abs() < 0.01);
    }

    #[test]
    fn u_rejects_non_positive_argument() {
        assert!(kummer_u(1.0, 1.0, 0.0).is_err());
        assert!(kummer_u(1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn u_polynomial_and_negative_a() {
        // U(-1, b, z) = z - b
        assert!((kummer_u(-1.0, 2.5, 4.0).unwrap() - 1.5).abs() < 1e-14);
        // U(-2, b, z) = z² - 2(b+1)z + b(b+1)
        let (b, z) = (0.5, 3.0);
        let exact = z * z - 2.0 * (b + 1.0) * z + b * (b + 1.0);
        assert!((kummer_u(-2.0, b, z).unwrap() - exact).abs() < 1e-13);
        // recurrence in a, checked against the Kummer transformation route
        let (a, b, z) = (-1.3, 3.2, 1.7);
        let direct = kummer_u(a, b, z).unwrap();
        let lo = kummer_u(a - 1.0, b, z).unwrap();
        let hi = kummer_u(a + 1.0, b, z).unwrap();
        let resid = lo + (b - 2.0 * a - z) * direct + a * (a - b + 1.0) * hi;
        assert!(resid.abs() < 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn u_branches_agree_with_transformation() {
        // U(a,b,z) = z^{1-b} U(1+a-b, 2-b, z)
        for &(a, b, z) in &[(0.7, 0.3, 2.0), (2.5, 4.0, 0.8), (0.2, -1.5, 5.0)] {
            let l = kummer_u(a, b, z).unwrap();
            let r = z.powf(1.0 - b) * kummer_u(1.0 + a - b, 2.0 - b, z).unwrap();
            assert!((l - r).abs() < 1e-10 * l.abs(), "a={a} b={b} z={z}");
        }
    }

    proptest! {
        #[test]
        fn m_equal_parameters_is_exponential(a in 0.1f64..10.0, x in -10.0f64..10.0) {
            let v = kummer_m_real(a, a, x).unwrap();
            prop_assert!((v / x.exp() - 1.0).abs() < 1e-10);
            let w = kummer_m(c(a, 0.0), c(a, 0.0), c(x, 0.0)).unwrap();
            prop_assert!((w.re / x.exp() - 1.0).abs() < 1e-10);
        }
    }
}
