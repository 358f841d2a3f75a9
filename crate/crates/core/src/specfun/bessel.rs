use std::f64::consts::PI;

use super::gamma::ln_gamma;
use super::{CompensatedSum, MAX_SERIES_TERMS};
use crate::error::{finite, Error, Result};

pub(crate) const BESSEL_SERIES_LIMIT: f64 = 20.0;

fn scaled_series(order: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(if order == 0.0 { 1.0 } else { 0.0 });
    }
    let half = 0.5 * z;
    let q = half * half;
    let mut term = (order * half.ln() - ln_gamma(order + 1.0)? - z).exp();
    let mut sum = CompensatedSum::default();
    sum.add(term);
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + order));
        sum.add(term);
        if kf > half && term <= 1e-17 * sum.value() {
            return Ok(sum.value());
        }
    }
    Err(Error::NonConvergence {
        what: "Bessel I series",
        iterations: MAX_SERIES_TERMS,
    })
}

fn scaled_asymptotic(order: f64, z: f64) -> Option<f64> {
    let mu = 4.0 * order * order;
    let mut s = 1.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..100 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (k as f64 * 8.0 * z);
        let mag = term.abs();
        if mag > last {
            return None;
        }
        s += term;
        last = mag;
        if mag < 1e-17 * s.abs() {
            return Some(s / (2.0 * PI * z).sqrt());
        }
    }
    None
}

/// e^{-z} I_order(z).
pub fn bessel_i_scaled(order: f64, z: f64) -> Result<f64> {
    if !(z >= 0.0) || !(order >= 0.0) || !z.is_finite() {
        return Err(Error::domain("bessel_i", format!("order={order}, z={z}")));
    }
    if z > BESSEL_SERIES_LIMIT && z > order * order {
        if let Some(v) = scaled_asymptotic(order, z) {
            return Ok(v);
        }
    }
    scaled_series(order, z)
}

/// Modified Bessel function of the first kind I_order(z).
pub fn bessel_i(order: f64, z: f64) -> Result<f64> {
    let s = bessel_i_scaled(order, z)?;
    finite("bessel_i", s * z.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1.5, 0.0).unwrap(), 0.0);
        let x = 2.0f64;
        let exact = (2.0 / (PI * x)).sqrt() * x.sinh();
        assert!((bessel_i(0.5, x).unwrap() / exact - 1.0).abs() < 1e-13);
        let x = 30.0f64;
        let exact = (2.0 / (PI * x)).sqrt() * x.sinh();
        assert!((bessel_i(0.5, x).unwrap() / exact - 1.0).abs() < 1e-13);
    }

    #[test]
    fn against_plain_series() {
        let (nu, z) = (1.23f64, 5.0f64);
        let mut naive = 0.0;
        for k in 0..100 {
            let kf = k as f64;
            naive += ((2.0 * kf + nu) * (z / 2.0).ln() - ln_gamma(kf + 1.0).unwrap() - ln_gamma(kf + nu + 1.0).unwrap()).exp();
        }
        assert!((bessel_i(nu, z).unwrap() / naive - 1.0).abs() < 1e-12);
    }

    #[test]
    fn series_and_asymptotic_overlap() {
        for &nu in &[0.0, 0.5, 1.23, 3.0] {
            for &z in &[21.0, 25.0, 35.0] {
                let s = scaled_series(nu, z).unwrap();
                let a = scaled_asymptotic(nu, z).unwrap();
                assert!((s / a - 1.0).abs() < 1e-9, "nu={nu} z={z}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_i(1.0, -1.0).is_err());
        assert!(bessel_i(-1.0, 1.0).is_err());
    }
}
