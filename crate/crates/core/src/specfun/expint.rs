use super::gamma::EULER_GAMMA;
use super::CompensatedSum;
use crate::error::{Error, Result};

/// Exponential integral E1(x) = ∫_x^∞ e^{-t}/t dt for x > 0.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("exp_integral_e1", format!("x={x}")));
    }
    if x <= 1.0 {
        // -γ - ln x - Σ (-x)^k / (k k!)
        let mut sum = CompensatedSum::default();
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum.add(add);
            if add.abs() < 1e-18 {
                break;
            }
        }
        return Ok(-EULER_GAMMA - x.ln() - sum.value());
    }
    // modified Lentz on the continued fraction
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h * (-x).exp());
        }
    }
    Err(Error::NonConvergence {
        what: "E1 continued fraction",
        iterations: 10_000,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1_quadrature(x: f64) -> f64 {
        // ∫_0^1 e^{-x/u}/u du after t = x/u, Simpson on a fine grid
        let n = 200_000;
        let h = 1.0 / n as f64;
        let f = |u: f64| if u == 0.0 { 0.0 } else { (-x / u).exp() / u };
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn e1_at_one() {
        let v = exp_integral_e1(1.0).unwrap();
        assert!((v - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((v - e1_quadrature(1.0)).abs() < 1e-10);
    }

    #[test]
    fn e1_matches_quadrature_across_branches() {
        for &x in &[0.3, 0.999, 1.001, 2.5, 7.0] {
            let v = exp_integral_e1(x).unwrap();
            assert!((v - e1_quadrature(x)).abs() < 1e-10 * v.max(1e-3), "x={x}");
        }
    }

    #[test]
    fn e1_asymptotics() {
        let x = 100.0f64;
        let v = exp_integral_e1(x).unwrap() * x * x.exp();
        assert!((v - 1.0).abs() < 0.02);
        let x = 1e-6f64;
        let v = exp_integral_e1(x).unwrap();
        assert!((v - (-x.ln() - EULER_GAMMA)).abs() < 1e-5);
    }

    #[test]
    fn e1_rejects_non_positive() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-1.0).is_err());
    }
}
