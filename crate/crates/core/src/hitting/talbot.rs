//! Fixed-Talbot numerical inversion of Laplace transforms, used where the
//! spectral integrals lose too many digits (very short horizons).

use std::f64::consts::PI;

use crate::error::{finite, Error, Result};
use crate::specfun::Complex;

/// Nodes on the deformed contour. Rounding error grows like e^{0.4 M}, so
/// a modest count gives the best double-precision result.
pub const TALBOT_NODES: usize = 24;

/// f(t) from its transform F, given every singularity of F satisfies Re q ≤ `shift`.
pub fn invert<F>(mut transform: F, t: f64, shift: f64) -> Result<f64>
where
    F: FnMut(Complex) -> Result<Complex>,
{
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("talbot::invert", format!("t={t}")));
    }
    let m = TALBOT_NODES as f64;
    let r = 2.0 * m / (5.0 * t);
    let s0 = Complex::new(r + shift, 0.0);
    let mut sum = 0.5 * ((s0 * t).exp() * transform(s0)?).re;
    for k in 1..TALBOT_NODES {
        let theta = k as f64 * PI / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex::new(r * theta * cot + shift, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t).exp() * transform(s)? * Complex::new(1.0, sigma);
        sum += term.re;
    }
    finite("talbot::invert", r / m * sum)
}
