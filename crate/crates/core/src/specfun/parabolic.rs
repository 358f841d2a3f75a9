use std::f64::consts::PI;

use super::gamma::rgamma;
use super::kummer::kummer_u;
use crate::error::{finite, Error, Result};

/// e^{z²/4} U(b, z), evaluated without forming either exponential.
pub fn parabolic_cylinder_u_scaled(b: f64, z: f64) -> Result<f64> {
    if !(b > -0.5) || !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain("parabolic_cylinder_u", format!("b={b}, z={z}")));
    }
    let a = 0.5 * b + 0.25;
    let scale = 2f64.powf(-a);
    if z == 0.0 {
        // U(a, 1/2, 0) = Γ(1/2) / Γ(a + 1/2)
        return finite("parabolic_cylinder_u", scale * PI.sqrt() * rgamma(a + 0.5));
    }
    finite("parabolic_cylinder_u", scale * kummer_u(a, 0.5, 0.5 * z * z)?)
}

/// Parabolic cylinder function U(b, z) for b > −1/2 and z ≥ 0.
pub fn parabolic_cylinder_u(b: f64, z: f64) -> Result<f64> {
    let s = parabolic_cylinder_u_scaled(b, z)?;
    finite("parabolic_cylinder_u", s * (-0.25 * z * z).exp())
}
