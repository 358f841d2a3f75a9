//! Adaptive Gauss–Kronrod quadrature on finite and semi-infinite ranges, and
//! the truncated spectral integral over `p ∈ [0, ∞)` whose integrands are
//! dominated by `C p^α exp(πp/4 − βp²/2)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::specfun::Complex;

/// Tolerances and limits shared by every integrator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Overrides the empirically estimated constant in the spectral tail bound.
    pub tail_bound_constant: Option<f64>,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 200,
            tail_bound_constant: None,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_subdivisions < 10 {
            return Err(Error::domain("QuadConfig", format!("{self:?}")));
        }
        Ok(())
    }

    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

/// Scalar types the adaptive rule can integrate.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_727,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_953,
    0.093_125_454_583_697_606,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_138,
    0.149_451_349_150_580_59,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

struct Segment<T> {
    lo: f64,
    hi: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<T, F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c)?;
    let mut kron = fc * WGK[10];
    let mut gauss = T::default();
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        if !f1.magnitude().is_finite() || !f2.magnitude().is_finite() {
            return Err(Error::NotFinite { func: "quadrature integrand" });
        }
        let s = f1 + f2;
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    if !fc.magnitude().is_finite() {
        return Err(Error::NotFinite { func: "quadrature integrand" });
    }
    let value = kron * h;
    let error = ((kron - gauss) * h).magnitude();
    Ok(Segment { lo, hi, value, error })
}

/// Globally adaptive GK21 over the panels defined by `breaks`.
pub fn adaptive<T, F>(mut f: F, breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    cfg.validate()?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("adaptive", format!("breakpoints {breaks:?}")));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for w in breaks.windows(2) {
        heap.push(gk21(&mut f, w[0], w[1])?);
        evaluations += 21;
    }
    let mut settled_value = T::default();
    let mut settled_error = 0.0;
    let mut splits = 0usize;
    loop {
        let (total, err) = heap.iter().fold((settled_value, settled_error), |(v, e), s| {
            (v + s.value, e + s.error)
        });
        if err <= cfg.target(total.magnitude()) || heap.is_empty() {
            return Ok(QuadResult {
                value: total,
                error: err,
                evaluations,
            });
        }
        if splits >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                iterations: splits,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) || (worst.hi - worst.lo) < 1e-13 * worst.hi.abs().max(1.0) {
            // interval can no longer be split in floating point
            settled_value = settled_value + worst.value;
            settled_error += worst.error;
            continue;
        }
        heap.push(gk21(&mut f, worst.lo, mid)?);
        heap.push(gk21(&mut f, mid, worst.hi)?);
        evaluations += 42;
        splits += 1;
    }
}

/// ∫_lo^hi f(x) dx.
pub fn integrate_finite<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::domain("integrate_finite", format!("lo={lo}, hi={hi}")));
    }
    adaptive(|x| Ok(f(x)), &[lo, hi], cfg).map(|r| r.value)
}

/// Fallible variant of [`integrate_finite`].
pub fn try_integrate_finite<F>(f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::domain("integrate_finite", format!("lo={lo}, hi={hi}")));
    }
    adaptive(f, &[lo, hi], cfg).map(|r| r.value)
}

/// ∫_lo^∞ f(x) dx through x = lo + scale·u/(1−u). `scale` should be near the
/// decay length of `f`.
pub fn integrate_semi_infinite<T, F>(mut f: F, lo: f64, scale: f64, cfg: &QuadConfig) -> Result<T>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    if !(scale > 0.0) || !lo.is_finite() {
        return Err(Error::domain("integrate_semi_infinite", format!("lo={lo}, scale={scale}")));
    }
    let g = |u: f64| -> Result<T> {
        let d = 1.0 - u;
        let x = lo + scale * u / d;
        let jac = scale / (d * d);
        if !x.is_finite() {
            return Ok(T::default());
        }
        let v = f(x)?;
        if v.magnitude() == 0.0 {
            return Ok(T::default());
        }
        Ok(v * jac)
    };
    adaptive(g, &[0.0, 0.25, 0.5, 0.75, 1.0], cfg).map(|r| r.value)
}

/// Envelope exponents for the spectral integrand: |f(p)| ≤ C p^α e^{πp/4 − βp²/2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEnvelope {
    pub alpha: f64,
    pub beta: f64,
}

/// Smallest Gaussian coefficient accepted by [`integrate_spectral`].
pub const MIN_SPECTRAL_BETA: f64 = 1e-4;
/// Largest admissible truncation point.
pub const MAX_TRUNCATION: f64 = 1e4;

impl SpectralEnvelope {
    fn log_env(&self, p: f64) -> f64 {
        self.alpha * p.ln() + PI * p / 4.0 - 0.5 * self.beta * p * p
    }

    fn peak(&self) -> f64 {
        let q = PI / 4.0;
        let disc = q * q + 4.0 * self.alpha * self.beta;
        if disc <= 0.0 {
            return 0.0;
        }
        ((q + disc.sqrt()) / (2.0 * self.beta)).max(0.0)
    }

    /// Upper bound of ∫_P^∞ p^α e^{πp/4 − βp²/2} dp, or None if the bound
    /// does not apply at `p`.
    fn tail(&self, p: f64) -> Option<f64> {
        let slope = self.beta * p - PI / 4.0 - self.alpha / p;
        if slope <= 0.0 {
            return None;
        }
        Some((self.log_env(p)).exp() / slope)
    }
}

/// Truncation point P* at which C times the envelope tail drops below `limit`.
pub fn truncation_point(env: &SpectralEnvelope, c: f64, limit: f64) -> Result<f64> {
    let mut p = env.peak().max(1.0);
    let ok = |p: f64| env.tail(p).map(|t| c * t < limit).unwrap_or(false);
    while !ok(p) {
        p *= 1.25;
        if p > MAX_TRUNCATION {
            return Err(Error::TailBoundFailure { limit: MAX_TRUNCATION });
        }
    }
    let (mut lo, mut hi) = (p / 1.25, p);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// ∫_0^∞ f(p) dp for spectral integrands, truncated where the envelope tail
/// bound drops below `abs_tol/10`. Returns the truncation point alongside.
pub fn integrate_spectral_with_cutoff<F>(
    mut f: F,
    env: SpectralEnvelope,
    cfg: &QuadConfig,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !(env.beta >= MIN_SPECTRAL_BETA) {
        return Err(Error::TailBoundFailure { limit: MAX_TRUNCATION });
    }
    let peak = env.peak();
    // probe well past the peak, where the Gaussian factor is in control
    let reach = peak + (80.0 / env.beta).sqrt();
    let c = match cfg.tail_bound_constant {
        Some(c) => c,
        None => {
            let mut c: f64 = 0.0;
            let n = 24;
            for j in 1..=n {
                let p = 0.5 + reach * j as f64 / n as f64;
                let e = env.log_env(p);
                let v = f(p)?;
                if !v.is_finite() {
                    return Err(Error::NotFinite { func: "spectral integrand" });
                }
                if v != 0.0 {
                    c = c.max((v.abs().ln() - e).exp());
                }
            }
            if c == 0.0 {
                1.0
            } else {
                10.0 * c
            }
        }
    };
    let cutoff = truncation_point(&env, c, cfg.abs_tol / 10.0)?;
    let mut breaks = vec![0.0];
    let panels = 8;
    for j in 1..panels {
        breaks.push(cutoff * j as f64 / panels as f64);
    }
    if peak > 0.0 && peak < cutoff && !breaks.iter().any(|b| (b - peak).abs() < 1e-3 * cutoff) {
        breaks.push(peak);
    }
    breaks.push(cutoff);
    breaks.sort_by(f64::total_cmp);
    let r = adaptive(
        |p| if p == 0.0 { Ok(0.0) } else { f(p) },
        &breaks,
        cfg,
    )?;
    Ok((r.value, cutoff))
}

/// ∫_0^∞ f(p) dp for a spectral integrand with the given envelope.
pub fn integrate_spectral<F>(f: F, env: SpectralEnvelope, cfg: &QuadConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_spectral_with_cutoff(f, env, cfg).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polynomial_and_trig() {
        let cfg = QuadConfig::default();
        let v = integrate_finite(|x| x * x, 0.0, 1.0, &cfg).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let v = integrate_finite(f64::sin, 0.0, 2.0 * PI, &cfg).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn gaussian_half_line() {
        let cfg = QuadConfig::default();
        let env = SpectralEnvelope { alpha: 0.0, beta: 1.0 };
        let v = integrate_spectral(|p| Ok((-p * p / 2.0).exp()), env, &cfg).unwrap();
        assert!((v - (PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn weighted_gaussian() {
        let cfg = QuadConfig::default();
        let t = 0.2;
        let env = SpectralEnvelope { alpha: 1.0, beta: t };
        let v = integrate_spectral(|p| Ok(p * (-p * p * t / 2.0).exp()), env, &cfg).unwrap();
        assert!((v - 5.0).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_exponential() {
        let cfg = QuadConfig::default();
        let v: f64 = integrate_semi_infinite(|x| Ok((-x).exp()), 1.0, 1.0, &cfg).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-14);
        let v: f64 = integrate_semi_infinite(|x| Ok(1.0 / (x * x)), 1.0, 1.0, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_integrand() {
        let cfg = QuadConfig::default();
        let r = adaptive(|x| Ok(Complex::new(0.0, x).exp()), &[0.0, PI], &cfg).unwrap();
        assert!((r.value - Complex::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn tiny_beta_is_refused() {
        let cfg = QuadConfig::default();
        let env = SpectralEnvelope { alpha: 0.0, beta: 1e-5 };
        let r = integrate_spectral(|p| Ok((-p * p * 1e-5).exp()), env, &cfg);
        assert!(matches!(r, Err(Error::TailBoundFailure { .. })));
    }

    #[test]
    fn extending_the_cutoff_changes_nothing() {
        let cfg = QuadConfig::default();
        let t = 0.3;
        let env = SpectralEnvelope { alpha: 1.0, beta: t };
        let f = |p: f64| p * (PI * p / 4.0 - p * p * t / 2.0).exp();
        let (v, cut) = integrate_spectral_with_cutoff(|p| Ok(f(p)), env, &cfg).unwrap();
        let longer = integrate_finite(f, 0.0, 1.5 * cut, &cfg).unwrap();
        assert!((v - longer).abs() < 1e-12 * v.abs().max(1.0));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = QuadConfig { max_subdivisions: 3, ..QuadConfig::default() };
        assert!(integrate_finite(|x| x, 0.0, 1.0, &cfg).is_err());
        assert!(integrate_finite(|x| x, 1.0, 0.0, &QuadConfig::default()).is_err());
    }

    proptest! {
        #[test]
        fn halving_tolerance_is_monotone(k in 0.5f64..20.0, s in 0.1f64..3.0) {
            let f = |x: f64| (k * x).sin() * (-s * x).exp();
            let coarse = QuadConfig::with_tolerances(1e-6, 1e-12);
            let fine = QuadConfig::with_tolerances(5e-7, 1e-12);
            let a = adaptive(|x| Ok(f(x)), &[0.0, 5.0], &coarse).unwrap();
            let b = adaptive(|x| Ok(f(x)), &[0.0, 5.0], &fine).unwrap();
            prop_assert!((a.value - b.value).abs() <= a.error.max(1e-15));
        }
    }
}
