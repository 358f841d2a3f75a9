//! Small statistical toolkit for the Monte Carlo checks: deterministic
//! summation, mean with standard error, two-sample Kolmogorov–Smirnov and
//! Pearson χ² goodness of fit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gamma_q;

const CHUNK: usize = 1024;

/// Sum in fixed chunks, then pairwise across chunk totals. The result
/// depends only on the order of `xs`, never on how it was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    let mut level: Vec<f64> = xs.chunks(CHUNK).map(|c| c.iter().sum()).collect();
    if level.is_empty() {
        return 0.0;
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|p| if p.len() == 2 { p[0] + p[1] } else { p[0] })
            .collect();
    }
    level[0]
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { mean: f64::NAN, std_error: f64::NAN, n };
        }
        let mean = pairwise_sum(xs) / n as f64;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            n,
        }
    }

    /// Estimate from antithetic pairs (x_0, x_1), (x_2, x_3), …: the pair
    /// averages are the independent draws.
    pub fn from_pairs(xs: &[f64]) -> Self {
        let pairs: Vec<f64> = xs.chunks(2).map(|p| p.iter().sum::<f64>() / p.len() as f64).collect();
        Self::from_samples(&pairs)
    }

    /// |mean − target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }

    pub fn within(&self, target: f64, k: f64) -> bool {
        self.z_score(target) <= k
    }
}

/// Kolmogorov–Smirnov survival function Q(λ) = 2Σ(−1)^{k−1}e^{−2k²λ²}.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = sign * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample KS test. Non-finite entries (censored draws) are placed
/// beyond every finite value, identically for both samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestOutcome> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("ks_two_sample", "empty sample"));
    }
    let sorted = |xs: &[f64]| {
        let mut v: Vec<f64> = xs.iter().map(|&x| if x.is_finite() { x } else { f64::INFINITY }).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        if !x.is_finite() {
            break;
        }
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    // whichever sample is exhausted first sits at its finite mass
    let fa = a.iter().filter(|x| x.is_finite()).count() as f64 / n;
    let fb = b.iter().filter(|x| x.is_finite()).count() as f64 / m;
    d = d.max((fa - fb).abs());
    let ne = n * m / (n + m);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(TestOutcome {
        statistic: d,
        p_value: kolmogorov_q(lambda),
    })
}

/// Pearson χ² of observed counts against expected probabilities, which must
/// sum to one over the bins. `fitted` parameters reduce the degrees of freedom.
pub fn chi_square(observed: &[u64], probs: &[f64], fitted: usize) -> Result<TestOutcome> {
    if observed.len() != probs.len() || observed.len() < 2 + fitted {
        return Err(Error::domain("chi_square", "bin count mismatch"));
    }
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(probs) {
        let e = n * p;
        if !(e > 0.0) {
            return Err(Error::domain("chi_square", format!("expected count {e}")));
        }
        stat += (o as f64 - e) * (o as f64 - e) / e;
    }
    let dof = (observed.len() - 1 - fitted) as f64;
    Ok(TestOutcome {
        statistic: stat,
        p_value: gamma_q(0.5 * dof, 0.5 * stat)?,
    })
}
