//! Monte Carlo oracle. Every simulated process is written in its exact
//! pathwise form e^{X_t}(x − ∫_0^t e^{−X_s} ds) with X a drifted Brownian
//! motion sampled exactly on the grid, so passage to zero is the monotone
//! event "the integral reaches x" and can be located inside a step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::map_indices;
use crate::gmwb::ModelParams;
use crate::hitting::DiffusionParams;
use crate::specfun::gamma_p;
use crate::stats::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: usize,
    /// Time step in reduced units; the fund simulation converts it to years.
    pub dt: f64,
    pub seed: u64,
    /// Paths not absorbed by this time count as censored.
    pub horizon_cap: f64,
    pub antithetic: bool,
    /// Spread paths over the rayon pool. Ignored without the `parallel` feature.
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            dt: 1e-4,
            seed: 20_160_601,
            horizon_cap: 50.0,
            antithetic: false,
            parallel: true,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || !(self.dt > 0.0) || !(self.horizon_cap > 0.0) || !self.dt.is_finite() {
            return Err(Error::domain("McConfig", format!("{self:?}")));
        }
        Ok(())
    }
}

/// One simulated trajectory on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub hit_time: Option<f64>,
}

/// Hitting times, with +∞ for paths censored at the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingSample {
    pub times: Vec<f64>,
    pub censored: usize,
}

impl HittingSample {
    fn from_times(times: Vec<f64>) -> Self {
        let censored = times.iter().filter(|t| !t.is_finite()).count();
        Self { times, censored }
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / self.times.len() as f64
    }

    /// Mean of g over the sample, treating censored draws as g(∞) = 0.
    pub fn estimate<G: Fn(f64) -> f64>(&self, antithetic: bool, g: G) -> Estimate {
        let xs: Vec<f64> = self.times.iter().map(|&t| if t.is_finite() { g(t) } else { 0.0 }).collect();
        if antithetic {
            Estimate::from_pairs(&xs)
        } else {
            Estimate::from_samples(&xs)
        }
    }
}

// Stream tags keep the draws of different simulators independent.
const TAG_A: u64 = 1;
const TAG_H: u64 = 2;
const TAG_TAU: u64 = 3;
const TAG_DIFFUSION: u64 = 4;
const TAG_FUND: u64 = 5;
const TAG_X: u64 = 6;

/// Normal draws for one path: a counter-based stream keyed by (seed, tag,
/// path), mirrored for the second member of an antithetic pair.
struct PathRng {
    rng: ChaCha8Rng,
    sign: f64,
}

impl PathRng {
    fn new(cfg: &McConfig, tag: u64, path: usize) -> Self {
        let (idx, sign) = if cfg.antithetic {
            (path / 2, if path % 2 == 1 { -1.0 } else { 1.0 })
        } else {
            (path, 1.0)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream((tag << 48) | idx as u64);
        Self { rng, sign }
    }

    fn normal(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        self.sign * z
    }
}

/// ∫_0^h e^{c(u)} du for c linear from c0 to c1.
fn loglinear_integral(c0: f64, c1: f64, h: f64) -> f64 {
    let d = c1 - c0;
    if d.abs() < 1e-12 {
        h * c0.exp() * (1.0 + 0.5 * d)
    } else {
        h * c0.exp() * d.exp_m1() / d
    }
}

/// Offset s ∈ [0, h] at which the log-linear integral from c0 reaches `rem`.
fn loglinear_inverse(c0: f64, c1: f64, h: f64, rem: f64) -> f64 {
    let d = c1 - c0;
    let u = rem * (-c0).exp() / h;
    let s = if d.abs() < 1e-12 { h * u } else { h / d * (d * u).ln_1p() };
    s.clamp(0.0, h)
}

/// Exponent c_t = drift·t + vol·W_t of the integrand e^{c_t}.
#[derive(Debug, Clone, Copy)]
struct Exponent {
    drift: f64,
    vol: f64,
}

impl Exponent {
    /// Mean correction for the Brownian bridge between grid points:
    /// E[∫ e^{bridge}]/h ≈ exp(vol²h/12).
    fn bridge_factor(&self, h: f64) -> f64 {
        (self.vol * self.vol * h / 12.0).exp()
    }

    /// P(∫_t^∞ e^{c_u} du ≥ gap | c_t), finite only for negative drift:
    /// ∫_0^∞ e^{drift·u + vol·W_u} du has the law of (2/vol²)/Z with
    /// Z ~ Gamma(−2·drift/vol²).
    fn reach_probability(&self, c_now: f64, gap: f64) -> f64 {
        if self.drift >= 0.0 {
            return 1.0;
        }
        let shape = -2.0 * self.drift / (self.vol * self.vol);
        let x = 2.0 * c_now.exp() / (self.vol * self.vol * gap);
        gamma_p(shape, x).unwrap_or(1.0)
    }
}

const ESCAPE_CHECK_EVERY: usize = 64;
const ESCAPE_PROBABILITY: f64 = 1e-12;

/// Times at which ∫_0^t e^{c_u} du first reaches each of the increasing
/// `levels`; +∞ past the horizon or once further passage is negligible.
fn integral_passages(rng: &mut PathRng, e: Exponent, levels: &[f64], h: f64, horizon: f64) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; levels.len()];
    let factor = e.bridge_factor(h);
    let sd = e.vol * h.sqrt();
    let mut next = 0usize;
    let (mut t, mut c, mut acc) = (0.0, 0.0, 0.0);
    let mut step = 0usize;
    while next < levels.len() && t < horizon {
        let c1 = c + e.drift * h + sd * rng.normal();
        let inc = factor * loglinear_integral(c, c1, h);
        while next < levels.len() && acc + inc >= levels[next] {
            let s = loglinear_inverse(c, c1, h, (levels[next] - acc) / factor);
            out[next] = t + s;
            next += 1;
        }
        acc += inc;
        t += h;
        c = c1;
        step += 1;
        if step % ESCAPE_CHECK_EVERY == 0
            && next < levels.len()
            && e.reach_probability(c, levels[next] - acc) < ESCAPE_PROBABILITY
        {
            break;
        }
    }
    out
}

fn check_level(func: &'static str, level: f64, cfg: &McConfig) -> Result<()> {
    cfg.validate()?;
    if !(level > 0.0) {
        return Err(Error::domain(func, format!("level {level}")));
    }
    if level < 10.0 * cfg.dt {
        return Err(Error::domain(
            func,
            format!("level {level} is below 10·dt; the passage would be resolved by a handful of steps"),
        ));
    }
    Ok(())
}

/// Samples of A_{t_end} = ∫_0^{t_end} e^{2(B_u + νu)} du.
pub fn simulate_a(nu: f64, t_end: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(t_end > 0.0) {
        return Err(Error::domain("simulate_A", format!("t_end={t_end}")));
    }
    let steps = (t_end / cfg.dt).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let e = Exponent { drift: 2.0 * nu, vol: 2.0 };
    Ok(map_indices(cfg.n_paths, cfg.parallel, |path| {
        let mut rng = PathRng::new(cfg, TAG_A, path);
        let factor = e.bridge_factor(h);
        let sd = e.vol * h.sqrt();
        let (mut c, mut acc) = (0.0, 0.0);
        for _ in 0..steps {
            let c1 = c + e.drift * h + sd * rng.normal();
            acc += factor * loglinear_integral(c, c1, h);
            c = c1;
        }
        acc
    }))
}

/// Samples of the ascending process dX = (2(ν+1)X + 1)dt + 2X dB from
/// X_0 = 0 at time t_end, via X_t = e^{2B^ν_t} ∫_0^t e^{−2B^ν_s} ds.
pub fn simulate_x(nu: f64, t_end: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(t_end > 0.0) {
        return Err(Error::domain("simulate_X", format!("t_end={t_end}")));
    }
    let steps = (t_end / cfg.dt).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let e = Exponent { drift: -2.0 * nu, vol: 2.0 };
    Ok(map_indices(cfg.n_paths, cfg.parallel, |path| {
        let mut rng = PathRng::new(cfg, TAG_X, path);
        let factor = e.bridge_factor(h);
        let sd = e.vol * h.sqrt();
        let (mut c, mut acc) = (0.0, 0.0);
        for _ in 0..steps {
            let c1 = c + e.drift * h + sd * rng.normal();
            acc += factor * loglinear_integral(c, c1, h);
            c = c1;
        }
        (-c).exp() * acc
    }))
}

/// One path of A on the grid up to `t_end`.
pub fn sample_path_a(nu: f64, t_end: f64, cfg: &McConfig, path: usize) -> Result<PathSample> {
    cfg.validate()?;
    let steps = (t_end / cfg.dt).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let e = Exponent { drift: 2.0 * nu, vol: 2.0 };
    let mut rng = PathRng::new(cfg, TAG_A, path);
    let (mut times, mut values) = (vec![0.0], vec![0.0]);
    let (mut c, mut acc) = (0.0, 0.0);
    for k in 1..=steps {
        let c1 = c + e.drift * h + e.vol * h.sqrt() * rng.normal();
        acc += e.bridge_factor(h) * loglinear_integral(c, c1, h);
        c = c1;
        times.push(k as f64 * h);
        values.push(acc);
    }
    Ok(PathSample { times, values, hit_time: None })
}

/// Passage times H_a of A^{(ν)} to each of the increasing `levels`,
/// sampled jointly on every path.
pub fn simulate_hitting_h_levels(nu: f64, levels: &[f64], cfg: &McConfig) -> Result<Vec<HittingSample>> {
    for &a in levels {
        check_level("simulate_hitting_H", a, cfg)?;
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("simulate_hitting_H", "levels must increase"));
    }
    let e = Exponent { drift: 2.0 * nu, vol: 2.0 };
    let rows = map_indices(cfg.n_paths, cfg.parallel, |path| {
        let mut rng = PathRng::new(cfg, TAG_H, path);
        integral_passages(&mut rng, e, levels, cfg.dt, cfg.horizon_cap)
    });
    Ok((0..levels.len())
        .map(|j| HittingSample::from_times(rows.iter().map(|r| r[j]).collect()))
        .collect())
}

/// Passage times H_a of A^{(ν)} to level a.
pub fn simulate_hitting_h(nu: f64, a: f64, cfg: &McConfig) -> Result<HittingSample> {
    Ok(simulate_hitting_h_levels(nu, &[a], cfg)?.remove(0))
}

/// Passage times to zero of Y^{(ν)} started at y, using
/// Y_t = e^{2B^ν_t}(y − ∫_0^t e^{−2B^ν_s} ds): Y vanishes exactly when the
/// integral reaches y.
pub fn simulate_hitting_tau(nu: f64, y: f64, cfg: &McConfig) -> Result<HittingSample> {
    check_level("simulate_hitting_tau", y, cfg)?;
    let e = Exponent { drift: -2.0 * nu, vol: 2.0 };
    let times = map_indices(cfg.n_paths, cfg.parallel, |path| {
        let mut rng = PathRng::new(cfg, TAG_TAU, path);
        integral_passages(&mut rng, e, &[y], cfg.dt, cfg.horizon_cap)[0]
    });
    Ok(HittingSample::from_times(times))
}

/// One path of Y^{(ν)} from y, stopped at zero or at `t_end`.
pub fn sample_path_y(nu: f64, y: f64, t_end: f64, cfg: &McConfig, path: usize) -> Result<PathSample> {
    check_level("sample_path_y", y, cfg)?;
    let h = cfg.dt;
    let e = Exponent { drift: -2.0 * nu, vol: 2.0 };
    let mut rng = PathRng::new(cfg, TAG_TAU, path);
    let (mut times, mut values) = (vec![0.0], vec![y]);
    let (mut c, mut acc, mut t) = (0.0, 0.0, 0.0);
    while t < t_end {
        let c1 = c + e.drift * h + e.vol * h.sqrt() * rng.normal();
        let inc = e.bridge_factor(h) * loglinear_integral(c, c1, h);
        if acc + inc >= y {
            let s = loglinear_inverse(c, c1, h, (y - acc) / e.bridge_factor(h));
            times.push(t + s);
            values.push(0.0);
            return Ok(PathSample { times, values, hit_time: Some(t + s) });
        }
        acc += inc;
        t += h;
        c = c1;
        times.push(t);
        values.push((-c1).exp() * (y - acc));
    }
    Ok(PathSample { times, values, hit_time: None })
}

/// Passage times of dY = (μY − 1)dt + σY dB from d.start to `target`, both
/// on the same side of zero. Crossings of a non-zero target are located by
/// linear interpolation between grid values.
pub fn simulate_passage(d: &DiffusionParams, target: f64, cfg: &McConfig) -> Result<HittingSample> {
    cfg.validate()?;
    let x = d.start;
    if x == 0.0 || target * x < 0.0 || (target == 0.0 && x < 0.0) {
        return Err(Error::Case { start: x, target });
    }
    let h = cfg.dt;
    let e = Exponent {
        drift: -(d.mu - 0.5 * d.sigma * d.sigma),
        vol: d.sigma,
    };
    let times = map_indices(cfg.n_paths, cfg.parallel, |path| {
        let mut rng = PathRng::new(cfg, TAG_DIFFUSION, path);
        if target == 0.0 {
            return integral_passages(&mut rng, e, &[x], h, cfg.horizon_cap)[0];
        }
        let above = x > target;
        let (mut c, mut acc, mut t, mut prev) = (0.0, 0.0, 0.0, x);
        while t < cfg.horizon_cap {
            let c1 = c + e.drift * h + e.vol * h.sqrt() * rng.normal();
            acc += e.bridge_factor(h) * loglinear_integral(c, c1, h);
            let cur = (-c1).exp() * (x - acc);
            if (cur <= target) == above {
                return t + h * (prev - target) / (prev - cur);
            }
            prev = cur;
            c = c1;
            t += h;
        }
        f64::INFINITY
    });
    Ok(HittingSample::from_times(times))
}

/// Monte Carlo estimates of the quantities priced by the gmwb module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmwbEstimates {
    /// E[e^{−rT} F_T; τ > T].
    pub discounted_fund: Estimate,
    /// P(τ < T).
    pub ruin_probability: Estimate,
    /// E[e^{−rτ}; τ < T].
    pub discounted_ruin: Estimate,
    /// E[∫_0^{τ∧T} e^{−rs} F_s ds].
    pub discounted_fund_integral: Estimate,
    /// E[e^{−rT}F_T; τ > T] + E[∫_0^{τ∧T} e^{−rs}(w + mF_s) ds], equal to G.
    pub dynkin_lhs: Estimate,
}

/// Simulates the fund dF = ((r−m)F − w)dt + σF dW from G, absorbed at 0,
/// over [0, G/w]. The step is cfg.dt in reduced units, 4·dt/σ² in years.
pub fn simulate_gmwb(mp: &ModelParams, cfg: &McConfig) -> Result<GmwbEstimates> {
    mp.validate()?;
    cfg.validate()?;
    let big_t = mp.maturity();
    let steps = (big_t * mp.sigma * mp.sigma / (4.0 * cfg.dt)).ceil().max(1.0) as usize;
    let h = big_t / steps as f64;
    // F_s = w e^{X_s}(G/w − ∫_0^s e^{−X_u} du), X = (r − m − σ²/2)s + σW
    let e = Exponent {
        drift: -(mp.r - mp.m - 0.5 * mp.sigma * mp.sigma),
        vol: mp.sigma,
    };
    let level = mp.g / mp.w;
    let factor = e.bridge_factor(h);
    let sd = e.vol * h.sqrt();
    let rows = map_indices(cfg.n_paths, cfg.parallel, |path| {
        let mut rng = PathRng::new(cfg, TAG_FUND, path);
        let (mut c, mut acc) = (0.0, 0.0);
        let mut fund = mp.g;
        let mut integral = 0.0;
        let mut ruin = None;
        for k in 0..steps {
            let t = k as f64 * h;
            let c1 = c + e.drift * h + sd * rng.normal();
            let inc = factor * loglinear_integral(c, c1, h);
            if acc + inc >= level {
                let s = loglinear_inverse(c, c1, h, (level - acc) / factor);
                integral += 0.5 * s * (-mp.r * t).exp() * fund;
                ruin = Some(t + s);
                break;
            }
            acc += inc;
            let next = mp.w * (-c1).exp() * (level - acc);
            integral += 0.5 * h * ((-mp.r * t).exp() * fund + (-mp.r * (t + h)).exp() * next);
            fund = next;
            c = c1;
        }
        let disc_t = (-mp.r * big_t).exp();
        let (terminal, ruined, disc_ruin, stop) = match ruin {
            Some(tau) => (0.0, 1.0, (-mp.r * tau).exp(), tau),
            None => (disc_t * fund, 0.0, 0.0, big_t),
        };
        let annuity = if mp.r == 0.0 { stop } else { -(-mp.r * stop).exp_m1() / mp.r };
        let lhs = terminal + mp.w * annuity + mp.m * integral;
        [terminal, ruined, disc_ruin, integral, lhs]
    });
    let column = |j: usize| {
        let xs: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        if cfg.antithetic {
            Estimate::from_pairs(&xs)
        } else {
            Estimate::from_samples(&xs)
        }
    };
    Ok(GmwbEstimates {
        discounted_fund: column(0),
        ruin_probability: column(1),
        discounted_ruin: column(2),
        discounted_fund_integral: column(3),
        dynkin_lhs: column(4),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hitting::{laplace_tau_general, TauLaw};

    fn cfg(n: usize, dt: f64) -> McConfig {
        McConfig { n_paths: n, dt, seed: 7, ..McConfig::default() }
    }

    #[test]
    fn loglinear_inverse_round_trip() {
        for &(c0, c1) in &[(0.3, -0.4), (0.0, 0.0), (-1.0, 2.0)] {
            let full = loglinear_integral(c0, c1, 0.01);
            let s = loglinear_inverse(c0, c1, 0.01, 0.4 * full);
            let part = loglinear_integral(c0, c0 + (c1 - c0) * s / 0.01, s);
            assert!((part - 0.4 * full).abs() < 1e-14);
        }
    }

    #[test]
    fn mean_of_a_at_zero_drift() {
        // E[A_t] = (e^{2t} − 1)/2 for ν = 0
        let t = 0.5;
        let xs = simulate_a(0.0, t, &cfg(40_000, 1e-3)).unwrap();
        let est = Estimate::from_samples(&xs);
        assert!(est.within(((2.0 * t).exp() - 1.0) / 2.0, 3.0), "{est:?}");
    }

    #[test]
    fn a_paths_increase() {
        let p = sample_path_a(0.5, 1.0, &cfg(1, 1e-3), 3).unwrap();
        assert!(p.values.windows(2).all(|w| w[1] >= w[0]));
        assert!(p.times.windows(2).all(|w| w[1] > w[0]) && p.times[0] == 0.0);
    }

    #[test]
    fn identical_configs_give_identical_draws() {
        let c = cfg(2_000, 1e-3);
        let a = simulate_hitting_h(1.0, 0.5, &c).unwrap();
        let b = simulate_hitting_h(1.0, 0.5, &c).unwrap();
        assert_eq!(a, b);
        let seq = McConfig { parallel: false, ..c };
        assert_eq!(simulate_hitting_h(1.0, 0.5, &seq).unwrap(), a);
        // each path depends only on its own index
        let more = simulate_hitting_h(1.0, 0.5, &McConfig { n_paths: 3_000, ..c }).unwrap();
        assert_eq!(&more.times[..2_000], &a.times[..]);
    }

    #[test]
    fn antithetic_pairs_mirror() {
        let c = McConfig { antithetic: true, ..cfg(4, 1e-3) };
        let mut a = PathRng::new(&c, TAG_A, 2);
        let mut b = PathRng::new(&c, TAG_A, 3);
        for _ in 0..10 {
            assert_eq!(a.normal(), -b.normal());
        }
        let mut other = PathRng::new(&c, TAG_H, 2);
        assert_ne!(PathRng::new(&c, TAG_A, 2).normal(), other.normal());
    }

    #[test]
    fn hitting_is_monotone_in_level() {
        let hs = simulate_hitting_h_levels(1.0, &[0.2, 0.5, 0.9], &cfg(500, 1e-3)).unwrap();
        for i in 0..500 {
            assert!(hs[0].times[i] <= hs[1].times[i] && hs[1].times[i] <= hs[2].times[i]);
        }
    }

    #[test]
    fn laplace_of_tau_matches() {
        let (nu, y) = (-0.5, 0.3);
        let c = cfg(20_000, 1e-3);
        let s = simulate_hitting_tau(nu, y, &c).unwrap();
        let est = s.estimate(false, |t| (-t).exp());
        let exact = TauLaw::new(nu, y).unwrap().laplace(1.0).unwrap();
        assert!(est.within(exact, 3.5), "{est:?} vs {exact}");
    }

    #[test]
    fn escape_mass_matches_eventual_passage() {
        let (nu, y) = (2.0, 0.3);
        let s = simulate_hitting_tau(nu, y, &cfg(20_000, 1e-3)).unwrap();
        let escaped: Vec<f64> = s.times.iter().map(|t| if t.is_finite() { 0.0 } else { 1.0 }).collect();
        let est = Estimate::from_samples(&escaped);
        let exact = 1.0 - TauLaw::new(nu, y).unwrap().prob_finite();
        assert!(est.within(exact, 3.5), "{est:?} vs {exact}");
    }

    #[test]
    fn passage_between_levels() {
        let d = DiffusionParams::new(0.05, 0.3, 1.0).unwrap();
        let s = simulate_passage(&d, 0.5, &cfg(20_000, 1e-4)).unwrap();
        let est = s.estimate(false, |t| (-0.8 * t).exp());
        let exact = laplace_tau_general(&d, 0.5, 0.8).unwrap();
        assert!(est.within(exact, 3.5), "{est:?} vs {exact}");
        assert!(simulate_passage(&d, -0.5, &cfg(10, 1e-3)).is_err());
    }

    #[test]
    fn small_levels_are_refused() {
        assert!(simulate_hitting_tau(1.0, 5e-4, &cfg(10, 1e-4)).is_err());
    }

    #[test]
    fn fund_satisfies_dynkin_identity() {
        let mp = ModelParams::new(0.05, 0.2, 100.0, 5.0, 0.013, 0.013).unwrap();
        let e = simulate_gmwb(&mp, &cfg(20_000, 1e-3)).unwrap();
        assert!(e.dynkin_lhs.within(mp.g, 3.5), "{:?}", e.dynkin_lhs);
        assert!(e.ruin_probability.mean > 0.0 && e.ruin_probability.mean < 1.0);
    }
}
