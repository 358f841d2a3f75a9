//! GMWB valuation: the fund F with dF = ((r−m)F − w)dt + σF dW is mapped to
//! the reduced process Y through F_s = (4w/σ²)·Y_{σ²s/4}, the building
//! blocks h, a, b, c, d are computed in reduced units, and the two pricing
//! equations are solved for the fee.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hitting::talbot;
use crate::hitting::{TauLaw, SPECTRAL_MIN_T};
use crate::specfun::{exp_integral_e1, Complex};

/// |ν+1| below this selects the ν = −1 formulas.
pub const NU_MINUS_ONE_TOL: f64 = 1e-8;
/// Distance at which two poles of the d-transform are treated as merged.
pub const POLE_MERGE_TOL: f64 = 1e-9;

/// Market and contract inputs, all per year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub r: f64,
    pub sigma: f64,
    #[serde(rename = "G")]
    pub g: f64,
    pub w: f64,
    pub m: f64,
    pub m_w: f64,
}

impl ModelParams {
    pub fn new(r: f64, sigma: f64, g: f64, w: f64, m: f64, m_w: f64) -> Result<Self> {
        let p = Self { r, sigma, g, w, m, m_w };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.r, self.sigma, self.g, self.w, self.m, self.m_w]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite
            || !(self.sigma > 0.0)
            || !(self.g > 0.0)
            || !(self.w > 0.0)
            || !(self.r >= 0.0)
            || !(self.m >= self.m_w && self.m_w >= 0.0)
        {
            return Err(Error::domain("ModelParams", format!("{self:?}")));
        }
        Ok(())
    }

    /// Maturity G/w: the guarantee is paid out at rate w until then.
    pub fn maturity(&self) -> f64 {
        self.g / self.w
    }

    /// Copy with fee m and allocated fee link·m.
    pub fn with_fee(&self, m: f64, link: f64) -> Self {
        Self { m, m_w: link * m, ..*self }
    }
}

/// Reduced coordinates of a contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub nu: f64,
    pub y: f64,
    pub t: f64,
    pub r_hat: f64,
    pub kappa: f64,
}

impl DerivedParams {
    /// Drift coefficient 2(ν+1) of the reduced process.
    pub fn growth(&self) -> f64 {
        2.0 * (self.nu + 1.0)
    }

    pub fn at_nu_minus_one(&self) -> bool {
        (self.nu + 1.0).abs() < NU_MINUS_ONE_TOL
    }

    /// Whether the transform has poles left of the origin (ν > 2).
    pub fn has_residues(&self) -> bool {
        self.nu > 2.0
    }

    fn law(&self) -> Result<TauLaw> {
        TauLaw::new(self.nu, self.y)
    }
}

pub fn derive(mp: &ModelParams) -> Result<DerivedParams> {
    mp.validate()?;
    let s2 = mp.sigma * mp.sigma;
    let nu = (2.0 * (mp.r - mp.m) - s2) / s2;
    Ok(DerivedParams {
        nu,
        y: s2 * mp.g / (4.0 * mp.w),
        t: s2 * mp.maturity() / 4.0,
        r_hat: 4.0 * mp.r / s2,
        kappa: 0.5 * (1.0 - nu),
    })
}

/// E[e^{-qτ}] in the complex plane, as a closure for Talbot inversion.
fn transform(law: &TauLaw) -> impl Fn(Complex) -> Result<Complex> + '_ {
    move |q| law.laplace_complex(q)
}

/// y e^{−z} − ½E₁(z), z = 1/(2y): the merged-pole residue at ν = −1.
fn nu_minus_one_atom(y: f64) -> Result<f64> {
    let z = 0.5 / y;
    Ok(y * (-z).exp() - 0.5 * exp_integral_e1(z)?)
}

/// ∫_0^t e^{ku} du.
fn exp_integral_to(k: f64, t: f64) -> f64 {
    if k == 0.0 {
        t
    } else {
        (k * t).exp_m1() / k
    }
}

/// E^y[Y_u] with no absorption: y e^{αu} − ∫_0^u e^{αv} dv.
fn free_mean(alpha: f64, y: f64, u: f64) -> f64 {
    y * (alpha * u).exp() - exp_integral_to(alpha, u)
}

/// ∫_0^t e^{−r̂u} E^y[Y_u] du with no absorption.
fn free_discounted_mean(alpha: f64, r_hat: f64, y: f64, t: f64) -> f64 {
    // e^{αv} integrated over v < u, then against e^{−r̂u}
    let inner = if alpha == 0.0 {
        let k = -r_hat;
        if k == 0.0 {
            0.5 * t * t
        } else {
            (t * (k * t).exp() - exp_integral_to(k, t)) / k
        }
    } else {
        (exp_integral_to(alpha - r_hat, t) - exp_integral_to(-r_hat, t)) / alpha
    };
    y * exp_integral_to(alpha - r_hat, t) - inner
}

/// h(t) = E^y[Y_t; τ > t].
pub fn h_value(dp: &DerivedParams) -> Result<f64> {
    let law = dp.law()?;
    let alpha = dp.growth();
    let (y, t) = (dp.y, dp.t);
    if law.negligible_before(t) {
        return Ok(free_mean(alpha, y, t));
    }
    if t < SPECTRAL_MIN_T {
        let l = transform(&law);
        return talbot::invert(
            |q| Ok(y / (q - alpha) + (l(q)? - 1.0) / (q * (q - alpha))),
            t,
            alpha.max(0.0),
        );
    }
    if dp.at_nu_minus_one() {
        let cut = law.spectral(t, 0, |w| 1.0 / w)?;
        return Ok(nu_minus_one_atom(y)? + cut);
    }
    let grown = (alpha * t).exp() * (y + (law.laplace(alpha)? - 1.0) / alpha);
    let lost = (1.0 - law.prob_finite()) / alpha;
    let cut = law.spectral(t, 0, |w| 1.0 / (w + alpha))?;
    let poles = law.residue_sum(t, |s| 1.0 / (s * (s - alpha)));
    Ok(grown + lost + cut + poles)
}

/// h(t) for ν < −2, where the growing term vanishes identically and only
/// the branch-cut integral is left.
pub fn h_value_spectral(dp: &DerivedParams) -> Result<f64> {
    if !(dp.nu < -2.0) {
        return Err(Error::domain("h_value_spectral", format!("nu={} must be below -2", dp.nu)));
    }
    let alpha = dp.growth();
    dp.law()?.spectral(dp.t, 0, |w| 1.0 / (w + alpha))
}

/// a = E^y[e^{−r̂τ}].
pub fn a_value(dp: &DerivedParams) -> Result<f64> {
    dp.law()?.laplace(dp.r_hat)
}

/// b = E^y[e^{−r̂τ}; τ > t].
pub fn b_value(dp: &DerivedParams) -> Result<f64> {
    let law = dp.law()?;
    let (t, rh) = (dp.t, dp.r_hat);
    if law.negligible_before(t) {
        return law.laplace(rh);
    }
    if t < SPECTRAL_MIN_T {
        let a = law.laplace(rh)?;
        let l = transform(&law);
        return talbot::invert(|q| Ok((a - l(q + rh)?) / q), t, 0.0);
    }
    let cut = (-rh * t).exp() * law.spectral(t, 0, |w| w / (w + rh))?;
    let poles = law.residue_sum(t, |s| (-rh * t).exp() / (rh - s));
    Ok(cut + poles)
}

/// c = P^y(τ < t).
pub fn c_value(dp: &DerivedParams) -> Result<f64> {
    dp.law()?.cdf(dp.t)
}

/// d = E^y[∫_0^{τ∧t} e^{−r̂u} Y_u du].
pub fn d_value(dp: &DerivedParams) -> Result<f64> {
    let law = dp.law()?;
    let alpha = dp.growth();
    let (y, t, rh) = (dp.y, dp.t, dp.r_hat);
    if rh < POLE_MERGE_TOL {
        return Err(Error::PoleDegeneracy {
            detail: format!("discount rate r_hat={rh} merges with the pole at 0"),
        });
    }
    if law.negligible_before(t) {
        return Ok(free_discounted_mean(alpha, rh, y, t));
    }
    if t < SPECTRAL_MIN_T {
        let l = transform(&law);
        return talbot::invert(
            |q| {
                let u = q + rh;
                Ok(((l(u)? - 1.0) / (u * (u - alpha)) + y / (u - alpha)) / q)
            },
            t,
            (alpha - rh).max(0.0),
        );
    }
    let lr = law.laplace(rh)?;
    let decay = (-rh * t).exp();
    if dp.at_nu_minus_one() {
        let cut = law.spectral(t, 0, |w| 1.0 / ((w + rh) * w))?;
        return Ok((lr - 1.0) / (rh * rh) + y / rh
            - decay / rh * nu_minus_one_atom(y)?
            - decay * cut);
    }
    if (rh - alpha).abs() < POLE_MERGE_TOL {
        return Err(Error::PoleDegeneracy {
            detail: format!("r_hat={rh} coincides with 2(nu+1)={alpha}"),
        });
    }
    let at_origin = (lr - 1.0) / (rh * (rh - alpha)) + y / (rh - alpha);
    let at_discount = decay * (law.prob_finite() - 1.0) / (rh * alpha);
    let at_growth = ((alpha - rh) * t).exp()
        * ((law.laplace(alpha)? - 1.0) / ((alpha - rh) * alpha) + y / (alpha - rh));
    let poles = law.residue_sum(t, |s| decay / ((s - rh) * s * (s - alpha)));
    let cut = decay * law.spectral(t, 0, |w| 1.0 / ((w + rh) * (w + alpha)))?;
    Ok(at_origin + at_discount + at_growth + poles - cut)
}

/// (1 − e^{−rT})/r, with its limit T at r = 0.
fn annuity(r: f64, horizon: f64) -> f64 {
    if r == 0.0 {
        horizon
    } else {
        -(-r * horizon).exp_m1() / r
    }
}

/// All five building blocks at once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blocks {
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

pub fn blocks(dp: &DerivedParams) -> Result<Blocks> {
    Ok(Blocks {
        h: h_value(dp)?,
        a: a_value(dp)?,
        b: b_value(dp)?,
        c: c_value(dp)?,
        d: d_value(dp)?,
    })
}

/// Value of the guaranteed withdrawals plus the residual fund, minus G.
pub fn policyholder_gap(mp: &ModelParams) -> Result<f64> {
    let dp = derive(mp)?;
    let big_t = mp.maturity();
    let fund = (-mp.r * big_t).exp() * 4.0 * mp.w / (mp.sigma * mp.sigma) * h_value(&dp)?;
    Ok(fund + mp.w * annuity(mp.r, big_t) - mp.g)
}

/// Insurer's liability (withdrawals paid after the fund is exhausted)
/// minus the fee income allocated to the rider.
pub fn insurer_gap(mp: &ModelParams) -> Result<f64> {
    if !(mp.r > 0.0) {
        return Err(Error::PoleDegeneracy {
            detail: "insurer equation needs r > 0".into(),
        });
    }
    let dp = derive(mp)?;
    let big_t = mp.maturity();
    let (a, b, c, d) = (a_value(&dp)?, b_value(&dp)?, c_value(&dp)?, d_value(&dp)?);
    let s2 = mp.sigma * mp.sigma;
    let liability = mp.w / mp.r * (a - b) - mp.w / mp.r * (-mp.r * big_t).exp() * c;
    Ok(liability - mp.m_w * 16.0 * mp.w / (s2 * s2) * d)
}

/// Discounted stopped fund plus discounted withdrawals and fees, minus G.
/// Zero for every fee level by Dynkin's formula; requires m = m_w.
pub fn equivalence_residual(mp: &ModelParams) -> Result<f64> {
    if (mp.m - mp.m_w).abs() > 1e-15 {
        return Err(Error::domain("equivalence_residual", "requires m = m_w"));
    }
    if !(mp.r > 0.0) {
        return Err(Error::PoleDegeneracy {
            detail: "equivalence residual needs r > 0".into(),
        });
    }
    let dp = derive(mp)?;
    let big_t = mp.maturity();
    let b = blocks(&dp)?;
    let s2 = mp.sigma * mp.sigma;
    let disc = (-mp.r * big_t).exp();
    let stopped_discount = (b.a - b.b) + disc * (1.0 - b.c);
    Ok(disc * 4.0 * mp.w / s2 * b.h
        + mp.w / mp.r * (1.0 - stopped_discount)
        + mp.m * 16.0 * mp.w / (s2 * s2) * b.d
        - mp.g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Policyholder,
    Insurer,
}

impl Side {
    pub fn gap(self, mp: &ModelParams) -> Result<f64> {
        match self {
            Side::Policyholder => policyholder_gap(mp),
            Side::Insurer => insurer_gap(mp),
        }
    }
}

/// Default fee bracket, per year.
pub const FEE_BRACKET: (f64, f64) = (1e-6, 0.10);
/// Upper end used when the default bracket shows no sign change.
pub const FEE_BRACKET_EXTENDED: f64 = 0.20;
const BISECTION_WIDTH: f64 = 1e-9;
const BISECTION_STEPS: usize = 60;

/// Fair fee and its allocated part, with the basis-point roundings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairFee {
    pub m: f64,
    pub m_w: f64,
    pub m_bp: i64,
    pub m_w_bp: i64,
}

/// Basis points rounded half-up.
pub fn to_bp(rate: f64) -> i64 {
    (rate * 1e4 + 0.5).floor() as i64
}

/// Gap at fee m; on a merged pole the fee is nudged by 1e-7 and retried.
fn gap_at(side: Side, template: &ModelParams, link: f64, m: f64) -> Result<f64> {
    match side.gap(&template.with_fee(m, link)) {
        Err(Error::PoleDegeneracy { .. }) => side.gap(&template.with_fee(m + 1e-7, link)),
        other => other,
    }
}

/// Bisection for the fee m at which `side`'s gap vanishes, with m_w = link·m.
pub fn solve_fair_fee(side: Side, template: &ModelParams, link: f64) -> Result<FairFee> {
    if !(link > 0.0 && link <= 1.0) {
        return Err(Error::domain("solve_fair_fee", format!("fee link {link} not in (0,1]")));
    }
    let (mut lo, mut hi) = FEE_BRACKET;
    let mut g_lo = gap_at(side, template, link, lo)?;
    let mut g_hi = gap_at(side, template, link, hi)?;
    if g_lo.signum() == g_hi.signum() {
        hi = FEE_BRACKET_EXTENDED;
        g_hi = gap_at(side, template, link, hi)?;
        if g_lo.signum() == g_hi.signum() {
            return Err(Error::NoBracket { lo, hi });
        }
    }
    let mut steps = 0;
    while hi - lo > BISECTION_WIDTH {
        if steps == BISECTION_STEPS {
            return Err(Error::NonConvergence {
                what: "fee bisection",
                iterations: steps,
            });
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = gap_at(side, template, link, mid)?;
        if g_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let m = 0.5 * (lo + hi);
    Ok(FairFee {
        m,
        m_w: link * m,
        m_bp: to_bp(m),
        m_w_bp: to_bp(link * m),
    })
}

/// Withdrawal rates w/G of the published grid.
pub const TABLE_WITHDRAWAL_RATES: [f64; 5] = [0.05, 0.06, 0.07, 0.08, 0.09];
/// Volatilities of the published grid.
pub const TABLE_SIGMAS: [f64; 2] = [0.2, 0.3];
/// Interest rate of the published grid.
pub const TABLE_RATE: f64 = 0.05;
/// Fee link of the second table.
pub const TABLE2_LINK: f64 = 0.8;

/// Published fair fees in bp with m = m_w, indexed [sigma][withdrawal rate].
pub const TABLE1_BP: [[i64; 5]; 2] = [[29, 41, 54, 68, 82], [77, 104, 132, 162, 192]];

/// Published (m, m_w) in bp with m_w = 0.8m, indexed [sigma][withdrawal rate].
pub const TABLE2_BP: [[(i64, i64); 5]; 2] = [
    [(37, 29), (53, 42), (71, 56), (90, 72), (110, 88)],
    [(101, 81), (139, 111), (179, 143), (222, 178), (267, 213)],
];

/// Contract template of a table cell, with G = 100 and the fee left at 0.
pub fn table_template(sigma: f64, withdrawal_rate: f64) -> ModelParams {
    ModelParams {
        r: TABLE_RATE,
        sigma,
        g: 100.0,
        w: 100.0 * withdrawal_rate,
        m: 0.0,
        m_w: 0.0,
    }
}
