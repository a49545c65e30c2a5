//! An asset that first-order stochastically dominates another yet has a
//! lower Sharpe ratio.
//!
//! The bonus asset y equals the base return x plus a constant bonus B with
//! probability p. Every realization of y is at least the matching x, so y
//! dominates x; but for a large enough B the bonus inflates the volatility
//! more than the mean, and the Sharpe ratio falls. The sufficient condition
//! for the reversal is
//!
//! ```text
//! p ≤ μ²/(σ² + μ²) − 2μ/B,
//! ```
//!
//! which has a positive solution only when B ≥ 2(μ + σ²/μ).

use serde::{Deserialize, Serialize};

use crate::cumulants::Horizon;
use crate::error::{Error, Result};
use crate::roy::{roy_exact, CdfOracle};

/// Base mean μ > 0 and volatility σ > 0, bonus B > 0 with probability p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BonusAsset {
    mu: f64,
    sigma: f64,
    p: f64,
    bonus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

impl BonusAsset {
    pub fn new(mu: f64, sigma: f64, p: f64, bonus: f64) -> Result<Self> {
        check_positive("mu", mu)?;
        check_positive("sigma", sigma)?;
        check_positive("bonus", bonus)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self { mu, sigma, p, bonus })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn bonus(&self) -> f64 {
        self.bonus
    }

    /// μ/σ.
    pub fn base_sharpe(&self) -> f64 {
        self.mu / self.sigma
    }

    /// Moments of y with the bonus drawn independently of x:
    /// E[y²] = σ² + μ² + 2pμB + pB², var y = σ² + p(1 − p)B².
    pub fn exact_moments(&self) -> Moments {
        let (mu, s2, p, b) = (self.mu, self.sigma * self.sigma, self.p, self.bonus);
        Moments {
            mean: mu + p * b,
            second_moment: s2 + mu * mu + 2.0 * p * mu * b + p * b * b,
            variance: s2 + p * (1.0 - p) * b * b,
        }
    }

    /// Sharpe ratio of y from [`exact_moments`](Self::exact_moments).
    pub fn exact_sharpe(&self, r0: f64) -> f64 {
        let m = self.exact_moments();
        (m.mean - r0) / m.variance.sqrt()
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive",
        })
    }
}

/// μ + pB.
pub fn bonus_mean(a: &BonusAsset) -> f64 {
    a.mu + a.p * a.bonus
}

/// (μ + pB − r₀)/√(σ² − 2μpB − p²B² + pB²).
///
/// This closed form drops the 2pμB cross term from E[y²], so its variance
/// is smaller than the exact one by 2pμB and the ratio slightly overstates
/// the true Sharpe ratio ([`BonusAsset::exact_sharpe`]). A reversal it
/// certifies therefore also holds exactly.
pub fn bonus_sharpe(a: &BonusAsset, r0: f64) -> Result<f64> {
    let (mu, s2, p, b) = (a.mu, a.sigma * a.sigma, a.p, a.bonus);
    let variance = s2 - 2.0 * mu * p * b - p * p * b * b + p * b * b;
    if !(variance > 0.0) {
        return Err(Error::InvalidParameter {
            name: "variance",
            value: variance,
            reason: "bonus-asset variance must be positive",
        });
    }
    Ok((bonus_mean(a) - r0) / variance.sqrt())
}

/// μ²/(σ² + μ²) − 2μ/B; p at or below this reverses the Sharpe ratio.
/// Non-positive values mean no reversing p exists for this B.
pub fn reversal_p_bound(mu: f64, sigma: f64, bonus: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    check_positive("sigma", sigma)?;
    check_positive("bonus", bonus)?;
    Ok(mu * mu / (sigma * sigma + mu * mu) - 2.0 * mu / bonus)
}

/// 2(μ + σ²/μ), the smallest bonus admitting a reversing p.
pub fn min_reversal_bonus(mu: f64, sigma: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    check_positive("sigma", sigma)?;
    Ok(2.0 * (mu + sigma * sigma / mu))
}

/// CDF of the bonus asset built from the base CDF:
/// F_y(t) = (1 − p) F_x(t) + p F_x(t − B).
pub fn bonus_cdf<'a>(base: &'a CdfOracle<'a>, p: f64, bonus: f64) -> Result<CdfOracle<'a>> {
    // Written as F_x(t) − p(F_x(t) − F_x(t − B)) so that F_y ≤ F_x survives
    // rounding.
    CdfOracle::with_survival(
        move |t| {
            let fx = base.eval(t);
            fx - p * (fx - base.eval(t - bonus)).max(0.0)
        },
        move |t| {
            let sx = base.survival(t);
            sx + p * (base.survival(t - bonus) - sx).max(0.0)
        },
    )
}

/// Number of quantile levels in the dominance probe grid.
pub const PROBE_POINTS: usize = 501;
pub const PROBE_TAIL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    /// F_y(t) ≤ F_x(t) at every probe.
    pub dominance_holds: bool,
    /// max over probes of F_y(t) − F_x(t) (≤ 0 when dominance holds).
    pub max_cdf_excess: f64,
    pub base_sharpe: f64,
    pub bonus_sharpe: f64,
    pub exact_bonus_sharpe: f64,
    pub sharpe_reversed: bool,
    /// Ψ̂(bonus) ≥ Ψ̂(base) at every probe disaster rate.
    pub roy_consistent: bool,
    /// Smallest Ψ̂(bonus) − Ψ̂(base) over probes.
    pub min_roy_margin: f64,
    pub probes: usize,
    /// p = 0: the two assets are the same.
    pub degenerate: bool,
}

/// Probes 501 quantile levels of the base CDF, spaced evenly on
/// [1e-5, 1 − 1e-5], for dominance and for the Ψ̂ ranking at r₀ = each probe.
pub fn verify_dominance_and_reversal(a: &BonusAsset, base_cdf: &CdfOracle<'_>) -> Result<DominanceReport> {
    let bonus = bonus_cdf(base_cdf, a.p, a.bonus)?;
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_margin = f64::INFINITY;
    let mut roy_consistent = true;
    for i in 0..PROBE_POINTS {
        let level = PROBE_TAIL + (1.0 - 2.0 * PROBE_TAIL) * i as f64 / (PROBE_POINTS - 1) as f64;
        let t = base_cdf.quantile(level)?;
        let (fx, fy) = (base_cdf.eval(t), bonus.eval(t));
        let excess = fy - fx;
        if excess > 0.0 {
            return Err(Error::DominanceViolation { at: t, gap: excess });
        }
        max_excess = max_excess.max(excess);

        let h = Horizon::single(t)?;
        let x = roy_exact(base_cdf, &h)?.value;
        let y = match roy_exact(&bonus, &h) {
            Ok(s) => s.value,
            // F_y(t) = 0 ranks the bonus asset at +∞.
            Err(Error::Saturated { probability }) if probability <= 0.0 => f64::INFINITY,
            Err(e) => return Err(e),
        };
        min_margin = min_margin.min(y - x);
        roy_consistent &= y >= x;
    }
    let bonus_sr = bonus_sharpe(a, 0.0)?;
    Ok(DominanceReport {
        dominance_holds: max_excess <= 0.0,
        max_cdf_excess: max_excess,
        base_sharpe: a.base_sharpe(),
        bonus_sharpe: bonus_sr,
        exact_bonus_sharpe: a.exact_sharpe(0.0),
        sharpe_reversed: bonus_sr < a.base_sharpe(),
        roy_consistent,
        min_roy_margin: min_margin,
        probes: PROBE_POINTS,
        degenerate: a.p == 0.0,
    })
}
