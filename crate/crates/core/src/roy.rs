//! The generalized Roy criterion Ψ̂ = −Φ⁻¹(Pr{loss}) and its approximations.
//!
//! Ψ̂ agrees with the Sharpe ratio when returns are normal. For other
//! distributions it can be computed exactly from a CDF, by inverting an
//! Edgeworth probability, or from the Cornish–Fisher equation
//!
//! ```text
//! Ψ̂ = snr + (1/n)      [ ζ₃/6 He₂(√n Ψ̂) ]
//!         − (1/n^{3/2}) [ ζ₄/24 He₃(√n Ψ̂) − ζ₃²/36 (2He₃(√n Ψ̂) + He₁(√n Ψ̂)) ]
//!         + (1/n²)      [ ζ₅/120 He₄(−√n Ψ̂) − ζ₃ζ₄/24 (He₄ + He₂)(−√n Ψ̂)
//!                         + ζ₃³/324 (12He₄ + 19He₂)(−√n Ψ̂) ]
//! ```
//!
//! solved by Newton's method, or in closed form when only the first
//! correction is kept.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cumulants::{Cumulants, Horizon};
use crate::edgeworth::{edgeworth_correction, EdgeworthOrder};
use crate::error::{Error, Result};
use crate::special_fn::{hermite_table, norm_cdf, norm_quantile};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 50;
const SINGULAR_DERIVATIVE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "k")]
pub enum Method {
    Sharpe,
    Sr3,
    Exact,
    EdgeworthInvert(u8),
    CfNewton(u8),
    CfQuadratic,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Sharpe => write!(f, "sharpe"),
            Method::Sr3 => write!(f, "sr3"),
            Method::Exact => write!(f, "exact"),
            Method::EdgeworthInvert(k) => write!(f, "edgeworth:{k}"),
            Method::CfNewton(k) => write!(f, "cf-newton:{k}"),
            Method::CfQuadratic => write!(f, "cf-quadratic"),
        }
    }
}

/// Which sign of the ± in 3/ζ₃ ± √D was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootBranch {
    Plus,
    Minus,
    /// ζ₃ = 0: the equation is linear and Ψ̂ = snr.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub residual: Option<f64>,
    pub branch: Option<RootBranch>,
    pub converged: bool,
    /// Newton failed and bisection produced the root.
    pub bisection_fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskScore {
    pub value: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl RiskScore {
    fn closed_form(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            diagnostics: Diagnostics {
                converged: true,
                ..Diagnostics::default()
            },
        }
    }
}

/// A CDF t ↦ Pr{x ≤ t}.
///
/// For a horizon of n periods the oracle describes the n-period *mean*
/// return, which is what gets compared with r₀.
pub struct CdfOracle<'a> {
    cdf: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    /// 1 − F(t) computed directly, when the caller can do better than
    /// subtracting from one.
    survival: Option<Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>>,
}

impl fmt::Debug for CdfOracle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CdfOracle").finish_non_exhaustive()
    }
}

/// ±10^k for k = −4..=5, sorted.
fn probe_points() -> [f64; 20] {
    let mut p = [0.0; 20];
    for (i, k) in (-4..=5).enumerate() {
        let v = 10f64.powi(k);
        p[9 - i] = -v;
        p[10 + i] = v;
    }
    p
}

impl<'a> CdfOracle<'a> {
    /// Wraps `cdf`, rejecting it if 20 sorted probes show a value outside
    /// [0, 1] or a decrease.
    pub fn new(cdf: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Result<Self> {
        let mut prev = 0.0;
        for t in probe_points() {
            let v = cdf(t);
            if !(0.0..=1.0).contains(&v) || v < prev {
                return Err(Error::InvalidOracle { at: t });
            }
            prev = v;
        }
        Ok(Self {
            cdf: Box::new(cdf),
            survival: None,
        })
    }

    /// Like [`new`](Self::new), with an accurate upper tail `survival(t) = 1 − F(t)`.
    pub fn with_survival(
        cdf: impl Fn(f64) -> f64 + Send + Sync + 'a,
        survival: impl Fn(f64) -> f64 + Send + Sync + 'a,
    ) -> Result<Self> {
        let mut oracle = Self::new(cdf)?;
        for t in probe_points() {
            let (f, s) = (oracle.eval(t), survival(t));
            if !(0.0..=1.0).contains(&s) || (f + s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidOracle { at: t });
            }
        }
        oracle.survival = Some(Box::new(survival));
        Ok(oracle)
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sd",
                value: sd,
                reason: "must be positive",
            });
        }
        Self::with_survival(move |t| norm_cdf((t - mean) / sd), move |t| norm_cdf((mean - t) / sd))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.cdf)(t)
    }

    /// 1 − F(t).
    pub fn survival(&self, t: f64) -> f64 {
        match &self.survival {
            Some(s) => s(t),
            None => 1.0 - self.eval(t),
        }
    }

    /// Smallest t with F(t) ≥ q, by bracketing and bisection.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain {
                what: "CdfOracle::quantile",
                value: q,
                domain: "(0, 1)",
            });
        }
        let mut step = 1.0;
        let mut lo = -1.0;
        while self.eval(lo) >= q {
            step *= 2.0;
            lo = -step;
            if step > 1e300 {
                return Err(Error::InvalidOracle { at: lo });
            }
        }
        step = 1.0;
        let mut hi = 1.0;
        while self.eval(hi) < q {
            step *= 2.0;
            hi = step;
            if step > 1e300 {
                return Err(Error::InvalidOracle { at: hi });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) >= q {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

/// (μ − r₀)/σ, per period.
pub fn sharpe(c: &Cumulants, h: &Horizon) -> RiskScore {
    RiskScore::closed_form(c.snr(h.disaster_rate()), Method::Sharpe)
}

/// Ψ̂ = −Φ⁻¹(F(r₀))/√n, where F is the CDF of the n-period mean return.
pub fn roy_exact(cdf: &CdfOracle<'_>, h: &Horizon) -> Result<RiskScore> {
    let r0 = h.disaster_rate();
    let p = cdf.eval(r0);
    // Above the median invert the upper tail, which a CDF value near one
    // has already rounded away.
    let z = if p > 0.5 {
        let s = cdf.survival(r0);
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Saturated { probability: 1.0 - s });
        }
        norm_quantile(s)?
    } else if p > 0.0 {
        -norm_quantile(p)?
    } else {
        return Err(Error::Saturated { probability: p });
    };
    let value = z / h.n_periods().sqrt();
    Ok(RiskScore::closed_form(value, Method::Exact))
}

/// Ψ̂ = −Φ⁻¹(P)/√n with P the Edgeworth approximation of Pr{Y ≤ −c}.
pub fn roy_edgeworth_invert(c: &Cumulants, h: &Horizon, order: EdgeworthOrder) -> Result<RiskScore> {
    let n = h.n_periods();
    let t = -h.c_statistic(c);
    let correction = edgeworth_correction(c, n, t, order)?;
    let p = norm_cdf(t) + correction;
    let z = if p > 0.5 {
        // 1 − P without the cancellation.
        let q = norm_cdf(-t) - correction;
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::ApproximationBreakdown { value: 1.0 - q });
        }
        norm_quantile(q)?
    } else if p > 0.0 {
        -norm_quantile(p)?
    } else {
        return Err(Error::ApproximationBreakdown { value: p });
    };
    let value = z / n.sqrt();
    Ok(RiskScore::closed_form(value, Method::EdgeworthInvert(order.get())))
}

/// F(s) = s − RHS(s) for the Cornish–Fisher equation truncated to `terms`
/// groups, and F'(s).
struct CfEquation {
    snr: f64,
    n: f64,
    terms: u8,
    z3: f64,
    z4: f64,
    z5: f64,
}

impl CfEquation {
    fn new(c: &Cumulants, h: &Horizon, terms: u8) -> Result<Self> {
        if !(2..=4).contains(&terms) {
            return Err(Error::UnsupportedOrder {
                order: terms as usize,
                max: 4,
            });
        }
        let z3 = c.require(3)?;
        let z4 = if terms >= 3 { c.require(4)? } else { 0.0 };
        let z5 = if terms >= 4 { c.require(5)? } else { 0.0 };
        Ok(Self {
            snr: c.snr(h.disaster_rate()),
            n: h.n_periods(),
            terms,
            z3,
            z4,
            z5,
        })
    }

    /// Largest standardized cumulant magnitude in use.
    fn scale(&self) -> f64 {
        self.z3.abs().max(self.z4.abs()).max(self.z5.abs())
    }

    fn eval(&self, s: f64) -> (f64, f64) {
        let rn = self.n.sqrt();
        let x = rn * s;
        let he = hermite_table(x);
        // Derivative of He_k(a s) in s is a k He_{k−1}(a s).
        let dhe = |k: usize, a: f64, tab: &[f64]| a * k as f64 * tab[k - 1];

        let (z3, z4, z5) = (self.z3, self.z4, self.z5);
        let mut rhs = self.snr;
        let mut drhs = 0.0;

        let g1 = z3 / 6.0;
        rhs += g1 * he[2] / self.n;
        drhs += g1 * dhe(2, rn, &he) / self.n;

        if self.terms >= 3 {
            let w = self.n.powf(1.5);
            let a = z4 / 24.0;
            let b = z3 * z3 / 36.0;
            rhs -= (a * he[3] - b * (2.0 * he[3] + he[1])) / w;
            drhs -= (a * dhe(3, rn, &he) - b * (2.0 * dhe(3, rn, &he) + dhe(1, rn, &he))) / w;
        }
        if self.terms >= 4 {
            let w = self.n * self.n;
            let hm = hermite_table(-x);
            let a = z5 / 120.0;
            let b = z3 * z4 / 24.0;
            let d = z3.powi(3) / 324.0;
            rhs += (a * hm[4] - b * (hm[4] + hm[2]) + d * (12.0 * hm[4] + 19.0 * hm[2])) / w;
            let d4 = dhe(4, -rn, &hm);
            let d2 = dhe(2, -rn, &hm);
            drhs += (a * d4 - b * (d4 + d2) + d * (12.0 * d4 + 19.0 * d2)) / w;
        }
        (s - rhs, 1.0 - drhs)
    }
}

/// Root of the truncated Cornish–Fisher equation by Newton's method from
/// s₀ = snr, falling back to one bisection pass on
/// [snr − 3m, snr + 3m] (m the largest |ζ_i| in use) before failing.
pub fn roy_cf_newton(c: &Cumulants, h: &Horizon, terms: u8, tol: f64, max_iter: usize) -> Result<RiskScore> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must be positive",
        });
    }
    let eq = CfEquation::new(c, h, terms)?;
    let method = Method::CfNewton(terms);

    let mut s = eq.snr;
    let mut trajectory = Vec::with_capacity(max_iter.min(64));
    let mut failure = None;
    for iter in 1..=max_iter {
        let (f, df) = eq.eval(s);
        trajectory.push(s);
        if f.abs() <= tol {
            return Ok(RiskScore {
                value: s,
                method,
                diagnostics: Diagnostics {
                    iterations: iter,
                    residual: Some(f.abs()),
                    converged: true,
                    ..Diagnostics::default()
                },
            });
        }
        if !(df.abs() >= SINGULAR_DERIVATIVE) {
            failure = Some(Error::SingularStep { at: s, derivative: df });
            break;
        }
        s -= f / df;
        if !s.is_finite() {
            break;
        }
    }

    let half_width = 3.0 * eq.scale().max(1e-6);
    if let Some((root, residual, iterations)) =
        bisect(|s| eq.eval(s).0, eq.snr - half_width, eq.snr + half_width, tol)
    {
        return Ok(RiskScore {
            value: root,
            method,
            diagnostics: Diagnostics {
                iterations: trajectory.len() + iterations,
                residual: Some(residual),
                converged: true,
                bisection_fallback: true,
                ..Diagnostics::default()
            },
        });
    }

    Err(failure.unwrap_or_else(|| {
        let residual = trajectory.last().map_or(f64::NAN, |&s| eq.eval(s).0.abs());
        Error::SolverFailure {
            iterations: trajectory.len(),
            residual,
            trajectory,
        }
    }))
}

/// Bisection to |f| ≤ tol; `None` without a sign change on [lo, hi].
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<(f64, f64, usize)> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return None;
    }
    for iter in 1..=200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol {
            return Some((mid, fm.abs(), iter));
        }
        if mid <= lo || mid >= hi {
            return None;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    None
}

/// Closed-form root of the two-group truncation:
/// Ψ̂ = 3/ζ₃ − sign(ζ₃) √(9/ζ₃² + 1/n − 6 snr/ζ₃),
/// the branch that tends to snr as ζ₃ → 0.
pub fn roy_cf_quadratic(c: &Cumulants, h: &Horizon) -> Result<RiskScore> {
    let z3 = c.require(3)?;
    let snr = c.snr(h.disaster_rate());
    if z3 == 0.0 {
        let mut score = RiskScore::closed_form(snr, Method::CfQuadratic);
        score.diagnostics.branch = Some(RootBranch::Degenerate);
        return Ok(score);
    }
    let n = h.n_periods();
    let a = 3.0 / z3;
    let disc = a * a + 1.0 / n - 6.0 * snr / z3;
    if disc < 0.0 {
        return Err(Error::NoRealRoot { discriminant: disc });
    }
    let sign = z3.signum();
    // The roots multiply to 6 snr/ζ₃ − 1/n; dividing by the far root avoids
    // the cancellation in a − sign·√D.
    let far = a + sign * disc.sqrt();
    let value = (6.0 * snr / z3 - 1.0 / n) / far;
    let mut score = RiskScore::closed_form(value, Method::CfQuadratic);
    score.diagnostics.branch = Some(if sign > 0.0 { RootBranch::Minus } else { RootBranch::Plus });
    Ok(score)
}

/// snr √(1 + b₃ ζ₃ snr / 3).
pub fn sr3_skew_adjusted(c: &Cumulants, h: &Horizon, b3: f64) -> Result<RiskScore> {
    let z3 = c.require(3)?;
    let snr = c.snr(h.disaster_rate());
    let radicand = 1.0 + b3 * z3 * snr / 3.0;
    if radicand < 0.0 {
        return Err(Error::Domain {
            what: "sr3_skew_adjusted",
            value: radicand,
            domain: "1 + b3 zeta3 snr / 3 >= 0",
        });
    }
    Ok(RiskScore::closed_form(snr * radicand.sqrt(), Method::Sr3))
}
