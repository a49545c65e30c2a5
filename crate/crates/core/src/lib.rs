//! Roy's safety-first criterion for non-normal returns.
//!
//! The generalized criterion Ψ̂ = −Φ⁻¹(Pr{m̄ ≤ r₀}) ranks assets by the
//! probability that the mean return over a horizon of n periods beats a
//! disaster rate r₀. It equals the Sharpe ratio for normal returns and, unlike
//! the Sharpe ratio, never contradicts first-order stochastic dominance.
//!
//! ```
//! use safety_first::{roy_cf_quadratic, Cumulants, Horizon};
//!
//! // Daily Sharpe 0.07 with skewness −1, over a quarter (60 days).
//! let c = Cumulants::new(0.07, 1.0, &[-1.0])?;
//! let score = roy_cf_quadratic(&c, &Horizon::new(60.0, 0.0)?)?;
//! assert!((score.value - 0.0719).abs() < 5e-4);
//! # Ok::<(), safety_first::Error>(())
//! ```

pub mod counterexample;
pub mod cumulants;
pub mod edgeworth;
mod error;
pub mod montecarlo;
pub mod roy;
pub mod special_fn;

pub use counterexample::{
    bonus_cdf, bonus_mean, bonus_sharpe, min_reversal_bonus, reversal_p_bound,
    verify_dominance_and_reversal, BonusAsset, DominanceReport,
};
pub use cumulants::{estimate_cumulants, gamma_cumulants, scale_to_horizon, Cumulants, Horizon};
pub use edgeworth::{
    chebyshev_loss_bound, edgeworth_cdf, exceed_probability, skew_preference, EdgeworthOrder,
    EdgeworthValue, SkewPreference, SkewSign,
};
pub use error::{Error, Result};
pub use montecarlo::{
    empirical_loss_probability, fosd_check, simulate, DominanceVerdict, EmpiricalSample, Family,
    GeneratorSpec,
};
pub use roy::{
    roy_cf_newton, roy_cf_quadratic, roy_edgeworth_invert, roy_exact, sharpe, sr3_skew_adjusted,
    CdfOracle, Method, RiskScore,
};
pub use special_fn::{hermite, hermite_deriv, norm_cdf, norm_pdf, norm_quantile};
