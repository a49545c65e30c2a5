//! Edgeworth approximations for the standardized sample mean.
//!
//! With Y = √n (m̄ − μ)/σ the series is written at t = −c, with c the
//! c-statistic, so the Hermite polynomials take the argument c = −t and the
//! density weight is φ(c) = φ(t):
//!
//! ```text
//! Pr{Y ≤ −c} = Φ(−c)
//!            − φ(c) [ ζ₃/(6√n) He₂(c) ]
//!            + φ(c) [ ζ₄/(24n) He₃(c) + ζ₃²/(72n) He₅(c) ]
//!            − φ(c) [ ζ₅/(120 n^{3/2}) He₄(c) + ζ₃ζ₄/(144 n^{3/2}) He₆(c)
//!                     + ζ₃³/(1296 n^{3/2}) He₈(c) ]
//! ```

use serde::{Deserialize, Serialize};

use crate::cumulants::{Cumulants, Horizon};
use crate::error::{Error, Result};
use crate::special_fn::{hermite_table, norm_cdf, norm_pdf};

/// Bracket coefficients in print order: 1/6; 1/24, 1/72; 1/120, 1/144, 1/1296.
pub const BRACKET_COEFFICIENTS: [f64; 6] = [
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 72.0,
    1.0 / 120.0,
    1.0 / 144.0,
    1.0 / 1296.0,
];

/// Number of correction brackets kept after Φ (0 = plain normal, at most 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeworthOrder(u8);

impl EdgeworthOrder {
    pub const NORMAL: Self = Self(0);
    pub const MAX: u8 = 3;

    pub fn new(order: u8) -> Result<Self> {
        if order > Self::MAX {
            return Err(Error::UnsupportedOrder {
                order: order as usize,
                max: Self::MAX as usize,
            });
        }
        Ok(Self(order))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Highest ζ index the truncation reads.
    pub fn required_cumulant(self) -> usize {
        self.0 as usize + 2
    }
}

/// An Edgeworth probability. Truncated series can leave [0, 1] in the tails;
/// the value is reported as computed and flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeworthValue {
    pub value: f64,
    pub out_of_unit_interval: bool,
}

impl EdgeworthValue {
    fn new(value: f64) -> Self {
        Self {
            value,
            out_of_unit_interval: !(0.0..=1.0).contains(&value),
        }
    }
}

fn require_through(c: &Cumulants, order: EdgeworthOrder) -> Result<()> {
    for i in 3..=order.required_cumulant() {
        c.require(i)?;
    }
    Ok(())
}

/// Edgeworth approximation to Pr{√n (m̄ − μ)/σ ≤ t} from per-period
/// cumulants `c`.
pub fn edgeworth_cdf(c: &Cumulants, n: f64, t: f64, order: EdgeworthOrder) -> Result<EdgeworthValue> {
    Ok(EdgeworthValue::new(norm_cdf(t) + edgeworth_correction(c, n, t, order)?))
}

/// The expansion minus its leading Φ(t), so that 1 − F can be formed as
/// Φ(−t) − correction without cancellation.
pub(crate) fn edgeworth_correction(c: &Cumulants, n: f64, t: f64, order: EdgeworthOrder) -> Result<f64> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n,
            reason: "must be positive and finite",
        });
    }
    require_through(c, order)?;

    let arg = -t;
    let he = hermite_table(arg);
    let dens = norm_pdf(arg);
    let z = |i: usize| c.zeta(i).unwrap_or(0.0);
    let [k1, k2, k3, k4, k5, k6] = BRACKET_COEFFICIENTS;

    let mut p = 0.0;
    if order.0 >= 1 {
        p -= dens * (k1 * z(3) / n.sqrt() * he[2]);
    }
    if order.0 >= 2 {
        p += dens * ((k2 * z(4) * he[3] + k3 * z(3).powi(2) * he[5]) / n);
    }
    if order.0 >= 3 {
        let (z3, z4, z5) = (z(3), z(4), z(5));
        p -= dens
            * ((k4 * z5 * he[4] + k5 * z3 * z4 * he[6] + k6 * z3.powi(3) * he[8]) / n.powf(1.5));
    }
    Ok(p)
}

/// First-order Edgeworth approximation to Pr{m̄ ≥ r₀}:
/// Φ(c) + φ(c)/√n · ζ₃/6 · (c² − 1).
pub fn exceed_probability(c: &Cumulants, h: &Horizon) -> Result<EdgeworthValue> {
    let z3 = c.require(3)?;
    let n = h.n_periods();
    let cs = h.c_statistic(c);
    let p = norm_cdf(cs) + norm_pdf(cs) / n.sqrt() * (BRACKET_COEFFICIENTS[0] * z3 * (cs * cs - 1.0));
    Ok(EdgeworthValue::new(p))
}

/// Chebyshev bound min(1, 1/snr²) on Pr{x ≤ r₀}; defined for snr > 0.
pub fn chebyshev_loss_bound(snr: f64) -> Result<f64> {
    if !(snr > 0.0) {
        return Err(Error::Domain {
            what: "chebyshev_loss_bound",
            value: snr,
            domain: "snr > 0",
        });
    }
    Ok((1.0 / (snr * snr)).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkewSign {
    /// Exceedance probability rises with ζ₃.
    Positive,
    /// Exceedance probability falls with ζ₃.
    Negative,
    Neutral,
}

impl SkewSign {
    pub fn signum(self) -> i8 {
        match self {
            SkewSign::Positive => 1,
            SkewSign::Negative => -1,
            SkewSign::Neutral => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewPreference {
    pub sign: SkewSign,
    /// n* = σ²/(μ − r₀)², present only when μ > r₀.
    pub crossover_horizon: Option<f64>,
}

/// Sign of c² − 1: whether the first-order exceedance probability rewards
/// or penalizes skew at this horizon.
pub fn skew_preference(c: &Cumulants, h: &Horizon) -> SkewPreference {
    let cs = h.c_statistic(c);
    let d = cs * cs - 1.0;
    let sign = if d > 0.0 {
        SkewSign::Positive
    } else if d < 0.0 {
        SkewSign::Negative
    } else {
        SkewSign::Neutral
    };
    let excess = c.mean() - h.disaster_rate();
    let crossover_horizon = (excess > 0.0).then(|| (c.volatility() / excess).powi(2));
    SkewPreference {
        sign,
        crossover_horizon,
    }
}
