//! Standard normal distribution functions and probabilist's Hermite polynomials.
//!
//! Every other module is built on these. The CDF goes through `erfc` so the
//! lower tail keeps full relative precision; the quantile is a rational
//! approximation polished by one Halley step against that CDF.

use crate::error::{Error, Result};

/// Highest Hermite order accepted by [`hermite`] and [`hermite_deriv`].
pub const MAX_HERMITE_ORDER: usize = 10;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// He_k(x) for the probabilist's Hermite polynomials, by the three-term
/// recurrence He_{k+1} = x He_k - k He_{k-1}.
pub fn hermite(k: usize, x: f64) -> Result<f64> {
    if k > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder {
            order: k,
            max: MAX_HERMITE_ORDER,
        });
    }
    Ok(hermite_table(x)[k])
}

/// He'_k(x) = k He_{k-1}(x).
pub fn hermite_deriv(k: usize, x: f64) -> Result<f64> {
    if k == 0 || k > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder {
            order: k,
            max: MAX_HERMITE_ORDER,
        });
    }
    Ok(k as f64 * hermite_table(x)[k - 1])
}

/// He_0(x) ..= He_10(x) in one pass of the recurrence.
pub fn hermite_table(x: f64) -> [f64; MAX_HERMITE_ORDER + 1] {
    let mut he = [0.0; MAX_HERMITE_ORDER + 1];
    he[0] = 1.0;
    he[1] = x;
    for k in 1..MAX_HERMITE_ORDER {
        he[k + 1] = x * he[k] - k as f64 * he[k - 1];
    }
    he
}

#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse of [`norm_cdf`] on the open interval (0, 1).
pub fn norm_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain {
            what: "norm_quantile",
            value: q,
            domain: "(0, 1)",
        });
    }
    // 1 - q is exact for q >= 0.5, so reflecting keeps the upper tail as
    // accurate as the lower one.
    if q > 0.5 {
        Ok(-lower_quantile(1.0 - q))
    } else {
        Ok(lower_quantile(q))
    }
}

/// Quantile for q in (0, 0.5].
fn lower_quantile(q: f64) -> f64 {
    let x = acklam(q);
    // Halley step on Phi(x) - q.
    let e = norm_cdf(x) - q;
    let u = e * SQRT_2PI * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Acklam's rational approximation, relative error about 1.15e-9.
fn acklam(q: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const Q_LOW: f64 = 0.024_25;

    if q < Q_LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else {
        let r = q - 0.5;
        let s = r * r;
        (((((A[0] * s + A[1]) * s + A[2]) * s + A[3]) * s + A[4]) * s + A[5]) * r
            / (((((B[0] * s + B[1]) * s + B[2]) * s + B[3]) * s + B[4]) * s + 1.0)
    }
}
