//! Standardized cumulants of a per-period return distribution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest standardized cumulant a [`Cumulants`] value may carry.
pub const MAX_CUMULANT_ORDER: usize = 7;

/// Mean, volatility and standardized cumulants ζ₃..ζ_K (K ≤ 7).
///
/// ζ_i is the i-th cumulant divided by σ^i, so ζ₃ is the skewness and ζ₄
/// the excess kurtosis. Higher orders that are not stored are *unknown*,
/// not zero; operations that need them fail with
/// [`Error::MissingCumulant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cumulants {
    mean: f64,
    volatility: f64,
    zeta: Vec<f64>,
}

impl Cumulants {
    /// `zeta[0]` is ζ₃, `zeta[1]` is ζ₄, and so on.
    pub fn new(mean: f64, volatility: f64, zeta: &[f64]) -> Result<Self> {
        if !(volatility > 0.0 && volatility.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "volatility",
                value: volatility,
                reason: "must be positive and finite",
            });
        }
        if !mean.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mean",
                value: mean,
                reason: "must be finite",
            });
        }
        if zeta.len() > MAX_CUMULANT_ORDER - 2 {
            return Err(Error::UnsupportedOrder {
                order: zeta.len() + 2,
                max: MAX_CUMULANT_ORDER,
            });
        }
        if let Some(&z) = zeta.iter().find(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "zeta",
                value: z,
                reason: "must be finite",
            });
        }
        if let [z3, z4, ..] = *zeta {
            let bound = z3 * z3 - 2.0;
            if z4 < bound {
                return Err(Error::Unrealizable { zeta4: z4, bound });
            }
        }
        Ok(Self {
            mean,
            volatility,
            zeta: zeta.to_vec(),
        })
    }

    /// Normal distribution: every standardized cumulant through order 7 is zero.
    pub fn gaussian(mean: f64, volatility: f64) -> Result<Self> {
        Self::new(mean, volatility, &[0.0; MAX_CUMULANT_ORDER - 2])
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn volatility(&self) -> f64 {
        self.volatility
    }

    /// ζ₃.. as stored.
    pub fn zetas(&self) -> &[f64] {
        &self.zeta
    }

    /// Highest order present (2 when no ζ are stored).
    pub fn max_order(&self) -> usize {
        self.zeta.len() + 2
    }

    /// ζ_i for 3 ≤ i ≤ 7, if present.
    pub fn zeta(&self, order: usize) -> Option<f64> {
        order.checked_sub(3).and_then(|i| self.zeta.get(i)).copied()
    }

    pub(crate) fn require(&self, order: usize) -> Result<f64> {
        self.zeta(order).ok_or(Error::MissingCumulant { order })
    }

    /// Same distribution with the mean moved by `shift`.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        Self::new(self.mean + shift, self.volatility, &self.zeta)
    }

    /// (μ − r₀)/σ.
    pub fn snr(&self, disaster_rate: f64) -> f64 {
        (self.mean - disaster_rate) / self.volatility
    }
}

/// Number of independent periods and the per-period disaster rate r₀.
///
/// A threshold on the total n-period log return R converts to the
/// per-period rate r₀ = R / n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    n_periods: f64,
    disaster_rate: f64,
}

impl Horizon {
    pub fn new(n_periods: f64, disaster_rate: f64) -> Result<Self> {
        if !(n_periods > 0.0 && n_periods.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "n_periods",
                value: n_periods,
                reason: "must be positive and finite",
            });
        }
        if !disaster_rate.is_finite() {
            return Err(Error::InvalidParameter {
                name: "disaster_rate",
                value: disaster_rate,
                reason: "must be finite",
            });
        }
        Ok(Self {
            n_periods,
            disaster_rate,
        })
    }

    /// Single period at the given disaster rate.
    pub fn single(disaster_rate: f64) -> Result<Self> {
        Self::new(1.0, disaster_rate)
    }

    pub fn n_periods(&self) -> f64 {
        self.n_periods
    }

    pub fn disaster_rate(&self) -> f64 {
        self.disaster_rate
    }

    /// c = √n (μ − r₀)/σ.
    pub fn c_statistic(&self, c: &Cumulants) -> f64 {
        self.n_periods.sqrt() * c.snr(self.disaster_rate)
    }
}

/// Cumulants of Y = √n (m̄ − μ)/σ, the standardized mean of `n` draws:
/// mean 0, volatility 1, ζ_i ↦ n^{1 − i/2} ζ_i.
pub fn scale_to_horizon(c: &Cumulants, n: f64) -> Result<Cumulants> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n,
            reason: "must be positive and finite",
        });
    }
    let zeta: Vec<f64> = c
        .zeta
        .iter()
        .enumerate()
        .map(|(j, z)| z * n.powf(1.0 - (j + 3) as f64 / 2.0))
        .collect();
    Ok(Cumulants {
        mean: 0.0,
        volatility: 1.0,
        zeta,
    })
}

/// Plug-in estimates of mean, volatility and ζ₃..ζ_{max_order}.
///
/// Variance uses the 1/(N−1) normalization; higher cumulants come from 1/N
/// central moments through the moment-to-cumulant relations, each divided
/// by σ^i. These are not k-statistics, so ζ_i carries O(1/N) bias.
pub fn estimate_cumulants(sample: &[f64], max_order: usize) -> Result<Cumulants> {
    if !(3..=MAX_CUMULANT_ORDER).contains(&max_order) {
        return Err(Error::UnsupportedOrder {
            order: max_order,
            max: MAX_CUMULANT_ORDER,
        });
    }
    let len = sample.len();
    if len < max_order + 1 {
        return Err(Error::SampleTooShort {
            len,
            need: max_order + 1,
        });
    }
    let nf = len as f64;
    let mean = sample.iter().sum::<f64>() / nf;

    // m[k] = (1/N) Σ (x − x̄)^k for k = 2..=7
    let mut m = [0.0f64; MAX_CUMULANT_ORDER + 1];
    for &x in sample {
        let d = x - mean;
        let mut p = d;
        for mk in m.iter_mut().skip(2).take(max_order - 1) {
            p *= d;
            *mk += p;
        }
    }
    for mk in m.iter_mut() {
        *mk /= nf;
    }
    if m[2] <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    let var = m[2] * nf / (nf - 1.0);
    let sd = var.sqrt();
    // Relative spread far below rounding noise: treat as constant.
    if sd <= 1e-14 * mean.abs() {
        return Err(Error::DegenerateSample);
    }

    let kappa = [
        m[3],
        m[4] - 3.0 * m[2] * m[2],
        m[5] - 10.0 * m[3] * m[2],
        m[6] - 15.0 * m[4] * m[2] - 10.0 * m[3] * m[3] + 30.0 * m[2].powi(3),
        m[7] - 21.0 * m[5] * m[2] - 35.0 * m[4] * m[3] + 210.0 * m[3] * m[2] * m[2],
    ];
    let zeta: Vec<f64> = kappa
        .iter()
        .take(max_order - 2)
        .enumerate()
        .map(|(j, k)| k / sd.powi(j as i32 + 3))
        .collect();
    Cumulants::new(mean, sd, &zeta)
}

/// Exact cumulants of a gamma(shape, rate) variate shifted by `shift`,
/// through order 7: κ_i = shape (i−1)! / rate^i.
pub fn gamma_cumulants(shape: f64, rate: f64, shift: f64) -> Result<Cumulants> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "shape",
            value: shape,
            reason: "must be positive",
        });
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rate",
            value: rate,
            reason: "must be positive",
        });
    }
    let mean = shape / rate + shift;
    let volatility = shape.sqrt() / rate;
    // ζ_i = (i−1)! shape^{1 − i/2}; rate cancels.
    let mut factorial = 1.0;
    let mut zeta = Vec::with_capacity(MAX_CUMULANT_ORDER - 2);
    for i in 3..=MAX_CUMULANT_ORDER {
        factorial *= (i - 1) as f64;
        zeta.push(factorial * shape.powf(1.0 - i as f64 / 2.0));
    }
    Cumulants::new(mean, volatility, &zeta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Gamma, StandardNormal};

    /// Standard errors of (ζ̂₃, ζ̂₄) from the spread of estimates over
    /// equal batches.
    fn batch_standard_errors(xs: &[f64], batches: usize) -> (f64, f64) {
        let ests: Vec<Cumulants> = xs
            .chunks(xs.len() / batches)
            .map(|b| estimate_cumulants(b, 4).unwrap())
            .collect();
        let se = |order: usize| {
            let v: Vec<f64> = ests.iter().map(|c| c.zeta(order).unwrap()).collect();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
            (var / v.len() as f64).sqrt()
        };
        (se(3), se(4))
    }

    #[test]
    fn construction_checks() {
        assert!(Cumulants::new(0.0, 0.0, &[]).is_err());
        assert!(Cumulants::new(0.0, -1.0, &[]).is_err());
        assert!(matches!(
            Cumulants::new(0.0, 1.0, &[2.0, 1.0]),
            Err(Error::Unrealizable { .. })
        ));
        // Boundary of the realizable region is allowed (two-point law).
        assert!(Cumulants::new(0.0, 1.0, &[1.0, -1.0]).is_ok());
        assert!(Cumulants::new(0.0, 1.0, &[0.0; 6]).is_err());
        assert!(Horizon::new(0.0, 0.0).is_err());
        assert!(Horizon::new(-2.0, 0.0).is_err());
    }

    #[test]
    fn zeta_lookup() {
        let c = Cumulants::new(0.1, 2.0, &[-1.0, 3.0]).unwrap();
        assert_eq!(c.zeta(3), Some(-1.0));
        assert_eq!(c.zeta(4), Some(3.0));
        assert_eq!(c.zeta(5), None);
        assert_eq!(c.zeta(2), None);
        assert_eq!(c.max_order(), 4);
        assert!(matches!(c.require(5), Err(Error::MissingCumulant { order: 5 })));
    }

    #[test]
    fn horizon_scaling_examples() {
        let c = Cumulants::new(0.01, 0.1, &[-1.0]).unwrap();
        assert_eq!(scale_to_horizon(&c, 1.0).unwrap().zeta(3), Some(-1.0));
        assert_eq!(scale_to_horizon(&c, 4.0).unwrap().zeta(3), Some(-0.5));

        let c = Cumulants::new(0.0, 1.0, &[0.6, 2.0]).unwrap();
        let y = scale_to_horizon(&c, 60.0).unwrap();
        assert_eq!(y.mean(), 0.0);
        assert_eq!(y.volatility(), 1.0);
        assert!((y.zeta(3).unwrap() - 0.077_459_666_924_148_34).abs() < 1e-15);
        assert!((y.zeta(4).unwrap() - 2.0 / 60.0).abs() < 1e-15);
        assert!(scale_to_horizon(&c, 0.0).is_err());
    }

    #[test]
    fn horizon_scaling_matches_simulated_means() {
        // Means of 60 gamma(shape 4) draws; per-period ζ₃ = 1, ζ₄ = 1.5.
        let n = 60;
        let paths = 200_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Gamma::new(4.0, 1.0).unwrap();
        let means: Vec<f64> = (0..paths)
            .map(|_| (0..n).map(|_| g.sample(&mut rng)).sum::<f64>() / n as f64)
            .collect();
        let est = estimate_cumulants(&means, 4).unwrap();
        let y = scale_to_horizon(&gamma_cumulants(4.0, 1.0, 0.0).unwrap(), n as f64).unwrap();
        let (se3, se4) = batch_standard_errors(&means, 50);
        assert!((est.zeta(3).unwrap() - y.zeta(3).unwrap()).abs() < 4.0 * se3);
        assert!((est.zeta(4).unwrap() - y.zeta(4).unwrap()).abs() < 4.0 * se4);
    }

    #[test]
    fn gamma_cumulant_examples() {
        let e = gamma_cumulants(1.0, 1.0, 0.0).unwrap();
        assert_eq!(e.mean(), 1.0);
        assert_eq!(e.volatility(), 1.0);
        assert_eq!(e.zeta(3), Some(2.0));
        assert_eq!(e.zeta(4), Some(6.0));

        let g = gamma_cumulants(4.0, 2.0, 0.0).unwrap();
        assert_eq!(g.zeta(3), Some(1.0));
        assert_eq!(g.zeta(4), Some(1.5));
        assert_eq!(g.zeta(5), Some(3.0));

        let s = gamma_cumulants(4.0, 2.0, -2.0).unwrap();
        assert_eq!(s.mean(), 0.0);
        assert_eq!(s.zetas(), g.zetas());

        assert!(gamma_cumulants(0.0, 1.0, 0.0).is_err());
        assert!(gamma_cumulants(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn estimate_rejects_bad_samples() {
        assert!(matches!(
            estimate_cumulants(&[1.0, 2.0, 3.0, 4.0], 4),
            Err(Error::SampleTooShort { len: 4, need: 5 })
        ));
        assert!(matches!(
            estimate_cumulants(&[0.5; 20], 4),
            Err(Error::DegenerateSample)
        ));
        assert!(estimate_cumulants(&[1.0; 20], 8).is_err());
        assert!(estimate_cumulants(&[1.0; 20], 2).is_err());
    }

    #[test]
    fn estimate_normal_skew_vanishes() {
        let n = 200_000;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let c = estimate_cumulants(&xs, 5).unwrap();
        assert!(c.zeta(3).unwrap().abs() < 4.0 * (6.0 / n as f64).sqrt());
        assert!(c.zeta(4).unwrap().abs() < 4.0 * (24.0 / n as f64).sqrt());
    }

    #[test]
    fn estimate_gamma_against_analytic() {
        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Gamma::new(4.0, 1.0).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| g.sample(&mut rng)).collect();
        let est = estimate_cumulants(&xs, 4).unwrap();
        let exact = gamma_cumulants(4.0, 1.0, 0.0).unwrap();
        let (se3, se4) = batch_standard_errors(&xs, 100);
        assert!((est.zeta(3).unwrap() - 1.0).abs() < 4.0 * se3, "{:?} se {se3}", est);
        assert!((est.zeta(4).unwrap() - 1.5).abs() < 4.0 * se4, "{:?} se {se4}", est);
        assert!((est.mean() - exact.mean()).abs() < 4.0 * 2.0 / (n as f64).sqrt());
        assert!((est.volatility() - exact.volatility()).abs() < 0.01);
    }

    #[test]
    fn estimate_translation_invariance() {
        let xs: Vec<f64> = (0..500).map(|i| ((i * 37 % 101) as f64 / 7.0).sin()).collect();
        let shifted: Vec<f64> = xs.iter().map(|x| x + 250.0).collect();
        let a = estimate_cumulants(&xs, 7).unwrap();
        let b = estimate_cumulants(&shifted, 7).unwrap();
        for i in 3..=7 {
            assert!((a.zeta(i).unwrap() - b.zeta(i).unwrap()).abs() < 1e-8, "order {i}");
        }
    }

    proptest! {
        #[test]
        fn scaling_composes(z3 in -3.0f64..3.0, dz in 0.0f64..5.0, z5 in -5.0f64..5.0,
                            n in 0.1f64..500.0, m in 0.1f64..500.0) {
            let c = Cumulants::new(0.3, 1.7, &[z3, z3 * z3 - 2.0 + dz, z5]).unwrap();
            let twice = scale_to_horizon(&scale_to_horizon(&c, n).unwrap(), m).unwrap();
            let once = scale_to_horizon(&c, n * m).unwrap();
            for i in 3..=5 {
                let (a, b) = (twice.zeta(i).unwrap(), once.zeta(i).unwrap());
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
            }
        }

        #[test]
        fn estimate_affine_invariance(seed in 0u64..1000, a in 0.01f64..100.0, b in -10.0f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = Gamma::new(2.0, 1.0).unwrap();
            let xs: Vec<f64> = (0..200).map(|_| g.sample(&mut rng)).collect();
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let cx = estimate_cumulants(&xs, 7).unwrap();
            let cy = estimate_cumulants(&ys, 7).unwrap();
            for i in 3..=7 {
                prop_assert!((cx.zeta(i).unwrap() - cy.zeta(i).unwrap()).abs() <= 1e-10 * cx.zeta(i).unwrap().abs().max(1.0));
            }
        }
    }
}
