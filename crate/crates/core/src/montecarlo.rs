//! Simulation oracle: seeded samplers with known cumulants, empirical CDFs
//! and the first-order stochastic dominance checker.
//!
//! Paths are generated in fixed chunks of [`CHUNK_PATHS`]. Chunk `c` draws
//! base returns from ChaCha8 stream `2c` and bonus coin flips from stream
//! `2c + 1`, so output depends only on `(spec, paths, seed)` and not on the
//! number of worker threads. Because the base stream never carries coin
//! flips, a normal sample and a bonus mixture simulated with the same seed
//! share their base draws path by path.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roy::CdfOracle;

/// Name of the generator, pinned into reports.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9), 65536-path chunks, streams 2c/2c+1";
pub const CHUNK_PATHS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Normal { mean: f64, sd: f64 },
    /// gamma(shape, rate) + shift
    ShiftedGamma { shape: f64, rate: f64, shift: f64 },
    /// Normal(mean, sd²) plus `bonus` with probability `p`.
    BonusMixture { mean: f64, sd: f64, p: f64, bonus: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    /// Each simulated value is the mean of this many per-period draws.
    pub horizon: u32,
}

impl GeneratorSpec {
    pub fn new(family: Family, horizon: u32) -> Result<Self> {
        let bad = |name, value, reason| Err(Error::InvalidParameter { name, value, reason });
        match family {
            Family::Normal { mean, sd } | Family::BonusMixture { mean, sd, .. } if !(sd > 0.0) || !mean.is_finite() => {
                return bad("sd", sd, "must be positive with a finite mean")
            }
            Family::ShiftedGamma { shape, .. } if !(shape > 0.0 && shape.is_finite()) => {
                return bad("shape", shape, "must be positive")
            }
            Family::ShiftedGamma { rate, .. } if !(rate > 0.0 && rate.is_finite()) => {
                return bad("rate", rate, "must be positive")
            }
            Family::ShiftedGamma { shift, .. } if !shift.is_finite() => return bad("shift", shift, "must be finite"),
            Family::BonusMixture { p, .. } if !(0.0..=1.0).contains(&p) => return bad("p", p, "must lie in [0, 1]"),
            Family::BonusMixture { bonus, .. } if !(bonus > 0.0 && bonus.is_finite()) => {
                return bad("bonus", bonus, "must be positive")
            }
            _ => {}
        }
        if horizon == 0 {
            return bad("horizon", 0.0, "must be at least 1");
        }
        Ok(Self { family, horizon })
    }

    /// Per-period returns (horizon 1).
    pub fn per_period(family: Family) -> Result<Self> {
        Self::new(family, 1)
    }
}

/// Sorted sample of simulated or observed per-period returns.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    seed: Option<u64>,
}

impl EmpiricalSample {
    /// Sorts `values`; rejects empty input and NaN.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SampleTooShort { len: 0, need: 1 });
        }
        if let Some(&v) = values.iter().find(|v| v.is_nan()) {
            return Err(Error::InvalidParameter {
                name: "sample value",
                value: v,
                reason: "must not be NaN",
            });
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values, seed: None })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Fraction of values ≤ t.
    pub fn cdf(&self, t: f64) -> f64 {
        self.values.partition_point(|&v| v <= t) as f64 / self.values.len() as f64
    }

    /// Copy with every value moved by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + delta).collect(),
            seed: self.seed,
        }
    }

    /// Empirical CDF as an oracle for [`crate::roy::roy_exact`].
    pub fn cdf_oracle(&self) -> Result<CdfOracle<'_>> {
        CdfOracle::new(move |t| self.cdf(t))
    }

    /// One value per line, full precision.
    pub fn write_column<W: Write>(&self, mut w: W) -> io::Result<()> {
        for v in &self.values {
            writeln!(w, "{v:?}")?;
        }
        w.flush()
    }
}

fn chunk_rngs(seed: u64, chunk: usize) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut base = ChaCha8Rng::seed_from_u64(seed);
    base.set_stream(2 * chunk as u64);
    let mut aux = ChaCha8Rng::seed_from_u64(seed);
    aux.set_stream(2 * chunk as u64 + 1);
    (base, aux)
}

/// Fills `paths` slots chunk by chunk in parallel; `draw` produces one path
/// value from the (base, auxiliary) generators of its chunk.
fn run_chunks<F>(paths: usize, seed: u64, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng, &mut ChaCha8Rng) -> f64 + Sync,
{
    let mut out = vec![0.0; paths];
    out.par_chunks_mut(CHUNK_PATHS).enumerate().for_each(|(chunk, slots)| {
        let (mut base, mut aux) = chunk_rngs(seed, chunk);
        for slot in slots {
            *slot = draw(&mut base, &mut aux);
        }
    });
    out
}

/// Draws `paths` values; each is a per-period return (horizon 1) or the
/// mean of `horizon` independent per-period returns.
pub fn simulate(spec: &GeneratorSpec, paths: usize, seed: u64) -> Result<EmpiricalSample> {
    let spec = GeneratorSpec::new(spec.family, spec.horizon)?;
    if paths == 0 {
        return Err(Error::SampleTooShort { len: 0, need: 1 });
    }
    let h = spec.horizon as usize;
    let inv_h = 1.0 / h as f64;
    let values = match spec.family {
        Family::Normal { mean, sd } => run_chunks(paths, seed, |base, _| {
            let mut s = 0.0;
            for _ in 0..h {
                let z: f64 = StandardNormal.sample(base);
                s += mean + sd * z;
            }
            s * inv_h
        }),
        Family::ShiftedGamma { shape, rate, shift } => {
            let g = Gamma::new(shape, 1.0 / rate).map_err(|_| Error::InvalidParameter {
                name: "shape",
                value: shape,
                reason: "rejected by gamma sampler",
            })?;
            run_chunks(paths, seed, |base, _| {
                let mut s = 0.0;
                for _ in 0..h {
                    s += g.sample(base) + shift;
                }
                s * inv_h
            })
        }
        Family::BonusMixture { mean, sd, p, bonus } => run_chunks(paths, seed, |base, aux| {
            let mut s = 0.0;
            for _ in 0..h {
                let z: f64 = StandardNormal.sample(base);
                let u: f64 = aux.random();
                s += mean + sd * z + if u < p { bonus } else { 0.0 };
            }
            s * inv_h
        }),
    };
    let mut sample = EmpiricalSample::from_values(values)?;
    sample.seed = Some(seed);
    Ok(sample)
}

/// Means of `horizon` values resampled with replacement from `data`.
pub fn bootstrap_means(data: &[f64], horizon: u32, paths: usize, seed: u64) -> Result<EmpiricalSample> {
    if data.is_empty() || paths == 0 {
        return Err(Error::SampleTooShort { len: 0, need: 1 });
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter {
            name: "horizon",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let h = horizon as usize;
    let values = run_chunks(paths, seed, |base, _| {
        (0..h).map(|_| data[base.random_range(0..data.len())]).sum::<f64>() / h as f64
    });
    let mut sample = EmpiricalSample::from_values(values)?;
    sample.seed = Some(seed);
    Ok(sample)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossProbability {
    pub probability: f64,
    pub standard_error: f64,
}

/// Fraction of values ≤ r₀ with its binomial standard error.
pub fn empirical_loss_probability(s: &EmpiricalSample, r0: f64) -> LossProbability {
    let p = s.cdf(r0);
    LossProbability {
        probability: p,
        standard_error: (p * (1.0 - p) / s.len() as f64).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceVerdict {
    ADominatesB,
    BDominatesA,
    /// Each dominates the other within the slack.
    Tie,
    Incomparable,
}

/// Monte Carlo slack 4·√(1/(4·min(N_a, N_b))).
pub fn default_slack(a: &EmpiricalSample, b: &EmpiricalSample) -> f64 {
    4.0 * (1.0 / (4.0 * a.len().min(b.len()) as f64)).sqrt()
}

/// Largest value of F̂_x(t) − F̂_y(t) over the merged sample grid.
fn max_cdf_excess(x: &EmpiricalSample, y: &EmpiricalSample) -> f64 {
    let (xs, ys) = (x.values(), y.values());
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst = f64::NEG_INFINITY;
    // Walk the merged grid; after consuming every value equal to t, both
    // counts are the ECDFs at t.
    while i < xs.len() || j < ys.len() {
        let t = match (xs.get(i), ys.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        worst = worst.max(i as f64 / nx - j as f64 / ny);
    }
    worst
}

/// `a` dominates `b` when F̂_a(t) ≤ F̂_b(t) + slack on the merged grid.
pub fn fosd_check(a: &EmpiricalSample, b: &EmpiricalSample, slack: f64) -> DominanceVerdict {
    let a_dom = max_cdf_excess(a, b) <= slack;
    let b_dom = max_cdf_excess(b, a) <= slack;
    match (a_dom, b_dom) {
        (true, true) => DominanceVerdict::Tie,
        (true, false) => DominanceVerdict::ADominatesB,
        (false, true) => DominanceVerdict::BDominatesA,
        (false, false) => DominanceVerdict::Incomparable,
    }
}
