//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p safety-first-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use safety_first::roy::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use safety_first::{
    bonus_sharpe, chebyshev_loss_bound, edgeworth_cdf, fosd_check, gamma_cumulants, min_reversal_bonus, norm_cdf,
    reversal_p_bound, roy_cf_newton, roy_cf_quadratic, roy_edgeworth_invert, roy_exact, sharpe, simulate,
    skew_preference, BonusAsset, CdfOracle, Cumulants, DominanceVerdict, EdgeworthOrder, EmpiricalSample, Error,
    Family, GeneratorSpec, Horizon, SkewSign,
};
use statrs::distribution::{ContinuousCDF, Gamma};

/// Seeds are fixed once here and never tuned.
const EDGEWORTH_SEED: u64 = 20_240_501;
const FOSD_SEED: u64 = 20_240_502;
const GRID_SEED: u64 = 20_240_503;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_err(e: Error) -> String {
    e.to_string()
}

fn worked_example(n: f64, expected: f64) -> Check {
    let c = Cumulants::new(0.07, 1.0, &[-1.0]).map_err(fmt_err)?;
    let h = Horizon::new(n, 0.0).map_err(fmt_err)?;
    let q = roy_cf_quadratic(&c, &h).map_err(fmt_err)?.value;
    let nt = roy_cf_newton(&c, &h, 2, DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(fmt_err)?.value;
    ensure((q - expected).abs() <= 5e-4, || format!("cf-quadratic {q}"))?;
    ensure((nt - expected).abs() <= 5e-4, || format!("cf-newton:2 {nt}"))?;
    Ok(format!("cf-quadratic {q:.6}, cf-newton:2 {nt:.6}"))
}

fn c1() -> Check {
    worked_example(60.0, 0.0719)
}

fn c2() -> Check {
    worked_example(252.0, 0.0698)
}

fn c3() -> Check {
    let a = BonusAsset::new(0.001, 0.01, 1e-4, 0.25).map_err(fmt_err)?;
    let sr = bonus_sharpe(&a, 0.0).map_err(fmt_err)?;
    let b_min = min_reversal_bonus(0.001, 0.01).map_err(fmt_err)?;
    let p_max = reversal_p_bound(0.001, 0.01, 0.25).map_err(fmt_err)?;
    ensure((sr - 0.0995).abs() <= 5e-5, || format!("bonus Sharpe {sr}"))?;
    ensure(a.base_sharpe() == 0.1, || format!("base Sharpe {}", a.base_sharpe()))?;
    ensure((b_min - 0.202).abs() <= 5e-4, || format!("B_min {b_min}"))?;
    ensure((p_max - 0.0019).abs() <= 5e-5, || format!("p_max {p_max}"))?;
    Ok(format!("bonus Sharpe {sr:.6}, base 0.1, B_min {b_min:.6}, p_max {p_max:.6}"))
}

fn c4() -> Check {
    let mus = [-0.01, 0.0, 0.005, 0.01, 0.02];
    let sigmas = [0.005, 0.01, 0.02, 0.05, 0.1];
    let r0s = [-0.005, 0.0, 0.005];
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in [1.0, 12.0] {
        for &mu in &mus {
            for &sigma in &sigmas {
                for &r0 in &r0s {
                    let c = Cumulants::gaussian(mu, sigma).map_err(fmt_err)?;
                    let h = Horizon::new(n, r0).map_err(fmt_err)?;
                    let target = (mu - r0) / sigma;
                    let oracle = CdfOracle::normal(mu, sigma / f64::sqrt(n)).map_err(fmt_err)?;
                    let mut values = vec![
                        ("sharpe".to_string(), sharpe(&c, &h).value),
                        ("exact".into(), roy_exact(&oracle, &h).map_err(fmt_err)?.value),
                        ("cf-quadratic".into(), roy_cf_quadratic(&c, &h).map_err(fmt_err)?.value),
                    ];
                    for k in 0..=EdgeworthOrder::MAX {
                        let order = EdgeworthOrder::new(k).map_err(fmt_err)?;
                        values.push((format!("edgeworth:{k}"), roy_edgeworth_invert(&c, &h, order).map_err(fmt_err)?.value));
                    }
                    for k in 2..=4 {
                        let v = roy_cf_newton(&c, &h, k, DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(fmt_err)?.value;
                        values.push((format!("cf-newton:{k}"), v));
                    }
                    for (m, v) in values {
                        let err = (v - target).abs();
                        worst = worst.max(err);
                        count += 1;
                        ensure(err <= 1e-9, || format!("{m} at mu={mu} sigma={sigma} r0={r0} n={n}: {v} vs {target}"))?;
                    }
                }
            }
        }
    }
    Ok(format!("{count} evaluations, max |error| {worst:.2e}"))
}

fn c5() -> Check {
    const PATHS: usize = 10_000_000;
    let (shape, n) = (4.0, 50u32);
    let c = gamma_cumulants(shape, 1.0, 0.0).map_err(fmt_err)?;
    let spec = GeneratorSpec::new(Family::ShiftedGamma { shape, rate: 1.0, shift: 0.0 }, n).map_err(fmt_err)?;
    let sample = simulate(&spec, PATHS, EDGEWORTH_SEED).map_err(fmt_err)?;
    let sd_mean = c.volatility() / f64::from(n).sqrt();
    let mut detail = Vec::new();
    let mut failures = Vec::new();
    for t in [-1.0, 0.0, 1.0] {
        let emp = sample.cdf(c.mean() + t * sd_mean);
        let se = (emp * (1.0 - emp) / PATHS as f64).sqrt();
        let e0 = edgeworth_cdf(&c, f64::from(n), t, EdgeworthOrder::NORMAL).map_err(fmt_err)?.value;
        let e1 = edgeworth_cdf(&c, f64::from(n), t, EdgeworthOrder::new(1).map_err(fmt_err)?).map_err(fmt_err)?.value;
        let (err0, err1) = ((e0 - emp).abs(), (e1 - emp).abs());
        detail.push(format!("t={t}: |e1-emp| = {:.2} SE", err1 / se));
        if err1 > 3.0 * se {
            failures.push(format!("t={t}: order-1 {e1:.6} vs empirical {emp:.6}, {:.2} SE", err1 / se));
        }
        if err1 > err0 {
            failures.push(format!("t={t}: order-1 error {err1:.3e} > order-0 error {err0:.3e}"));
        }
    }
    if failures.is_empty() {
        Ok(detail.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

/// Ψ̂ with an empty lower tail ranked at +∞.
fn roy_or_inf(s: &EmpiricalSample, h: &Horizon) -> Result<f64, String> {
    let oracle = s.cdf_oracle().map_err(fmt_err)?;
    match roy_exact(&oracle, h) {
        Ok(r) => Ok(r.value),
        Err(Error::Saturated { probability }) if probability <= 0.0 => Ok(f64::INFINITY),
        Err(e) => Err(e.to_string()),
    }
}

fn c6() -> Check {
    const PATHS: usize = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(FOSD_SEED);
    let mut reversals = 0;
    let mut min_margin = f64::INFINITY;
    for k in 0..20u64 {
        let horizon: u32 = if rng.random_bool(0.5) { 1 } else { 5 };
        let seed = FOSD_SEED + 1 + k;
        let (dominated, dominating, label) = if k % 2 == 0 {
            let (family, sd) = if rng.random_bool(0.5) {
                let sd = rng.random_range(0.005..0.02);
                (Family::Normal { mean: rng.random_range(-0.002..0.002), sd }, sd)
            } else {
                let shape: f64 = rng.random_range(1.0..8.0);
                let rate: f64 = rng.random_range(50.0..200.0);
                let shift = -shape / rate + rng.random_range(-0.001..0.001);
                (Family::ShiftedGamma { shape, rate, shift }, shape.sqrt() / rate)
            };
            let x = simulate(&GeneratorSpec::new(family, horizon).map_err(fmt_err)?, PATHS, seed).map_err(fmt_err)?;
            let delta = rng.random_range(0.05..0.5) * sd / f64::from(horizon).sqrt();
            let y = x.shifted(delta);
            (x, y, format!("shift {delta:.2e}"))
        } else {
            let mu: f64 = rng.random_range(0.0005..0.002);
            let sigma: f64 = rng.random_range(0.005..0.02);
            let bonus = rng.random_range(1.0..4.0) * min_reversal_bonus(mu, sigma).map_err(fmt_err)?;
            let p_max = reversal_p_bound(mu, sigma, bonus).map_err(fmt_err)?;
            let p = rng.random_range(0.1..2.0) * p_max;
            let asset = BonusAsset::new(mu, sigma, p, bonus).map_err(fmt_err)?;
            if bonus_sharpe(&asset, 0.0).map_err(fmt_err)? < asset.base_sharpe()
                && asset.exact_sharpe(0.0) < asset.base_sharpe()
            {
                reversals += 1;
            }
            let base = Family::Normal { mean: mu, sd: sigma };
            let mixed = Family::BonusMixture { mean: mu, sd: sigma, p, bonus };
            let x = simulate(&GeneratorSpec::new(base, horizon).map_err(fmt_err)?, PATHS, seed).map_err(fmt_err)?;
            let y = simulate(&GeneratorSpec::new(mixed, horizon).map_err(fmt_err)?, PATHS, seed).map_err(fmt_err)?;
            (x, y, format!("bonus p={p:.2e} B={bonus:.3}"))
        };
        ensure(fosd_check(&dominating, &dominated, 0.0) == DominanceVerdict::ADominatesB, || {
            format!("pair {k} ({label}): sample dominance not established")
        })?;
        for i in 1..=11 {
            let r0 = dominated.values()[(dominated.len() * i) / 12];
            let h = Horizon::new(f64::from(horizon), r0).map_err(fmt_err)?;
            let x = roy_or_inf(&dominated, &h)?;
            let y = roy_or_inf(&dominating, &h)?;
            ensure(y >= x, || format!("pair {k} ({label}) at r0={r0}: dominated {x} > dominating {y}"))?;
            min_margin = min_margin.min(y - x);
        }
    }
    ensure(reversals > 0, || "no generated pair reverses the Sharpe ratio".into())?;
    Ok(format!("20 pairs x 11 probes consistent (min margin {min_margin:.2e}), {reversals} Sharpe reversals"))
}

fn c7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(GRID_SEED);
    let (mut accepted, mut tried) = (0, 0);
    let mut worst = 0.0f64;
    while accepted < 100 {
        tried += 1;
        ensure(tried < 100_000, || format!("only {accepted} admissible points"))?;
        let snr = rng.random_range(-0.2..0.2);
        let z3: f64 = rng.random_range(-2.0..2.0);
        if z3.abs() < 1e-3 {
            continue;
        }
        let n = rng.random_range(10.0..1000.0);
        // Discriminant of the two-term truncation, from the formula itself.
        if 9.0 / (z3 * z3) + 1.0 / n - 6.0 * snr / z3 < 0.0 {
            continue;
        }
        accepted += 1;
        let c = Cumulants::new(snr, 1.0, &[z3]).map_err(fmt_err)?;
        let h = Horizon::new(n, 0.0).map_err(fmt_err)?;
        let q = roy_cf_quadratic(&c, &h).map_err(fmt_err)?.value;
        let nt = roy_cf_newton(&c, &h, 2, DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(fmt_err)?.value;
        worst = worst.max((q - nt).abs());
        ensure((q - nt).abs() <= 1e-10, || format!("snr={snr} z3={z3} n={n}: {q} vs {nt}"))?;
    }
    Ok(format!("100 points ({tried} drawn), max |diff| {worst:.2e}"))
}

fn c8() -> Check {
    let psi = |z3: f64, n: f64| -> Result<f64, String> {
        let c = Cumulants::new(0.07, 1.0, &[z3]).map_err(fmt_err)?;
        Ok(roy_cf_quadratic(&c, &Horizon::new(n, 0.0).map_err(fmt_err)?).map_err(fmt_err)?.value)
    };
    let mut detail = Vec::new();
    for (n, want) in [(60.0, SkewSign::Negative), (252.0, SkewSign::Positive)] {
        let up = psi(-0.9, n)? - psi(-1.0, n)?;
        let down = psi(-1.1, n)? - psi(-1.0, n)?;
        let expected = (n * 0.07f64.powi(2) - 1.0).signum();
        ensure(up.signum() == expected && down.signum() == -expected, || {
            format!("n={n}: +0.1 moves {up:.3e}, -0.1 moves {down:.3e}")
        })?;
        let c = Cumulants::new(0.07, 1.0, &[-1.0]).map_err(fmt_err)?;
        let pref = skew_preference(&c, &Horizon::new(n, 0.0).map_err(fmt_err)?);
        ensure(pref.sign == want, || format!("n={n}: preference {:?}", pref.sign))?;
        detail.push(format!("n={n}: {up:+.2e}/{down:+.2e}"));
    }
    let c = Cumulants::new(0.07, 1.0, &[-1.0]).map_err(fmt_err)?;
    let ns = skew_preference(&c, &Horizon::single(0.0).map_err(fmt_err)?)
        .crossover_horizon
        .ok_or("no crossover")?;
    ensure((ns - 1.0 / 0.0049).abs() <= 0.01, || format!("n* = {ns}"))?;
    Ok(format!("{}; n* = {ns:.4}", detail.join(", ")))
}

fn c9() -> Check {
    let mut count = 0;
    let mut tightest = f64::INFINITY;
    for snr in [0.5, 1.0, 2.0, 4.0] {
        let bound = chebyshev_loss_bound(snr).map_err(fmt_err)?;
        let mut cases = vec![("normal".to_string(), norm_cdf(-snr))];
        for shape in [1.0, 4.0] {
            let g = Gamma::new(shape, 1.0).map_err(|e| e.to_string())?;
            let (m, s) = (shape, f64::sqrt(shape));
            // Right-skewed: loss is the left tail at m − snr·s.
            cases.push((format!("gamma({shape})"), g.cdf((m - snr * s).max(0.0))));
            // Left-skewed mirror image: the loss tail is the gamma's right tail.
            cases.push((format!("-gamma({shape})"), 1.0 - g.cdf(m + snr * s)));
        }
        for (name, p) in cases {
            count += 1;
            tightest = tightest.min(bound - p);
            ensure(p <= bound, || format!("{name} snr={snr}: loss {p} > bound {bound}"))?;
        }
    }
    Ok(format!("{count} cases, smallest slack {tightest:.3e}"))
}

fn c10() -> Check {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/three_assets.csv");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_safety-first"))
            .arg("rank")
            .arg(&fixture)
            .args(["--horizon", "20", "--method", "cf-quadratic", "--method", "exact-empirical", "--method", "edgeworth:2"])
            .args(["--seed", "42", "--paths", "50000", "--output", "machine"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || String::from_utf8_lossy(&a.stderr).into_owned())?;
    ensure(a.stdout == b.stdout, || "machine outputs differ".into())?;
    ensure(String::from_utf8_lossy(&a.stdout).contains("\"seed\": 42"), || "seed missing from report".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("worked example at n = 60", c1),
        ("worked example at n = 252", c2),
        ("bonus-asset reference values", c3),
        ("normal exactness of every method", c4),
        ("Edgeworth order 1 vs Monte Carlo", c5),
        ("FOSD consistency of roy_exact", c6),
        ("cf-newton:2 equals cf-quadratic", c7),
        ("skew-preference flip and crossover", c8),
        ("Chebyshev bound dominates loss", c9),
        ("CLI machine output determinism", c10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name} ({secs:.2}s): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
