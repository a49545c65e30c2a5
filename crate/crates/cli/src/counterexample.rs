//! The bonus-asset demonstration: dominance without a higher Sharpe ratio.

use safety_first::montecarlo::{default_slack, RNG_ALGORITHM};
use safety_first::{
    bonus_cdf, bonus_sharpe, fosd_check, min_reversal_bonus, reversal_p_bound, roy_exact, simulate,
    verify_dominance_and_reversal, BonusAsset, CdfOracle, DominanceVerdict, Family, GeneratorSpec, Horizon,
};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::{render_table, sig4};
use crate::rank::{TOOL, VERSION};

pub const PROBE_COUNT: usize = 11;

#[derive(Debug, Clone, Copy)]
pub struct CounterexampleOptions {
    pub mu: f64,
    pub sigma: f64,
    pub p: f64,
    pub bonus: f64,
    pub paths: usize,
    pub seed: u64,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        Self {
            mu: 0.001,
            sigma: 0.01,
            p: 1e-4,
            bonus: 0.25,
            paths: 100_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// The bonus asset dominates and has the lower Sharpe ratio.
    Reversal,
    Degenerate,
    /// B < B_min: no p reverses the ranking.
    NoReversingP,
    /// A reversing p exists for this B, but the given p exceeds it.
    PAboveBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloCheck {
    pub paths: usize,
    pub seed: u64,
    pub rng: &'static str,
    /// Bonus draws share the base draws, so the sample ECDFs are ordered exactly.
    pub coupled_verdict: DominanceVerdict,
    pub slack: f64,
    pub verdict_within_slack: DominanceVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct Probe {
    pub level: f64,
    pub disaster_rate: f64,
    pub base: f64,
    pub bonus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub mu: f64,
    pub sigma: f64,
    pub p: f64,
    pub bonus: f64,
    pub base_sharpe: f64,
    pub bonus_sharpe: f64,
    pub exact_bonus_sharpe: f64,
    pub min_reversal_bonus: f64,
    pub max_reversal_p: f64,
    pub status: Status,
    pub message: String,
    pub analytic_dominance: bool,
    pub max_cdf_excess: f64,
    pub roy_consistent: bool,
    pub monte_carlo: Option<MonteCarloCheck>,
    pub probes: Vec<Probe>,
}

pub fn counterexample(o: &CounterexampleOptions) -> CliResult<CounterexampleReport> {
    let asset = BonusAsset::new(o.mu, o.sigma, o.p, o.bonus)
        .map_err(|e| CliError::Infeasible(format!("bonus asset needs mu > 0, sigma > 0, B > 0, 0 <= p <= 1: {e}")))?;
    let b_min = min_reversal_bonus(o.mu, o.sigma)?;
    let p_max = reversal_p_bound(o.mu, o.sigma, o.bonus)?;
    let bonus_sr = bonus_sharpe(&asset, 0.0).map_err(|e| {
        CliError::Infeasible(format!("sigma^2 - 2 mu p B - p^2 B^2 + p B^2 must be positive: {e}"))
    })?;

    let (status, message) = if o.p == 0.0 {
        (Status::Degenerate, "degenerate: assets identical".to_owned())
    } else if p_max <= 0.0 {
        (
            Status::NoReversingP,
            format!(
                "no reversing p exists: B = {} is below B_min = {}, p bound = {}",
                o.bonus, b_min, p_max
            ),
        )
    } else if o.p > p_max {
        (
            Status::PAboveBound,
            format!("p = {} exceeds the reversing bound p_max = {}", o.p, p_max),
        )
    } else {
        (
            Status::Reversal,
            "bonus asset dominates the base asset and has the lower Sharpe ratio".to_owned(),
        )
    };

    let base = CdfOracle::normal(o.mu, o.sigma)?;
    let dom = verify_dominance_and_reversal(&asset, &base)?;
    let with_bonus = bonus_cdf(&base, o.p, o.bonus)?;
    let mut probes = Vec::with_capacity(PROBE_COUNT);
    for i in 1..=PROBE_COUNT {
        let level = i as f64 / (PROBE_COUNT + 1) as f64;
        let r0 = base.quantile(level)?;
        let h = Horizon::single(r0)?;
        probes.push(Probe {
            level,
            disaster_rate: r0,
            base: roy_exact(&base, &h)?.value,
            bonus: roy_exact(&with_bonus, &h)?.value,
        });
    }

    let monte_carlo = if o.paths > 0 {
        let x = simulate(
            &GeneratorSpec::per_period(Family::Normal { mean: o.mu, sd: o.sigma })?,
            o.paths,
            o.seed,
        )?;
        let y = simulate(
            &GeneratorSpec::per_period(Family::BonusMixture {
                mean: o.mu,
                sd: o.sigma,
                p: o.p,
                bonus: o.bonus,
            })?,
            o.paths,
            o.seed,
        )?;
        let slack = default_slack(&y, &x);
        Some(MonteCarloCheck {
            paths: o.paths,
            seed: o.seed,
            rng: RNG_ALGORITHM,
            coupled_verdict: fosd_check(&y, &x, 0.0),
            slack,
            verdict_within_slack: fosd_check(&y, &x, slack),
        })
    } else {
        None
    };

    Ok(CounterexampleReport {
        tool: TOOL,
        version: VERSION,
        mu: o.mu,
        sigma: o.sigma,
        p: o.p,
        bonus: o.bonus,
        base_sharpe: asset.base_sharpe(),
        bonus_sharpe: bonus_sr,
        exact_bonus_sharpe: asset.exact_sharpe(0.0),
        min_reversal_bonus: b_min,
        max_reversal_p: p_max,
        status,
        message,
        analytic_dominance: dom.dominance_holds,
        max_cdf_excess: dom.max_cdf_excess,
        roy_consistent: dom.roy_consistent,
        monte_carlo,
        probes,
    })
}

fn verdict_label(v: DominanceVerdict) -> &'static str {
    match v {
        DominanceVerdict::ADominatesB => "bonus dominates base",
        DominanceVerdict::BDominatesA => "base dominates bonus",
        DominanceVerdict::Tie => "indistinguishable",
        DominanceVerdict::Incomparable => "incomparable",
    }
}

impl CounterexampleReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "bonus asset: mu {} sigma {} p {} B {}\n\n",
            sig4(self.mu),
            sig4(self.sigma),
            sig4(self.p),
            sig4(self.bonus)
        );
        let kv = [
            ("Sharpe, base", sig4(self.base_sharpe)),
            ("Sharpe, bonus", sig4(self.bonus_sharpe)),
            ("Sharpe, bonus (independent bonus)", sig4(self.exact_bonus_sharpe)),
            ("B_min", sig4(self.min_reversal_bonus)),
            ("p_max", sig4(self.max_reversal_p)),
            (
                "FOSD, analytic",
                if self.analytic_dominance { "bonus dominates base" } else { "violated" }.into(),
            ),
        ];
        let width = kv.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in kv {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        if let Some(mc) = &self.monte_carlo {
            out.push_str(&format!(
                "{:<width$}  {} (coupled); {} within slack {}\n",
                "FOSD, Monte Carlo",
                verdict_label(mc.coupled_verdict),
                verdict_label(mc.verdict_within_slack),
                sig4(mc.slack)
            ));
            out.push_str(&format!("{:<width$}  {} paths, seed {}, {}\n", "", mc.paths, mc.seed, mc.rng));
        }
        out.push_str(&format!("\n{}\n\n", self.message));
        let header = ["level", "r0", "roy base", "roy bonus"].map(String::from);
        let rows: Vec<Vec<String>> = self
            .probes
            .iter()
            .map(|p| vec![sig4(p.level), sig4(p.disaster_rate), sig4(p.base), sig4(p.bonus)])
            .collect();
        out.push_str(&render_table(&header, &rows));
        out
    }
}
