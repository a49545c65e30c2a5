//! Scoring and ranking of the assets in a returns table.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use safety_first::montecarlo::{bootstrap_means, RNG_ALGORITHM};
use safety_first::roy::{Diagnostics, DEFAULT_MAX_ITER, DEFAULT_TOL};
use safety_first::{
    chebyshev_loss_bound, estimate_cumulants, roy_cf_newton, roy_cf_quadratic, roy_edgeworth_invert, roy_exact,
    sharpe, skew_preference, sr3_skew_adjusted, Cumulants, EdgeworthOrder, EmpiricalSample, Horizon, RiskScore,
    SkewSign,
};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::{opt4, render_table, sig4};
use crate::input::ReturnsTable;

pub const TOOL: &str = "safety-first";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_BOOTSTRAP_PATHS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    Sharpe,
    Sr3,
    ExactEmpirical,
    Edgeworth(u8),
    CfNewton(u8),
    CfQuadratic,
}

impl RankMethod {
    /// Highest cumulant order the method reads.
    fn cumulant_order(self) -> usize {
        match self {
            RankMethod::Edgeworth(k) => k as usize + 2,
            RankMethod::CfNewton(k) => k as usize + 1,
            _ => 3,
        }
    }
}

impl fmt::Display for RankMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankMethod::Sharpe => write!(f, "sharpe"),
            RankMethod::Sr3 => write!(f, "sr3"),
            RankMethod::ExactEmpirical => write!(f, "exact-empirical"),
            RankMethod::Edgeworth(k) => write!(f, "edgeworth:{k}"),
            RankMethod::CfNewton(k) => write!(f, "cf-newton:{k}"),
            RankMethod::CfQuadratic => write!(f, "cf-quadratic"),
        }
    }
}

impl FromStr for RankMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let order = |k: &str, lo: u8, hi: u8| -> Result<u8, String> {
            match k.parse::<u8>() {
                Ok(v) if (lo..=hi).contains(&v) => Ok(v),
                _ => Err(format!("order in '{s}' must be an integer in {lo}..={hi}")),
            }
        };
        match s.split_once(':') {
            None => match s {
                "sharpe" => Ok(RankMethod::Sharpe),
                "sr3" => Ok(RankMethod::Sr3),
                "exact-empirical" => Ok(RankMethod::ExactEmpirical),
                "cf-quadratic" => Ok(RankMethod::CfQuadratic),
                "edgeworth" | "cf-newton" => Err(format!("'{s}' needs an order, e.g. {s}:2")),
                _ => Err(format!(
                    "unknown method '{s}' (sharpe, sr3, exact-empirical, edgeworth:K, cf-newton:K, cf-quadratic)"
                )),
            },
            Some(("edgeworth", k)) => Ok(RankMethod::Edgeworth(order(k, 0, EdgeworthOrder::MAX)?)),
            Some(("cf-newton", k)) => Ok(RankMethod::CfNewton(order(k, 2, 4)?)),
            Some(_) => Err(format!("unknown method '{s}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RankOptions {
    pub rfr: f64,
    pub horizon: f64,
    /// The first entry orders the report.
    pub methods: Vec<RankMethod>,
    pub b3: f64,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self {
            rfr: 0.0,
            horizon: 1.0,
            methods: vec![RankMethod::CfQuadratic],
            b3: 1.0,
            seed: None,
            paths: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CumulantReport {
    pub mean: f64,
    pub volatility: f64,
    /// ζ₃, ζ₄, ...
    pub zeta: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreEntry {
    pub method: String,
    pub value: Option<f64>,
    pub error: Option<String>,
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssetReport {
    pub rank: usize,
    pub name: String,
    pub observations: usize,
    pub cumulants: CumulantReport,
    pub snr: f64,
    pub scores: Vec<ScoreEntry>,
    pub skew_preference: SkewSign,
    pub crossover_horizon: Option<f64>,
    /// 1/snr², capped at 1; null when snr ≤ 0.
    pub chebyshev_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub period: String,
    pub horizon: f64,
    pub disaster_rate: f64,
    pub methods: Vec<String>,
    pub primary_method: String,
    pub b3: f64,
    pub seed: Option<u64>,
    pub rng: Option<&'static str>,
    pub bootstrap_paths: Option<usize>,
    pub assets: Vec<AssetReport>,
}

struct Bootstrap {
    horizon: u32,
    paths: usize,
    seed: u64,
}

fn validate(opts: &RankOptions) -> CliResult<Option<Bootstrap>> {
    if !(opts.horizon > 0.0 && opts.horizon.is_finite()) {
        return Err(CliError::Input(format!("--horizon must be positive, got {}", opts.horizon)));
    }
    if !opts.rfr.is_finite() {
        return Err(CliError::Input("--rfr must be finite".into()));
    }
    if !opts.b3.is_finite() {
        return Err(CliError::Input("--b3 must be finite".into()));
    }
    if opts.methods.is_empty() {
        return Err(CliError::Input("no --method given".into()));
    }
    for (i, m) in opts.methods.iter().enumerate() {
        if opts.methods[..i].contains(m) {
            return Err(CliError::Input(format!("--method {m} given twice")));
        }
    }
    if opts.paths == Some(0) {
        return Err(CliError::Input("--paths must be positive".into()));
    }
    if !opts.methods.contains(&RankMethod::ExactEmpirical) || opts.horizon == 1.0 {
        return Ok(None);
    }
    // The n-period mean is not identified from marginal data, so horizons
    // beyond one period need an explicit, seeded resample.
    let Some(seed) = opts.seed else {
        return Err(CliError::Input(
            "exact-empirical with --horizon > 1 needs --seed to bootstrap n-period means; \
             use cf-quadratic, cf-newton:K or edgeworth:K otherwise"
                .into(),
        ));
    };
    if opts.horizon.fract() != 0.0 || opts.horizon > u32::MAX as f64 {
        return Err(CliError::Input(format!(
            "exact-empirical bootstrap needs an integral --horizon, got {}",
            opts.horizon
        )));
    }
    Ok(Some(Bootstrap {
        horizon: opts.horizon as u32,
        paths: opts.paths.unwrap_or(DEFAULT_BOOTSTRAP_PATHS),
        seed,
    }))
}

fn score_one(
    method: RankMethod,
    c: &Cumulants,
    column: &[f64],
    h: &Horizon,
    opts: &RankOptions,
    boot: &Option<Bootstrap>,
) -> safety_first::Result<RiskScore> {
    match method {
        RankMethod::Sharpe => Ok(sharpe(c, h)),
        RankMethod::Sr3 => sr3_skew_adjusted(c, h, opts.b3),
        RankMethod::ExactEmpirical => {
            let sample = match boot {
                Some(b) => bootstrap_means(column, b.horizon, b.paths, b.seed)?,
                None => EmpiricalSample::from_values(column.to_vec())?,
            };
            let oracle = sample.cdf_oracle()?;
            roy_exact(&oracle, h)
        }
        RankMethod::Edgeworth(k) => roy_edgeworth_invert(c, h, EdgeworthOrder::new(k)?),
        RankMethod::CfNewton(k) => roy_cf_newton(c, h, k, DEFAULT_TOL, DEFAULT_MAX_ITER),
        RankMethod::CfQuadratic => roy_cf_quadratic(c, h),
    }
}

pub fn rank(table: &ReturnsTable, opts: &RankOptions) -> CliResult<RankReport> {
    let boot = validate(opts)?;
    let h = Horizon::new(opts.horizon, opts.rfr)?;
    let order = opts.methods.iter().map(|m| m.cumulant_order()).max().unwrap_or(3).max(4);
    let primary = opts.methods[0];

    let mut assets = Vec::with_capacity(table.names.len());
    let mut primary_scores = Vec::with_capacity(table.names.len());
    for (name, column) in table.names.iter().zip(&table.columns) {
        let c = estimate_cumulants(column, order)
            .map_err(|e| CliError::Input(format!("column '{name}': {e}")))?;
        let mut scores = Vec::with_capacity(opts.methods.len());
        for &m in &opts.methods {
            match score_one(m, &c, column, &h, opts, &boot) {
                Ok(s) => scores.push(ScoreEntry {
                    method: m.to_string(),
                    value: Some(s.value),
                    error: None,
                    diagnostics: Some(s.diagnostics),
                }),
                Err(e) if m == primary => {
                    return Err(CliError::Numeric(format!("column '{name}': {m}: {e}")));
                }
                Err(e) => scores.push(ScoreEntry {
                    method: m.to_string(),
                    value: None,
                    error: Some(e.to_string()),
                    diagnostics: None,
                }),
            }
        }
        primary_scores.push(scores[0].value.unwrap_or(f64::NAN));
        let pref = skew_preference(&c, &h);
        let snr = c.snr(opts.rfr);
        assets.push(AssetReport {
            rank: 0,
            name: name.clone(),
            observations: column.len(),
            cumulants: CumulantReport {
                mean: c.mean(),
                volatility: c.volatility(),
                zeta: c.zetas().to_vec(),
            },
            snr,
            scores,
            skew_preference: pref.sign,
            crossover_horizon: pref.crossover_horizon,
            chebyshev_bound: chebyshev_loss_bound(snr).ok(),
        });
    }

    let mut order_idx: Vec<usize> = (0..assets.len()).collect();
    order_idx.sort_by(|&i, &j| {
        primary_scores[j]
            .partial_cmp(&primary_scores[i])
            .unwrap_or(Ordering::Equal)
            .then_with(|| assets[i].name.cmp(&assets[j].name))
    });
    let mut slots: Vec<Option<AssetReport>> = assets.into_iter().map(Some).collect();
    let assets = order_idx
        .iter()
        .enumerate()
        .map(|(r, &i)| {
            let mut a = slots[i].take().expect("each index once");
            a.rank = r + 1;
            a
        })
        .collect();

    Ok(RankReport {
        tool: TOOL,
        version: VERSION,
        period: table.period.clone(),
        horizon: opts.horizon,
        disaster_rate: opts.rfr,
        methods: opts.methods.iter().map(ToString::to_string).collect(),
        primary_method: primary.to_string(),
        b3: opts.b3,
        seed: boot.as_ref().map(|b| b.seed),
        rng: boot.as_ref().map(|_| RNG_ALGORITHM),
        bootstrap_paths: boot.as_ref().map(|b| b.paths),
        assets,
    })
}

fn sign_label(s: SkewSign) -> &'static str {
    match s {
        SkewSign::Positive => "+",
        SkewSign::Negative => "-",
        SkewSign::Neutral => "0",
    }
}

impl RankReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "horizon {} {}(s), disaster rate {} per {}, ranked by {}\n",
            sig4(self.horizon),
            self.period,
            sig4(self.disaster_rate),
            self.period,
            self.primary_method
        );
        if let (Some(seed), Some(rng)) = (self.seed, self.rng) {
            out.push_str(&format!("seed {seed}, rng {rng}\n"));
        }
        out.push('\n');
        let mut header: Vec<String> = ["rank", "asset", "n", "mean", "vol", "skew", "exkurt", "snr"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(self.methods.iter().cloned());
        header.extend(["skew pref", "n*", "chebyshev"].map(String::from));
        // First column is left-aligned; put the rank there.
        let rows: Vec<Vec<String>> = self
            .assets
            .iter()
            .map(|a| {
                let z = |i: usize| opt4(a.cumulants.zeta.get(i).copied());
                let mut r = vec![
                    a.rank.to_string(),
                    a.name.clone(),
                    a.observations.to_string(),
                    sig4(a.cumulants.mean),
                    sig4(a.cumulants.volatility),
                    z(0),
                    z(1),
                    sig4(a.snr),
                ];
                r.extend(a.scores.iter().map(|s| s.value.map_or_else(|| "error".into(), sig4)));
                r.push(sign_label(a.skew_preference).into());
                r.push(opt4(a.crossover_horizon));
                r.push(opt4(a.chebyshev_bound));
                r
            })
            .collect();
        out.push_str(&render_table(&header, &rows));
        for a in &self.assets {
            for s in &a.scores {
                if let Some(e) = &s.error {
                    out.push_str(&format!("note: {} {}: {e}\n", a.name, s.method));
                }
            }
        }
        out
    }
}
