//! Ψ̂ across horizons for one set of per-period moments.

use safety_first::{roy_cf_quadratic, skew_preference, Cumulants, Horizon, SkewSign};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::{render_table, sig4};
use crate::rank::{TOOL, VERSION};

pub const DEFAULT_HORIZONS: [f64; 6] = [1.0, 5.0, 21.0, 60.0, 126.0, 252.0];

#[derive(Debug, Clone)]
pub struct TermOptions {
    pub snr: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub rfr: f64,
    pub zeta3: f64,
    pub horizons: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TermRow {
    pub horizon: f64,
    pub psi: Option<f64>,
    pub error: Option<String>,
    pub skew_preference: SkewSign,
    /// This row is n* = 1/snr² rather than a requested horizon.
    pub crossover: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TermReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub snr: f64,
    pub zeta3: f64,
    pub crossover_horizon: Option<f64>,
    pub rows: Vec<TermRow>,
}

pub fn term(o: &TermOptions) -> CliResult<TermReport> {
    let (c, r0) = match (o.snr, o.mu, o.sigma) {
        (Some(snr), None, None) => (Cumulants::new(snr, 1.0, &[o.zeta3]), 0.0),
        (None, Some(mu), Some(sigma)) => (Cumulants::new(mu, sigma, &[o.zeta3]), o.rfr),
        _ => return Err(CliError::Input("give either --snr or both --mu and --sigma".into())),
    };
    let c = c.map_err(|e| CliError::Input(e.to_string()))?;
    if o.horizons.is_empty() {
        return Err(CliError::Input("--horizons is empty".into()));
    }
    if let Some(bad) = o.horizons.iter().find(|n| !(**n > 0.0 && n.is_finite())) {
        return Err(CliError::Input(format!("horizon {bad} is not a positive number")));
    }
    let snr = c.snr(r0);
    let probe = Horizon::new(1.0, r0)?;
    let crossover = skew_preference(&c, &probe).crossover_horizon;

    let row = |n: f64, crossover: bool| -> CliResult<TermRow> {
        let h = Horizon::new(n, r0)?;
        let sign = if crossover { SkewSign::Neutral } else { skew_preference(&c, &h).sign };
        let (psi, error) = match roy_cf_quadratic(&c, &h) {
            Ok(s) => (Some(s.value), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(TermRow {
            horizon: n,
            psi,
            error,
            skew_preference: sign,
            crossover,
        })
    };
    let mut horizons = o.horizons.clone();
    horizons.sort_by(f64::total_cmp);
    horizons.dedup();
    let mut rows = Vec::with_capacity(horizons.len() + 1);
    for n in horizons {
        rows.push(row(n, false)?);
    }
    if let Some(ns) = crossover {
        let at = rows.partition_point(|r| r.horizon <= ns);
        rows.insert(at, row(ns, true)?);
    }
    Ok(TermReport {
        tool: TOOL,
        version: VERSION,
        snr,
        zeta3: o.zeta3,
        crossover_horizon: crossover,
        rows,
    })
}

impl TermReport {
    pub fn to_table(&self) -> String {
        let mut out = format!("snr {} zeta3 {}\n\n", sig4(self.snr), sig4(self.zeta3));
        let header = ["n", "psi", "skew pref"].map(String::from);
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let sign = match (r.crossover, r.skew_preference) {
                    (true, _) => "crossover",
                    (_, SkewSign::Positive) => "+",
                    (_, SkewSign::Negative) => "-",
                    (_, SkewSign::Neutral) => "0",
                };
                vec![sig4(r.horizon), r.psi.map_or_else(|| "error".into(), sig4), sign.into()]
            })
            .collect();
        out.push_str(&render_table(&header, &rows));
        for r in &self.rows {
            if let Some(e) = &r.error {
                out.push_str(&format!("note: n = {}: {e}\n", r.horizon));
            }
        }
        out
    }
}
