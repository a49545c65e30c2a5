use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use safety_first::{simulate, Family, GeneratorSpec};
use safety_first_cli::counterexample::{counterexample, CounterexampleOptions};
use safety_first_cli::input::read_table;
use safety_first_cli::rank::{rank, RankMethod, RankOptions};
use safety_first_cli::term::{term, TermOptions, DEFAULT_HORIZONS};
use safety_first_cli::{CliError, CliResult};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "safety-first", version, about = "Rank assets by the generalized Roy safety-first criterion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score and rank every column of a returns file.
    Rank(RankArgs),
    /// Bonus-asset example: FOSD holds but the Sharpe ratio falls.
    Counterexample(CounterexampleArgs),
    /// Ψ̂ from the closed-form Cornish-Fisher root across horizons.
    Term(TermArgs),
    /// Draw a sample and write it as one value per line.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Table,
    Machine,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    output: Output,
    /// Write the machine-format report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    /// Delimiter-separated returns, header row of asset names.
    input: PathBuf,
    /// Disaster rate r₀ per period.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rfr: f64,
    /// Horizon n in periods.
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// sharpe, sr3, exact-empirical, edgeworth:K, cf-newton:K or cf-quadratic.
    /// Repeatable; the first one orders the ranking.
    #[arg(long = "method", value_parser = parse_method)]
    methods: Vec<RankMethod>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b3: f64,
    /// Seed for the exact-empirical bootstrap at horizons above one.
    #[arg(long)]
    seed: Option<u64>,
    /// Bootstrap path count.
    #[arg(long)]
    paths: Option<usize>,
    /// Single-byte delimiter; detected from the header when omitted.
    #[arg(long, value_parser = parse_delimiter)]
    delimiter: Option<u8>,
    /// Label for one row of the input.
    #[arg(long, default_value = "day")]
    period: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long, default_value_t = 0.001, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    sigma: f64,
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    p: f64,
    /// Bonus size B.
    #[arg(long = "bonus", short = 'B', default_value_t = 0.25, allow_negative_numbers = true)]
    bonus: f64,
    /// Monte Carlo paths for the sampled dominance check; 0 skips it.
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TermArgs {
    /// Per-period (μ − r₀)/σ.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["mu", "sigma"])]
    snr: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "sigma")]
    mu: Option<f64>,
    #[arg(long, requires = "mu")]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rfr: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    zeta3: f64,
    /// Comma-separated horizons.
    #[arg(long, value_delimiter = ',')]
    horizons: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Normal,
    Gamma,
    Bonus,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mean: f64,
    #[arg(long, default_value_t = 1.0)]
    sd: f64,
    #[arg(long, default_value_t = 1.0)]
    shape: f64,
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    shift: f64,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    bonus: f64,
    /// Each value is the mean of this many per-period draws.
    #[arg(long, default_value_t = 1)]
    horizon: u32,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<RankMethod, String> {
    s.parse()
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be one ASCII character or 'tab', got '{s}'")),
    }
}

fn emit<T: Serialize>(report: &T, table: impl FnOnce() -> String, o: &OutputArgs) -> CliResult<()> {
    let machine = || {
        serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Numeric(format!("cannot serialize report: {e}")))
    };
    if let Some(path) = &o.out {
        write_file(path, machine()?.as_bytes())?;
        if let Output::Table = o.output {
            print!("{}", table());
        }
        return Ok(());
    }
    match o.output {
        Output::Table => print!("{}", table()),
        Output::Machine => print!("{}", machine()?),
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Rank(a) => {
            let table = read_table(&a.input, a.delimiter, &a.period)?;
            let opts = RankOptions {
                rfr: a.rfr,
                horizon: a.horizon,
                methods: if a.methods.is_empty() { vec![RankMethod::CfQuadratic] } else { a.methods },
                b3: a.b3,
                seed: a.seed,
                paths: a.paths,
            };
            let report = rank(&table, &opts)?;
            emit(&report, || report.to_table(), &a.output)
        }
        Command::Counterexample(a) => {
            let report = counterexample(&CounterexampleOptions {
                mu: a.mu,
                sigma: a.sigma,
                p: a.p,
                bonus: a.bonus,
                paths: a.paths,
                seed: a.seed,
            })?;
            emit(&report, || report.to_table(), &a.output)
        }
        Command::Term(a) => {
            let report = term(&TermOptions {
                snr: a.snr,
                mu: a.mu,
                sigma: a.sigma,
                rfr: a.rfr,
                zeta3: a.zeta3,
                horizons: if a.horizons.is_empty() { DEFAULT_HORIZONS.to_vec() } else { a.horizons },
            })?;
            emit(&report, || report.to_table(), &a.output)
        }
        Command::Simulate(a) => {
            let family = match a.family {
                FamilyName::Normal => Family::Normal { mean: a.mean, sd: a.sd },
                FamilyName::Gamma => Family::ShiftedGamma { shape: a.shape, rate: a.rate, shift: a.shift },
                FamilyName::Bonus => Family::BonusMixture { mean: a.mean, sd: a.sd, p: a.p, bonus: a.bonus },
            };
            let spec = GeneratorSpec::new(family, a.horizon)?;
            let sample = simulate(&spec, a.paths, a.seed)?;
            match &a.out {
                Some(path) => {
                    let f = File::create(path)
                        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
                    let mut w = BufWriter::new(f);
                    sample.write_column(&mut w)?;
                    w.flush()?;
                }
                None => {
                    let mut w = BufWriter::new(io::stdout().lock());
                    sample.write_column(&mut w)?;
                    w.flush()?;
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("safety-first: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
