use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use switching_portfolios::backtest::{
    compare, emit_plot_data, run, AlgoKind, AlgoSpec, CostAccounting,
};
use switching_portfolios::costs::{CostKind, CostModel};
use switching_portfolios::domain::{PortfolioVector, PriceRelativeMatrix, RegimeSpec};
use switching_portfolios::market_data::{
    load_csv, synth_random, synth_regime_pair, synth_volatility_pair, write_csv, RawSeriesFile,
    SeriesMode,
};
use switching_portfolios::numerics::format_sig17;
use switching_portfolios::regimes::{
    best_regimes_by_switches, bound_check, log_mixture_oracle, CostConvention, PriorKind,
};
use switching_portfolios::switching::{AdaptiveState, FixedGammaState, SwitchingState};
use switching_portfolios::Error;

const THREADS_VAR: &str = "REGIME_SWITCH_THREADS";

/// Online portfolio selection with switching regimes.
#[derive(Debug, Parser)]
#[command(name = "swport", version)]
struct Cli {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one strategy and print a summary.
    Backtest(BacktestArgs),
    /// Run several strategies on the same data.
    Compare(CompareArgs),
    /// Compare an algorithm against the brute-force regime mixture.
    Oracle(OracleArgs),
    /// Check the competitive bound against the best regime per switch count.
    Bounds(BoundsArgs),
    /// Generate a synthetic market as a relatives CSV.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Input CSV.
    #[arg(long)]
    data: PathBuf,
    /// Whether the CSV holds prices or price relatives.
    #[arg(long, value_enum, default_value_t = ModeArg::Relatives)]
    mode: ModeArg,
    /// Restrict to these columns (comma-separated names).
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
}

#[derive(Debug, Args)]
struct CostArgs {
    #[arg(long, value_enum, default_value_t = CostArg::None)]
    cost_model: CostArg,
    /// Commission rate c.
    #[arg(long, default_value_t = 0.0)]
    cost_rate: f64,
}

#[derive(Debug, Args)]
struct BacktestArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    cost: CostArgs,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Switching rate for switching-fixed, e.g. 0.3333333333.
    #[arg(long, required_if_eq("algo", "switching-fixed"))]
    gamma: Option<f64>,
    /// CRP weights, comma-separated (default uniform).
    #[arg(long, value_delimiter = ',')]
    weights: Vec<f64>,
    /// Learning rate for eg.
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    /// Monte Carlo sample count for universal.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = AccountingArg::Bucket)]
    accounting: AccountingArg,
    /// Also write the per-day wealth and weight CSV here.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    cost: CostArgs,
    /// Strategy spec such as `switching-fixed:0.3333333333`, `crp:0.5,0.5`,
    /// `eg:0.05`, `universal:100000`, `bcrp`, `best-stock`,
    /// `switching-adaptive`. Repeatable; defaults to all strategies.
    #[arg(long = "spec")]
    specs: Vec<String>,
    #[arg(long, value_enum, default_value_t = AccountingArg::Bucket)]
    accounting: AccountingArg,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    cost: CostArgs,
    #[arg(long, value_enum)]
    prior: PriorArg,
    /// Switching rate for the fixed prior.
    #[arg(long, required_if_eq("prior", "fixed"))]
    gamma: Option<f64>,
    #[arg(long, value_enum, default_value_t = ConventionArg::SwitchesOnly)]
    convention: ConventionArg,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    cost: CostArgs,
    #[arg(long, value_enum)]
    prior: PriorArg,
    #[arg(long, required_if_eq("prior", "fixed"))]
    gamma: Option<f64>,
    /// Largest switch count to report.
    #[arg(long, default_value_t = 5)]
    max_switches: usize,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    /// Repetitions of the pattern for the two-asset kinds.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Days for the random kind.
    #[arg(long, default_value_t = 100)]
    days: usize,
    /// Assets for the random kind.
    #[arg(long, default_value_t = 2)]
    assets: usize,
    /// Relatives are log-uniform on [lo, hi] for the random kind.
    #[arg(long, default_value_t = 0.25)]
    lo: f64,
    #[arg(long, default_value_t = 4.0)]
    hi: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Prices,
    Relatives,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CostArg {
    None,
    PerTrade,
    Parallel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    SwitchingFixed,
    SwitchingAdaptive,
    Crp,
    Bcrp,
    Eg,
    Universal,
    BestStock,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AccountingArg {
    Bucket,
    Realized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PriorArg {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    SwitchesOnly,
    AllSegments,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SynthKind {
    VolatilityPair,
    RegimePair,
    Random,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.into())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match configure_threads().and_then(|()| execute(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("{THREADS_VAR} must be a non-negative integer, got {raw:?}")))?;
    if threads > 0 {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

fn execute(cli: &Cli) -> CliResult<()> {
    let output = match &cli.command {
        Command::Backtest(args) => backtest(args, cli.seed)?,
        Command::Compare(args) => compare_cmd(args, cli.seed)?,
        Command::Oracle(args) => oracle(args)?,
        Command::Bounds(args) => bounds(args)?,
        Command::Synth(args) => synth(args, cli.seed)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, output)?,
        None => io::stdout().lock().write_all(output.as_bytes())?,
    }
    Ok(())
}

fn load(args: &DataArgs) -> CliResult<PriceRelativeMatrix> {
    let mode = match args.mode {
        ModeArg::Prices => SeriesMode::Prices,
        ModeArg::Relatives => SeriesMode::Relatives,
    };
    let market = load_csv(&RawSeriesFile::new(&args.data, mode))?;
    if args.columns.is_empty() {
        return Ok(market);
    }
    let picks = args
        .columns
        .iter()
        .map(|c| {
            market
                .asset_names()
                .iter()
                .position(|n| n == c)
                .ok_or_else(|| Failure::Usage(format!("no column named {c:?} in {}", args.data.display())))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(market.select_assets(&picks)?)
}

fn cost_model(args: &CostArgs) -> CliResult<CostModel> {
    let kind = match args.cost_model {
        CostArg::None => CostKind::None,
        CostArg::PerTrade => CostKind::ProportionalPerTrade,
        CostArg::Parallel => CostKind::Parallel,
    };
    Ok(CostModel::new(kind, args.cost_rate)?)
}

fn accounting(arg: AccountingArg) -> CostAccounting {
    match arg {
        AccountingArg::Bucket => CostAccounting::Bucket,
        AccountingArg::Realized => CostAccounting::Realized,
    }
}

fn prior(arg: PriorArg, gamma: Option<f64>) -> PriorKind {
    match arg {
        PriorArg::Fixed => PriorKind::FixedGamma(gamma.expect("clap enforces --gamma")),
        PriorArg::Adaptive => PriorKind::Adaptive,
    }
}

fn backtest(args: &BacktestArgs, seed: u64) -> CliResult<String> {
    let market = load(&args.data)?;
    let kind = match args.algo {
        AlgoArg::SwitchingFixed => AlgoKind::SwitchingFixed {
            gamma: args.gamma.expect("clap enforces --gamma"),
        },
        AlgoArg::SwitchingAdaptive => AlgoKind::SwitchingAdaptive,
        AlgoArg::Crp if args.weights.is_empty() => AlgoKind::Crp(PortfolioVector::uniform(market.assets())),
        AlgoArg::Crp => AlgoKind::Crp(PortfolioVector::new(args.weights.clone())?),
        AlgoArg::Bcrp => AlgoKind::Bcrp,
        AlgoArg::Eg => AlgoKind::Eg { eta: args.eta },
        AlgoArg::Universal => AlgoKind::Universal { samples: args.samples, seed },
        AlgoArg::BestStock => AlgoKind::BestStock,
    };
    let spec = AlgoSpec::new(kind)
        .with_cost(cost_model(&args.cost)?)
        .with_accounting(accounting(args.accounting));
    let report = run(&spec, &market)?;
    if let Some(path) = &args.plot {
        fs::write(path, emit_plot_data(&report))?;
    }
    Ok(report.summary_tsv())
}

/// Parses `name[:params]`; CRP weights may only be defaulted once `N` is known.
fn parse_spec(text: &str, assets: usize, seed: u64) -> CliResult<AlgoKind> {
    let (name, param) = match text.split_once(':') {
        Some((n, p)) => (n.trim(), Some(p.trim())),
        None => (text.trim(), None),
    };
    let bad = |what: &str| Failure::Usage(format!("invalid {what} in spec {text:?}"));
    let number = |p: &str, what: &str| p.parse::<f64>().map_err(|_| bad(what));
    let kind = match (name, param) {
        ("switching-fixed", Some(p)) => AlgoKind::SwitchingFixed { gamma: number(p, "gamma")? },
        ("switching-fixed", None) => {
            return Err(Failure::Usage(format!("spec {text:?} needs a gamma, e.g. switching-fixed:0.3333333333")))
        }
        ("switching-adaptive", None) => AlgoKind::SwitchingAdaptive,
        ("crp", None) => AlgoKind::Crp(PortfolioVector::uniform(assets)),
        ("crp", Some(p)) => {
            let w = p.split(',').map(|v| number(v.trim(), "weight")).collect::<CliResult<Vec<_>>>()?;
            AlgoKind::Crp(PortfolioVector::new(w)?)
        }
        ("bcrp", None) => AlgoKind::Bcrp,
        ("eg", p) => AlgoKind::Eg { eta: p.map_or(Ok(0.05), |p| number(p, "eta"))? },
        ("universal", p) => AlgoKind::Universal {
            samples: p.map_or(Ok(100_000), |p| p.parse().map_err(|_| bad("sample count")))?,
            seed,
        },
        ("best-stock", None) => AlgoKind::BestStock,
        _ => return Err(Failure::Usage(format!("unknown strategy spec {text:?}"))),
    };
    Ok(kind)
}

const DEFAULT_SPECS: [&str; 7] = [
    "best-stock",
    "bcrp",
    "crp",
    "universal",
    "eg",
    "switching-fixed:0.33333333333333333",
    "switching-adaptive",
];

fn compare_cmd(args: &CompareArgs, seed: u64) -> CliResult<String> {
    // Reject malformed specs before touching the data.
    let texts: Vec<&str> = if args.specs.is_empty() {
        DEFAULT_SPECS.to_vec()
    } else {
        args.specs.iter().map(String::as_str).collect()
    };
    for t in &texts {
        if let Err(Failure::Usage(msg)) = parse_spec(t, 1, seed) {
            return Err(Failure::Usage(msg));
        }
    }
    let cost = cost_model(&args.cost)?;
    let market = load(&args.data)?;
    let specs = texts
        .iter()
        .map(|t| {
            parse_spec(t, market.assets(), seed).map(|k| {
                AlgoSpec::new(k).with_cost(cost).with_accounting(accounting(args.accounting))
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(compare(&specs, &market)?.to_tsv())
}

fn run_switching(market: &PriceRelativeMatrix, prior: PriorKind, cost: &CostModel) -> CliResult<f64> {
    fn drive<S: SwitchingState>(mut s: S, m: &PriceRelativeMatrix, c: &CostModel) -> CliResult<f64> {
        for x in m.rows() {
            s.step(x, c)?;
        }
        Ok(s.log_total_wealth())
    }
    match prior {
        PriorKind::FixedGamma(g) => drive(FixedGammaState::new(market.assets(), g)?, market, cost),
        PriorKind::Adaptive => drive(AdaptiveState::new(market.assets())?, market, cost),
    }
}

fn oracle(args: &OracleArgs) -> CliResult<String> {
    let market = load(&args.data)?;
    let cost = cost_model(&args.cost)?;
    let prior = prior(args.prior, args.gamma);
    let convention = match args.convention {
        ConventionArg::SwitchesOnly => CostConvention::SwitchesOnly,
        ConventionArg::AllSegments => CostConvention::AllSegments,
    };
    let oracle = log_mixture_oracle(&market, prior, &cost, convention)?;
    let mut alg = run_switching(&market, prior, &cost)?;
    if convention == CostConvention::AllSegments && market.days() > 0 {
        // The initial purchase of every segment's first asset.
        alg += cost.switch_factor().ln();
    }
    let gap = (alg - oracle).exp_m1().abs();
    Ok(format!(
        "prior\tconvention\tcost\tdays\tassets\toracle_wealth\talgorithm_wealth\trelative_gap\n\
         {}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
        match prior {
            PriorKind::FixedGamma(g) => format!("fixed:{}", format_sig17(g)),
            PriorKind::Adaptive => "adaptive".into(),
        },
        match convention {
            CostConvention::SwitchesOnly => "switches-only",
            CostConvention::AllSegments => "all-segments",
        },
        cost,
        market.days(),
        market.assets(),
        format_sig17(oracle.exp()),
        format_sig17(alg.exp()),
        format_sig17(gap),
    ))
}

fn regime_label(q: &RegimeSpec, names: &[String]) -> String {
    let mut out = names[q.strategies()[0]].clone();
    for (t, a) in q.switch_times().iter().zip(&q.strategies()[1..]) {
        out.push_str(&format!("|{t}|{}", names[*a]));
    }
    out
}

fn bounds(args: &BoundsArgs) -> CliResult<String> {
    let market = load(&args.data)?;
    let cost = cost_model(&args.cost)?;
    let prior = prior(args.prior, args.gamma);
    prior.validate()?;
    let alg_bits = run_switching(&market, prior, &cost)? / std::f64::consts::LN_2;
    let mut out =
        String::from("switches\tregime\tregime_log2_wealth\tpenalty_bits\talgorithm_log2_wealth\tslack_bits\n");
    for (q, _) in best_regimes_by_switches(&market, &cost, args.max_switches)? {
        let r = bound_check(&market, prior, &cost, alg_bits, &q)?;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.switches,
            regime_label(&q, market.asset_names()),
            format_sig17(r.regime_log_wealth),
            format_sig17(r.penalty),
            format_sig17(r.algorithm_log_wealth),
            format_sig17(r.slack),
        ));
    }
    Ok(out)
}

fn synth(args: &SynthArgs, seed: u64) -> CliResult<String> {
    let market = match args.kind {
        SynthKind::VolatilityPair => synth_volatility_pair(args.n)?,
        SynthKind::RegimePair => synth_regime_pair(args.n)?,
        SynthKind::Random => synth_random(args.days, args.assets, args.lo, args.hi, seed)?,
    };
    Ok(write_csv(&market))
}
