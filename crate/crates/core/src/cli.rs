//! Command-line verbs: `backtest`, `compare` and `sweep`.
//!
//! Settings come from three layers, highest first: command-line flags, an
//! optional JSON config file (`--config`), and built-in defaults. The
//! `RELP_THREADS` environment variable caps the worker pool.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptive::{AdapVariant, AdaptiveConfig, RelpAdap, SbConfig, SchemeKind, log_grid};
use crate::error::{Error, Result};
use crate::framework::{run_backtest, BacktestResult, Strategy};
use crate::market_data::{load_relatives, InputFormat, RelativesMatrix};
use crate::metrics::{
    csv_cell, relative_ranking_partial, MetricReport, WealthSeries, DEFAULT_PERIODS_PER_YEAR,
};
use crate::strategies::{Eg, Olmar, RelpFixed, RelpParams, Ubah, Ucrp};
use crate::transaction_cost::CostSpec;

/// Strategy names accepted on the command line. `relp-kappa:<scheme>` is
/// also accepted, with a scheme letter `a`-`j` or name.
pub const KNOWN_STRATEGIES: [&str; 7] =
    ["ubah", "ucrp", "eg", "olmar", "relp", "relp-adap-1", "relp-adap-2"];

/// A log-spaced grid `lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub const fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo, hi, n }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        log_grid(self.lo, self.hi, self.n)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("grid must look like lo:hi:n, got '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(bad());
        };
        Ok(Self {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            n: n.parse().map_err(|_| bad())?,
        })
    }
}

/// Synthetic market `PERIODSxASSETS`, used when no data file is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub periods: usize,
    pub assets: usize,
}

impl FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("synthetic market must look like 250x5, got '{s}'"));
        let (p, a) = s.split_once('x').ok_or_else(bad)?;
        Ok(Self {
            periods: p.parse().map_err(|_| bad())?,
            assets: a.parse().map_err(|_| bad())?,
        })
    }
}

/// Strategy parameters shared by every verb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategySettings {
    pub kappa: f64,
    /// `lambda = lambda_multiplier * gamma`.
    pub lambda_multiplier: f64,
    pub window: usize,
    pub eg_eta: f64,
    pub olmar_eps: f64,
    pub olmar_window: usize,
    pub kappa_grid: GridSpec,
    pub lambda_grid: GridSpec,
    pub sb: SbConfig,
}

impl Default for StrategySettings {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            lambda_multiplier: 10.0,
            window: RelpParams::DEFAULT_WINDOW,
            eg_eta: 0.05,
            olmar_eps: 10.0,
            olmar_window: 5,
            kappa_grid: GridSpec::new(0.1, 10.0, 31),
            lambda_grid: GridSpec::new(1.0, 100.0, 31),
            sb: SbConfig::default(),
        }
    }
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub format: InputFormat,
    pub synthetic: Option<SyntheticSpec>,
    pub strategies: Vec<String>,
    pub gammas: Vec<f64>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub parallel: bool,
    pub periods_per_year: f64,
    pub params: StrategySettings,
    /// Radius grid of the sensitivity sweep.
    pub sweep_kappa: GridSpec,
    /// Penalty-multiplier grid of the sensitivity sweep.
    pub sweep_lambda: GridSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: None,
            format: InputFormat::CsvRelatives,
            synthetic: None,
            strategies: Vec::new(),
            gammas: vec![0.0, 0.002, 0.005],
            out_dir: PathBuf::from("out"),
            seed: 0,
            parallel: true,
            periods_per_year: DEFAULT_PERIODS_PER_YEAR,
            params: StrategySettings::default(),
            sweep_kappa: GridSpec::new(0.1, 10.0, 21),
            sweep_lambda: GridSpec::new(0.01, 100.0, 41),
        }
    }
}

impl RunConfig {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.data.is_none() && self.synthetic.is_none() {
            return Err(Error::Config("no market given; pass --data or --synthetic".into()));
        }
        if self.gammas.is_empty() {
            return Err(Error::Config("at least one gamma is required".into()));
        }
        for &g in &self.gammas {
            CostSpec::new(g)?;
        }
        for name in &self.strategies {
            parse_strategy(name)?;
        }
        self.params.sb.validate()
    }

    pub fn load_market(&self) -> Result<RelativesMatrix> {
        match (&self.data, self.synthetic) {
            (Some(path), _) => load_relatives(path, self.format),
            (None, Some(s)) => RelativesMatrix::synthetic(s.periods, s.assets, self.seed),
            (None, None) => Err(Error::Config("no market given".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum StrategyKind {
    Ubah,
    Ucrp,
    Eg,
    Olmar,
    Relp,
    Adap(AdapVariant),
    KappaScheme(SchemeKind),
}

fn parse_strategy(name: &str) -> Result<StrategyKind> {
    Ok(match name {
        "ubah" => StrategyKind::Ubah,
        "ucrp" => StrategyKind::Ucrp,
        "eg" => StrategyKind::Eg,
        "olmar" => StrategyKind::Olmar,
        "relp" => StrategyKind::Relp,
        "relp-adap-1" => StrategyKind::Adap(AdapVariant::Adap1),
        "relp-adap-2" => StrategyKind::Adap(AdapVariant::Adap2),
        other => match other.strip_prefix("relp-kappa:") {
            Some(scheme) => StrategyKind::KappaScheme(scheme.parse()?),
            None => {
                return Err(Error::Config(format!(
                    "unknown strategy '{other}'; known strategies: {}, relp-kappa:<a-j>",
                    KNOWN_STRATEGIES.join(", ")
                )))
            }
        },
    })
}

/// A constructed strategy. Adaptive ones keep their concrete type so their
/// trace can be written.
pub enum Built {
    Plain(Box<dyn Strategy>),
    Adaptive(RelpAdap),
}

impl Built {
    pub fn strategy_mut(&mut self) -> &mut dyn Strategy {
        match self {
            Built::Plain(s) => s.as_mut(),
            Built::Adaptive(s) => s,
        }
    }
}

/// Builds the named strategy for cost rate `gamma`.
pub fn build_strategy(name: &str, gamma: f64, p: &StrategySettings, parallel: bool) -> Result<Built> {
    let relp_params = || {
        RelpParams::new(p.kappa, p.lambda_multiplier * gamma, gamma)?.with_window(p.window)
    };
    Ok(match parse_strategy(name)? {
        StrategyKind::Ubah => Built::Plain(Box::new(Ubah)),
        StrategyKind::Ucrp => Built::Plain(Box::new(Ucrp)),
        StrategyKind::Eg => Built::Plain(Box::new(Eg::new(p.eg_eta)?)),
        StrategyKind::Olmar => Built::Plain(Box::new(Olmar::new(p.olmar_eps, p.olmar_window)?)),
        StrategyKind::Relp => Built::Plain(Box::new(RelpFixed::new(relp_params()?)?)),
        StrategyKind::KappaScheme(kind) => Built::Plain(crate::adaptive::scheme_combinator(
            kind,
            relp_params()?,
            &p.kappa_grid.values()?,
            p.sb,
            parallel,
        )?),
        StrategyKind::Adap(variant) => {
            let cfg = AdaptiveConfig {
                kappa_grid: p.kappa_grid.values()?,
                lambda_multipliers: p.lambda_grid.values()?,
                window: p.window,
                sb: p.sb,
                parallel,
                ..AdaptiveConfig::new(variant, gamma)?
            };
            Built::Adaptive(RelpAdap::new(&cfg)?)
        }
    })
}

/// Per-run summary written next to the trade log.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub strategy: String,
    pub gamma: f64,
    pub periods: usize,
    pub assets: usize,
    /// Benchmark of the excess-return statistics.
    pub market: String,
    pub metrics: MetricReport,
}

/// File stem `<strategy>_g<gamma>`, with characters unsafe in file names
/// replaced.
pub fn run_stem(strategy: &str, gamma: f64) -> String {
    let safe: String = strategy
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '-' })
        .collect();
    format!("{safe}_g{gamma}")
}

struct Run {
    name: String,
    gamma: f64,
    result: BacktestResult,
    trace: Option<Vec<u8>>,
}

fn execute(cfg: &RunConfig, data: &RelativesMatrix, name: &str, gamma: f64) -> Result<Run> {
    let mut built = build_strategy(name, gamma, &cfg.params, cfg.parallel)?;
    let result = run_backtest(data, built.strategy_mut(), CostSpec::new(gamma)?)?;
    let trace = match &built {
        Built::Adaptive(a) => {
            let mut buf = Vec::new();
            a.write_trace_to(&mut buf)?;
            Some(buf)
        }
        Built::Plain(_) => None,
    };
    log::info!("{name} at gamma {gamma}: final wealth {}", result.wealth.values().last().unwrap());
    Ok(Run {
        name: name.to_string(),
        gamma,
        result,
        trace,
    })
}

fn with_ppy(ws: &WealthSeries, ppy: f64) -> Result<WealthSeries> {
    ws.clone().with_periods_per_year(ppy)
}

/// The buy-and-hold benchmark at each cost rate.
fn market_paths(cfg: &RunConfig, data: &RelativesMatrix) -> Result<BTreeMap<u64, WealthSeries>> {
    cfg.gammas
        .iter()
        .map(|&g| {
            let res = run_backtest(data, &mut Ubah, CostSpec::new(g)?)?;
            Ok((g.to_bits(), with_ppy(&res.wealth, cfg.periods_per_year)?))
        })
        .collect()
}

fn report(cfg: &RunConfig, run: &Run, market: &WealthSeries) -> Result<MetricReport> {
    let ws = with_ppy(&run.result.wealth, cfg.periods_per_year)?;
    MetricReport::compute(&ws, market, &run.result.trades)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn write_run(cfg: &RunConfig, data: &RelativesMatrix, run: &Run, metrics: &MetricReport) -> Result<()> {
    let stem = run_stem(&run.name, run.gamma);
    run.result
        .trades
        .write_csv(cfg.out_dir.join(format!("{stem}.csv")), data.asset_names())?;
    let summary = RunSummary {
        strategy: run.name.clone(),
        gamma: run.gamma,
        periods: data.periods(),
        assets: data.assets(),
        market: "ubah".into(),
        metrics: metrics.clone(),
    };
    let json_path = cfg.out_dir.join(format!("{stem}.json"));
    serde_json::to_writer_pretty(create(&json_path)?, &summary)?;
    if let Some(trace) = &run.trace {
        let path = cfg.out_dir.join(format!("{stem}_trace.csv"));
        std::fs::write(&path, trace).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn prepare(cfg: &RunConfig) -> Result<RelativesMatrix> {
    cfg.validate()?;
    if cfg.strategies.is_empty() {
        return Err(Error::Config("no strategy given".into()));
    }
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    cfg.load_market()
}

fn run_all(cfg: &RunConfig, data: &RelativesMatrix) -> Result<Vec<Run>> {
    let jobs: Vec<(&str, f64)> = cfg
        .strategies
        .iter()
        .flat_map(|s| cfg.gammas.iter().map(move |&g| (s.as_str(), g)))
        .collect();
    let go = |&(name, g): &(&str, f64)| execute(cfg, data, name, g);
    if cfg.parallel {
        jobs.par_iter().map(go).collect()
    } else {
        jobs.iter().map(go).collect()
    }
}

/// Runs every (strategy, gamma) pair and writes `<stem>.csv` and
/// `<stem>.json` into the output directory.
pub fn cmd_backtest(cfg: &RunConfig) -> Result<()> {
    let data = prepare(cfg)?;
    let markets = market_paths(cfg, &data)?;
    for run in run_all(cfg, &data)? {
        let metrics = report(cfg, &run, &markets[&run.gamma.to_bits()])?;
        write_run(cfg, &data, &run, &metrics)?;
    }
    Ok(())
}

/// Removes repeated strategy names, keeping first occurrences.
pub fn dedup_strategies(names: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for n in names {
        if out.contains(n) {
            log::warn!("strategy '{n}' listed more than once; running it once");
        } else {
            out.push(n.clone());
        }
    }
    out
}

/// Backtests every strategy, then writes `compare_metrics.csv` (one row per
/// strategy and gamma) and `ranking_<metric>.csv` (strategies by gamma,
/// scaled so the best is 1 and the worst 0 within each gamma).
pub fn cmd_compare(cfg: &RunConfig) -> Result<()> {
    let cfg = RunConfig {
        strategies: dedup_strategies(&cfg.strategies),
        ..cfg.clone()
    };
    let data = prepare(&cfg)?;
    let markets = market_paths(&cfg, &data)?;
    let runs = run_all(&cfg, &data)?;
    let mut reports = Vec::with_capacity(runs.len());
    for run in &runs {
        let r = report(&cfg, run, &markets[&run.gamma.to_bits()])?;
        write_run(&cfg, &data, run, &r)?;
        reports.push(r);
    }

    let mut wtr = csv::Writer::from_writer(create(&cfg.out_dir.join("compare_metrics.csv"))?);
    let mut header = vec!["strategy".to_string(), "gamma".into()];
    header.extend(MetricReport::COLUMNS.iter().map(|(n, _)| n.to_string()));
    wtr.write_record(&header)?;
    for (run, r) in runs.iter().zip(&reports) {
        let mut row = vec![run.name.clone(), run.gamma.to_string()];
        row.extend(r.values().iter().map(|v| csv_cell(*v)));
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io(&cfg.out_dir, e))?;

    // Runs are ordered strategy-major, gamma-minor.
    let ng = cfg.gammas.len();
    for (col, (metric, direction)) in MetricReport::COLUMNS.iter().enumerate() {
        let mut table = vec![vec![None; ng]; cfg.strategies.len()];
        for (gi, _) in cfg.gammas.iter().enumerate() {
            let stats: Vec<Option<f64>> = (0..cfg.strategies.len())
                .map(|si| reports[si * ng + gi].values()[col])
                .collect();
            for (si, v) in relative_ranking_partial(&stats, *direction).into_iter().enumerate() {
                table[si][gi] = v;
            }
        }
        let path = cfg.out_dir.join(format!("ranking_{metric}.csv"));
        let mut wtr = csv::Writer::from_writer(create(&path)?);
        let mut header = vec!["strategy".to_string()];
        header.extend(cfg.gammas.iter().map(|g| format!("g{g}")));
        wtr.write_record(&header)?;
        for (name, row) in cfg.strategies.iter().zip(&table) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|v| csv_cell(*v)));
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// One cell of a sensitivity sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub kappa: f64,
    pub lambda_multiplier: f64,
    pub lambda: f64,
    pub cumulative_wealth: f64,
    pub sharpe_daily: Option<f64>,
    pub max_drawdown: f64,
    pub calmar: Option<f64>,
    /// Set when the penalty vanishes because `gamma` is 0.
    pub lambda_zero: bool,
}

/// Runs the fixed robust strategy on every grid cell for each gamma.
pub fn sweep_rows(cfg: &RunConfig, data: &RelativesMatrix) -> Result<Vec<SweepRow>> {
    let kappas = cfg.sweep_kappa.values()?;
    let mults = cfg.sweep_lambda.values()?;
    let mut cells = Vec::with_capacity(cfg.gammas.len() * kappas.len() * mults.len());
    for &g in &cfg.gammas {
        for &k in &kappas {
            for &d in &mults {
                cells.push((g, k, d));
            }
        }
    }
    let go = |&(gamma, kappa, mult): &(f64, f64, f64)| -> Result<SweepRow> {
        let lambda = mult * gamma;
        let params = RelpParams::new(kappa, lambda, gamma)?.with_window(cfg.params.window)?;
        let res = run_backtest(data, &mut RelpFixed::new(params)?, CostSpec::new(gamma)?)?;
        let ws = with_ppy(&res.wealth, cfg.periods_per_year)?;
        Ok(SweepRow {
            gamma,
            kappa,
            lambda_multiplier: mult,
            lambda,
            cumulative_wealth: crate::metrics::cumulative_wealth(&ws),
            sharpe_daily: crate::metrics::sharpe_daily(&ws, crate::metrics::DEFAULT_RISK_FREE),
            max_drawdown: crate::metrics::max_drawdown(&ws),
            calmar: crate::metrics::calmar(&ws),
            lambda_zero: lambda == 0.0,
        })
    };
    if cfg.parallel {
        cells.par_iter().map(go).collect()
    } else {
        cells.iter().map(go).collect()
    }
}

/// Writes `sweep.csv` in long format.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let data = cfg.load_market()?;
    let rows = sweep_rows(cfg, &data)?;
    let path = cfg.out_dir.join("sweep.csv");
    let mut wtr = csv::Writer::from_writer(create(&path)?);
    wtr.write_record([
        "gamma",
        "kappa",
        "lambda_multiplier",
        "lambda",
        "cumulative_wealth",
        "sharpe_daily",
        "max_drawdown",
        "calmar",
        "lambda_zero",
    ])?;
    for r in &rows {
        wtr.write_record([
            r.gamma.to_string(),
            r.kappa.to_string(),
            r.lambda_multiplier.to_string(),
            r.lambda.to_string(),
            r.cumulative_wealth.to_string(),
            csv_cell(r.sharpe_daily),
            r.max_drawdown.to_string(),
            csv_cell(r.calmar),
            r.lambda_zero.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "relp", version, about = "Online portfolio selection with transaction costs")]
pub struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Backtest one strategy and write its trade log and metrics.
    Backtest {
        #[arg(long)]
        strategy: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Backtest several strategies and write comparison tables.
    Compare {
        /// Comma-separated strategy names.
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<String>>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the fixed robust strategy over a radius by penalty grid.
    Sweep {
        /// Radius grid `lo:hi:n` (log-spaced).
        #[arg(long)]
        kappa_grid: Option<GridSpec>,
        /// Penalty-multiplier grid `lo:hi:n` (log-spaced).
        #[arg(long)]
        lambda_grid: Option<GridSpec>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Relatives or prices CSV.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// `csv_relatives` or `csv_prices`.
    #[arg(long)]
    pub format: Option<InputFormat>,
    /// Generate a market `PERIODSxASSETS` instead of reading one.
    #[arg(long)]
    pub synthetic: Option<SyntheticSpec>,
    /// Cost rates, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run on a single thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub lambda_mult: Option<f64>,
    /// Predictor window.
    #[arg(long)]
    pub window: Option<usize>,
    /// Radius grid `lo:hi:n` of the adaptive strategies.
    #[arg(long)]
    pub adaptive_kappa_grid: Option<GridSpec>,
    /// Penalty-multiplier grid `lo:hi:n` of the adaptive strategies.
    #[arg(long)]
    pub adaptive_lambda_grid: Option<GridSpec>,
}

impl CommonArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(d) = &self.data {
            cfg.data = Some(d.clone());
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(s) = self.synthetic {
            cfg.synthetic = Some(s);
        }
        if let Some(g) = &self.gamma {
            cfg.gammas = g.clone();
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.sequential {
            cfg.parallel = false;
        }
        if let Some(k) = self.kappa {
            cfg.params.kappa = k;
        }
        if let Some(l) = self.lambda_mult {
            cfg.params.lambda_multiplier = l;
        }
        if let Some(w) = self.window {
            cfg.params.window = w;
        }
        if let Some(g) = self.adaptive_kappa_grid {
            cfg.params.kappa_grid = g;
        }
        if let Some(g) = self.adaptive_lambda_grid {
            cfg.params.lambda_grid = g;
        }
    }
}

/// Merges defaults, the config file and the flags of `command`.
pub fn resolve(config: Option<&Path>, command: &Command) -> Result<RunConfig> {
    let mut cfg = match config {
        Some(p) => RunConfig::read(p)?,
        None => RunConfig::default(),
    };
    match command {
        Command::Backtest { strategy, common } => {
            if let Some(s) = strategy {
                cfg.strategies = vec![s.clone()];
            }
            common.apply(&mut cfg);
        }
        Command::Compare { strategies, common } => {
            if let Some(s) = strategies {
                cfg.strategies = s.clone();
            }
            common.apply(&mut cfg);
        }
        Command::Sweep {
            kappa_grid,
            lambda_grid,
            common,
        } => {
            if let Some(g) = kappa_grid {
                cfg.sweep_kappa = *g;
            }
            if let Some(g) = lambda_grid {
                cfg.sweep_lambda = *g;
            }
            common.apply(&mut cfg);
        }
    }
    Ok(cfg)
}

/// Process exit code for an error: 2 for bad configuration, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

/// Sizes the global worker pool from `RELP_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("RELP_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("RELP_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

/// Entry point shared by the binary: parses `args`, runs the verb and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    let outcome = configure_threads()
        .and_then(|_| resolve(cli.config.as_deref(), &cli.command))
        .and_then(|cfg| match &cli.command {
            Command::Backtest { .. } => cmd_backtest(&cfg),
            Command::Compare { .. } => cmd_compare(&cfg),
            Command::Sweep { .. } => cmd_sweep(&cfg),
        });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("relp: {e}");
            exit_code(&e)
        }
    }
}
