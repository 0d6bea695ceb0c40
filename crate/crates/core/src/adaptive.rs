//! Online selection of the robust strategy's parameters from pools of experts.
//!
//! An [`ExpertPool`] runs several strategies side by side, each with its own
//! wealth and holdings, over the same relatives. Schemes read the experts'
//! wealth histories and either follow one expert ([`Selector`], the
//! switching-bandwidth rule), blend their portfolios ([`Combo`]), or retune the
//! radius of a host strategy ([`KappaUpdate`]). [`RelpAdap`] nests two levels:
//! an outer switching rule over penalty values, each of whose experts picks
//! its radius with an inner scheme.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::{BacktestState, StepContext, Strategy};
use crate::portfolio::Portfolio;
use crate::strategies::{RelpFixed, RelpParams};
use crate::transaction_cost::CostSpec;

/// `n` points spaced evenly in log scale on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) || n == 0 {
        return Err(Error::Config(format!("bad log grid [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

fn geometric_mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for x in v {
        s += x.ln();
        n += 1;
    }
    (s / n as f64).exp()
}

/// Indices sorted by decreasing wealth, lower index first on ties.
fn ranked(wealth: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..wealth.len()).collect();
    idx.sort_by(|&a, &b| wealth[b].total_cmp(&wealth[a]).then(a.cmp(&b)));
    idx
}

struct Expert {
    tag: f64,
    strategy: Box<dyn Strategy>,
    state: BacktestState,
    wealth: Vec<f64>,
}

/// Strategies run in lockstep over the same relatives.
///
/// Wealth histories hold `S_1, ..., S_t` for the periods observed so far
/// (initial wealth 1 omitted).
pub struct ExpertPool {
    experts: Vec<Expert>,
    parallel: bool,
}

impl ExpertPool {
    /// Each expert carries a numeric tag, typically the parameter it was
    /// built with.
    pub fn new(experts: Vec<(f64, Box<dyn Strategy>)>) -> Result<Self> {
        if experts.is_empty() {
            return Err(Error::Config("expert pool is empty".into()));
        }
        Ok(Self {
            experts: experts
                .into_iter()
                .map(|(tag, strategy)| Expert {
                    tag,
                    strategy,
                    state: BacktestState::new(0, CostSpec::free()),
                    wealth: Vec::new(),
                })
                .collect(),
            parallel: false,
        })
    }

    /// Updates experts on the rayon pool. Results do not depend on it.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn tag(&self, i: usize) -> f64 {
        self.experts[i].tag
    }

    pub fn tags(&self) -> Vec<f64> {
        self.experts.iter().map(|e| e.tag).collect()
    }

    pub fn expert(&self, i: usize) -> &dyn Strategy {
        self.experts[i].strategy.as_ref()
    }

    pub fn wealth(&self, i: usize) -> &[f64] {
        &self.experts[i].wealth
    }

    pub fn histories(&self) -> Vec<&[f64]> {
        self.experts.iter().map(|e| e.wealth.as_slice()).collect()
    }

    /// Current wealth of every expert (1 before the first period closes).
    pub fn latest_wealth(&self) -> Vec<f64> {
        self.experts.iter().map(|e| e.state.wealth()).collect()
    }

    /// The portfolio expert `i` committed for the coming period.
    pub fn proposal(&self, i: usize) -> &Portfolio {
        self.experts[i]
            .state
            .pending()
            .expect("step commits a portfolio for every expert")
    }

    /// Closes the previous period for every expert and collects their
    /// portfolios for period `ctx.t`. An expert that errors holds instead.
    pub fn step(&mut self, ctx: &StepContext<'_>) -> Result<()> {
        let observed = self.experts[0].wealth.len();
        if ctx.is_first() {
            for e in &mut self.experts {
                e.state = BacktestState::new(ctx.assets(), ctx.cost);
                e.wealth.clear();
            }
        } else if ctx.t != observed + 2 || ctx.history.len() != ctx.t - 1 {
            return Err(Error::Contract(format!(
                "expert pool at period {} cannot step to period {}",
                observed + 1,
                ctx.t
            )));
        }
        let history = ctx.history;
        let first = ctx.is_first();
        let update = |e: &mut Expert| -> Result<()> {
            if !first {
                let x = history.last().expect("history is non-empty after period 1");
                e.state.observe(x)?;
                e.wealth.push(e.state.wealth());
            }
            let b = {
                let c = e.state.context(history);
                match e.strategy.next_portfolio(&c) {
                    Ok(b) => b,
                    Err(err) => {
                        log::warn!("expert {} at period {}: {err}; holding", e.strategy.name(), c.t);
                        if first {
                            Portfolio::uniform(c.assets())
                        } else {
                            Portfolio::normalized(c.b_hat.to_vec())?
                        }
                    }
                }
            };
            e.state.rebalance(b)?;
            Ok(())
        };
        if self.parallel {
            self.experts.par_iter_mut().try_for_each(update)
        } else {
            self.experts.iter_mut().try_for_each(update)
        }
    }
}

/// Settings of the switching-bandwidth rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbConfig {
    /// Number of recent wealth values compared.
    pub window: usize,
    /// Indifference threshold.
    pub delta: f64,
    /// Bandwidth multiplier on the tracked expert's wealth spread.
    pub z: f64,
}

impl Default for SbConfig {
    fn default() -> Self {
        Self {
            window: 5,
            delta: 0.0,
            z: 1.96,
        }
    }
}

impl SbConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::Config("switching window needs at least 2 periods".into()));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite() && self.z >= 0.0 && self.z.is_finite()) {
            return Err(Error::Config(format!("invalid switching settings {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbState {
    pub tracked: usize,
    pub config: SbConfig,
}

impl SbState {
    pub fn new(config: SbConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { tracked: 0, config })
    }
}

fn window_stats(h: &[f64], w: usize) -> (f64, f64) {
    let tail = &h[h.len() - w..];
    let mean = tail.iter().sum::<f64>() / w as f64;
    let var = tail.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (w - 1) as f64;
    (mean, var.sqrt())
}

/// One switching decision over the experts' wealth histories.
///
/// A challenger whose recent mean wealth exceeds the tracked expert's by more
/// than `max(delta, z * spread)` takes over; among several, the largest mean
/// wins, then the lowest index. Histories shorter than the window leave the
/// state unchanged.
pub fn sb_step<H: AsRef<[f64]>>(state: SbState, histories: &[H]) -> SbState {
    let w = state.config.window;
    if histories.iter().any(|h| h.as_ref().len() < w) {
        return state;
    }
    let (mean, sd) = window_stats(histories[state.tracked].as_ref(), w);
    let limit = mean + state.config.delta.max(state.config.z * sd);
    let mut best: Option<(usize, f64)> = None;
    for (i, h) in histories.iter().enumerate() {
        if i == state.tracked {
            continue;
        }
        let (m, _) = window_stats(h.as_ref(), w);
        if m > limit && best.is_none_or(|(_, bm)| m > bm) {
            best = Some((i, m));
        }
    }
    match best {
        Some((i, _)) => SbState { tracked: i, ..state },
        None => state,
    }
}

/// Replays the switching rule over complete wealth histories. Entry `t - 1`
/// is the tracked index decided after observing period `t`.
pub fn sb_replay<H: AsRef<[f64]>>(config: SbConfig, histories: &[H]) -> Result<Vec<usize>> {
    let mut state = SbState::new(config)?;
    let n = histories.iter().map(|h| h.as_ref().len()).min().unwrap_or(0);
    let mut out = Vec::with_capacity(n);
    for t in 1..=n {
        let prefix: Vec<&[f64]> = histories.iter().map(|h| &h.as_ref()[..t]).collect();
        state = sb_step(state, &prefix);
        out.push(state.tracked);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopKState {
    pub k: usize,
    pub grid: Vec<f64>,
    pub current_kappa: f64,
}

impl TopKState {
    /// Starts at the geometric mean of the grid.
    pub fn new(k: usize, grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config("radius grid must be non-empty and positive".into()));
        }
        if k == 0 || k > grid.len() {
            return Err(Error::Config(format!("top-k needs 1 <= k <= {}, got {k}", grid.len())));
        }
        let current_kappa = geometric_mean(grid.iter().copied());
        Ok(Self {
            k,
            grid,
            current_kappa,
        })
    }
}

/// Sets the radius to the geometric mean over the `k` wealthiest experts.
/// `wealth[i]` belongs to `grid[i]`.
pub fn topk_step(state: TopKState, wealth: &[f64]) -> TopKState {
    assert_eq!(wealth.len(), state.grid.len(), "one wealth value per grid point");
    let order = ranked(wealth);
    let kappa = geometric_mean(order[..state.k].iter().map(|&i| state.grid[i]));
    TopKState {
        current_kappa: kappa,
        ..state
    }
}

/// The comparison schemes for choosing the radius online.
///
/// Letters follow the usual listing: `a`-`c` top-5/3/1 radius averaging, `d`
/// half best and half previous, `e`/`f` switching with `delta` 0 and 0.2, `g`
/// follow the wealthiest expert, `h` plain and `i` wealth-weighted average of
/// the five wealthiest portfolios, `j` average of all portfolios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SchemeKind {
    TopK(usize),
    HalfBestPrev,
    Sb { delta: f64 },
    Best,
    TopAverage(usize),
    TopWealthWeighted(usize),
    AverageAll,
}

impl SchemeKind {
    pub const LETTERS: [(char, SchemeKind); 10] = [
        ('a', SchemeKind::TopK(5)),
        ('b', SchemeKind::TopK(3)),
        ('c', SchemeKind::TopK(1)),
        ('d', SchemeKind::HalfBestPrev),
        ('e', SchemeKind::Sb { delta: 0.0 }),
        ('f', SchemeKind::Sb { delta: 0.2 }),
        ('g', SchemeKind::Best),
        ('h', SchemeKind::TopAverage(5)),
        ('i', SchemeKind::TopWealthWeighted(5)),
        ('j', SchemeKind::AverageAll),
    ];

    /// True for schemes that retune the radius of a single host strategy.
    pub fn updates_kappa(&self) -> bool {
        matches!(self, SchemeKind::TopK(_) | SchemeKind::HalfBestPrev)
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SchemeKind::TopK(k) => write!(f, "top-k:{k}"),
            SchemeKind::HalfBestPrev => write!(f, "half-best-prev"),
            SchemeKind::Sb { delta } => write!(f, "sb:{delta}"),
            SchemeKind::Best => write!(f, "best"),
            SchemeKind::TopAverage(k) => write!(f, "top-average:{k}"),
            SchemeKind::TopWealthWeighted(k) => write!(f, "top-weighted:{k}"),
            SchemeKind::AverageAll => write!(f, "average-all"),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    /// Accepts a letter `a`-`j` or a name such as `top-k:5`, `sb:0.2`,
    /// `best`, `top-average:5`, `top-weighted:5`, `average-all`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let [c] = s.as_bytes() {
            if let Some((_, k)) = Self::LETTERS.iter().find(|(l, _)| *l as u8 == *c) {
                return Ok(*k);
            }
        }
        let bad = || Error::Config(format!("unknown scheme '{s}'"));
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.as_str(), None),
        };
        let count = |default: usize| -> Result<usize> {
            arg.map_or(Ok(default), |a| a.parse().map_err(|_| bad()))
        };
        Ok(match name {
            "top-k" => SchemeKind::TopK(count(5)?),
            "half-best-prev" => SchemeKind::HalfBestPrev,
            "sb" => SchemeKind::Sb {
                delta: arg.map_or(Ok(0.0), |a| a.parse().map_err(|_| bad()))?,
            },
            "best" => SchemeKind::Best,
            "top-average" => SchemeKind::TopAverage(count(5)?),
            "top-weighted" => SchemeKind::TopWealthWeighted(count(5)?),
            "average-all" => SchemeKind::AverageAll,
            _ => return Err(bad()),
        })
    }
}

/// Follows one expert of a pool, switching with [`sb_step`].
pub struct Selector {
    label: String,
    pool: ExpertPool,
    sb: SbState,
    switched: bool,
}

impl Selector {
    pub fn new(label: impl Into<String>, pool: ExpertPool, config: SbConfig) -> Result<Self> {
        Ok(Self {
            label: label.into(),
            pool,
            sb: SbState::new(config)?,
            switched: false,
        })
    }

    pub fn tracked(&self) -> usize {
        self.sb.tracked
    }

    /// Whether the last step changed the tracked expert.
    pub fn switched(&self) -> bool {
        self.switched
    }

    pub fn pool(&self) -> &ExpertPool {
        &self.pool
    }
}

impl Strategy for Selector {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        self.pool.step(ctx)?;
        if ctx.is_first() {
            self.sb.tracked = 0;
        }
        let before = self.sb.tracked;
        self.sb = sb_step(self.sb, &self.pool.histories());
        self.switched = self.sb.tracked != before;
        Ok(self.pool.proposal(self.sb.tracked).clone())
    }

    fn current_kappa(&self) -> Option<f64> {
        self.pool.expert(self.sb.tracked).current_kappa()
    }
}

/// Blends the portfolios of a pool by wealth.
pub struct Combo {
    label: String,
    pool: ExpertPool,
    kind: SchemeKind,
}

impl Combo {
    pub fn new(label: impl Into<String>, pool: ExpertPool, kind: SchemeKind) -> Result<Self> {
        match kind {
            SchemeKind::Best | SchemeKind::AverageAll => {}
            SchemeKind::TopAverage(k) | SchemeKind::TopWealthWeighted(k) if k >= 1 => {}
            _ => return Err(Error::Config(format!("{kind} does not combine portfolios"))),
        }
        Ok(Self {
            label: label.into(),
            pool,
            kind,
        })
    }

    /// Weight of each expert's portfolio given current wealth.
    pub fn weights(kind: SchemeKind, wealth: &[f64]) -> Vec<f64> {
        let n = wealth.len();
        let order = ranked(wealth);
        let mut w = vec![0.0; n];
        match kind {
            SchemeKind::Best => w[order[0]] = 1.0,
            SchemeKind::TopAverage(k) => {
                for &i in &order[..k.min(n)] {
                    w[i] = 1.0;
                }
            }
            SchemeKind::TopWealthWeighted(k) => {
                for &i in &order[..k.min(n)] {
                    w[i] = wealth[i];
                }
            }
            _ => w.fill(1.0),
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        w
    }

    /// Weighted average of portfolios.
    pub fn blend(weights: &[f64], portfolios: &[&[f64]]) -> Result<Portfolio> {
        let m = portfolios[0].len();
        let mut out = vec![0.0; m];
        for (w, p) in weights.iter().zip(portfolios) {
            if *w > 0.0 {
                for (o, v) in out.iter_mut().zip(p.iter()) {
                    *o += w * v;
                }
            }
        }
        Portfolio::normalized(out)
    }
}

impl Strategy for Combo {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        self.pool.step(ctx)?;
        let weights = Self::weights(self.kind, &self.pool.latest_wealth());
        let proposals: Vec<&[f64]> = (0..self.pool.len())
            .map(|i| self.pool.proposal(i).weights())
            .collect();
        Self::blend(&weights, &proposals)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum KappaRule {
    TopK(usize),
    HalfBestPrev,
}

/// A robust strategy whose radius is reset every period from the wealth of
/// a pool of fixed-radius experts sharing its other parameters.
pub struct KappaUpdate {
    label: String,
    host: RelpFixed,
    pool: ExpertPool,
    rule: KappaRule,
    grid: Vec<f64>,
    initial: f64,
}

impl KappaUpdate {
    /// `kind` must be a radius-updating scheme. A top-k count above the grid
    /// size is clamped to it.
    pub fn new(kind: SchemeKind, base: RelpParams, grid: &[f64], parallel: bool) -> Result<Self> {
        let rule = match kind {
            SchemeKind::TopK(k) => KappaRule::TopK(k.min(grid.len())),
            SchemeKind::HalfBestPrev => KappaRule::HalfBestPrev,
            _ => return Err(Error::Config(format!("{kind} does not update the radius"))),
        };
        if let KappaRule::TopK(0) = rule {
            return Err(Error::Config("top-k needs k >= 1".into()));
        }
        let initial = TopKState::new(1, grid.to_vec())?.current_kappa;
        let pool = kappa_pool(base, grid)?.with_parallel(parallel);
        let mut host = RelpFixed::new(base)?;
        host.set_kappa(initial);
        Ok(Self {
            label: format!("relp[{kind}](lambda={})", base.lambda),
            host,
            pool,
            rule,
            grid: grid.to_vec(),
            initial,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.host.params().kappa
    }

    fn next_kappa(&self, prev: f64, wealth: &[f64]) -> f64 {
        match self.rule {
            KappaRule::TopK(k) => {
                let state = TopKState {
                    k,
                    grid: self.grid.clone(),
                    current_kappa: prev,
                };
                topk_step(state, wealth).current_kappa
            }
            KappaRule::HalfBestPrev => 0.5 * self.grid[ranked(wealth)[0]] + 0.5 * prev,
        }
    }
}

impl Strategy for KappaUpdate {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        self.pool.step(ctx)?;
        let kappa = if ctx.is_first() {
            self.initial
        } else {
            self.next_kappa(self.kappa(), &self.pool.latest_wealth())
        };
        self.host.set_kappa(kappa);
        self.host.next_portfolio(ctx)
    }

    fn current_kappa(&self) -> Option<f64> {
        Some(self.kappa())
    }
}

/// Fixed-radius experts over `grid`, tagged with their radius.
pub fn kappa_pool(base: RelpParams, grid: &[f64]) -> Result<ExpertPool> {
    let experts = grid
        .iter()
        .map(|&kappa| {
            let s = RelpFixed::new(RelpParams { kappa, ..base })?;
            Ok((kappa, Box::new(s) as Box<dyn Strategy>))
        })
        .collect::<Result<Vec<_>>>()?;
    ExpertPool::new(experts)
}

/// Builds the strategy that chooses the radius over `grid` with `kind`,
/// holding the remaining parameters at `base`.
pub fn scheme_combinator(
    kind: SchemeKind,
    base: RelpParams,
    grid: &[f64],
    sb: SbConfig,
    parallel: bool,
) -> Result<Box<dyn Strategy>> {
    let label = format!("relp[{kind}](lambda={})", base.lambda);
    Ok(match kind {
        SchemeKind::TopK(_) | SchemeKind::HalfBestPrev => {
            Box::new(KappaUpdate::new(kind, base, grid, parallel)?)
        }
        SchemeKind::Sb { delta } => {
            let pool = kappa_pool(base, grid)?.with_parallel(parallel);
            Box::new(Selector::new(label, pool, SbConfig { delta, ..sb })?)
        }
        _ => {
            let pool = kappa_pool(base, grid)?.with_parallel(parallel);
            Box::new(Combo::new(label, pool, kind)?)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdapVariant {
    /// Switching over radii inside each penalty expert.
    Adap1,
    /// Top-5 radius averaging inside each penalty expert.
    Adap2,
}

impl AdapVariant {
    pub fn inner(self) -> SchemeKind {
        match self {
            AdapVariant::Adap1 => SchemeKind::Sb { delta: 0.0 },
            AdapVariant::Adap2 => SchemeKind::TopK(5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AdapVariant::Adap1 => "relp-adap-1",
            AdapVariant::Adap2 => "relp-adap-2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub name: String,
    /// How each penalty expert picks its radius.
    pub inner: SchemeKind,
    pub kappa_grid: Vec<f64>,
    /// Penalties are `multiplier * gamma`.
    pub lambda_multipliers: Vec<f64>,
    pub gamma: f64,
    pub window: usize,
    /// Outer switching rule; the inner one reuses it with its own `delta`.
    pub sb: SbConfig,
    pub parallel: bool,
}

impl AdaptiveConfig {
    /// 31 radii on `[0.1, 10]` and 31 penalty multipliers on `[1, 100]`,
    /// both log-spaced, with the default switching rule.
    pub fn new(variant: AdapVariant, gamma: f64) -> Result<Self> {
        Ok(Self {
            name: variant.name().into(),
            inner: variant.inner(),
            kappa_grid: log_grid(0.1, 10.0, 31)?,
            lambda_multipliers: log_grid(1.0, 100.0, 31)?,
            gamma,
            window: RelpParams::DEFAULT_WINDOW,
            sb: SbConfig::default(),
            parallel: true,
        })
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.lambda_multipliers.iter().map(|m| m * self.gamma).collect()
    }
}

/// One period of an adaptive run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: usize,
    pub tracked_lambda: f64,
    pub current_kappa: Option<f64>,
    pub switched: bool,
}

/// Two-level adaptive robust strategy.
pub struct RelpAdap {
    outer: Selector,
    trace: Vec<TraceRow>,
}

impl RelpAdap {
    pub fn new(cfg: &AdaptiveConfig) -> Result<Self> {
        if cfg.kappa_grid.is_empty() || cfg.lambda_multipliers.is_empty() {
            return Err(Error::Config("adaptive grids must be non-empty".into()));
        }
        let experts = cfg
            .lambdas()
            .into_iter()
            .map(|lambda| {
                let base = RelpParams::new(cfg.kappa_grid[0], lambda, cfg.gamma)?
                    .with_window(cfg.window)?;
                let s = scheme_combinator(cfg.inner, base, &cfg.kappa_grid, cfg.sb, cfg.parallel)?;
                Ok((lambda, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let pool = ExpertPool::new(experts)?.with_parallel(cfg.parallel);
        Ok(Self {
            outer: Selector::new(cfg.name.clone(), pool, cfg.sb)?,
            trace: Vec::new(),
        })
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn tracked_lambda(&self) -> f64 {
        self.outer.pool().tag(self.outer.tracked())
    }

    pub fn write_trace_to<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["t", "tracked_lambda", "current_kappa", "switch_flag"])?;
        for r in &self.trace {
            wtr.write_record([
                r.t.to_string(),
                r.tracked_lambda.to_string(),
                crate::metrics::csv_cell(r.current_kappa),
                u8::from(r.switched).to_string(),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<trace>", e))?;
        Ok(())
    }

    pub fn write_trace(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_trace_to(std::io::BufWriter::new(file))
    }
}

impl Strategy for RelpAdap {
    fn name(&self) -> String {
        self.outer.name()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        if ctx.is_first() {
            self.trace.clear();
        }
        let b = self.outer.next_portfolio(ctx)?;
        self.trace.push(TraceRow {
            t: ctx.t,
            tracked_lambda: self.tracked_lambda(),
            current_kappa: self.outer.current_kappa(),
            switched: self.outer.switched(),
        });
        Ok(b)
    }

    fn current_kappa(&self) -> Option<f64> {
        self.outer.current_kappa()
    }
}

/// Convenience constructor for the two standard variants.
pub fn relp_adap(variant: AdapVariant, gamma: f64) -> Result<RelpAdap> {
    RelpAdap::new(&AdaptiveConfig::new(variant, gamma)?)
}
