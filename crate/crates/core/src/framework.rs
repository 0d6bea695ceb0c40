//! The period-by-period investment loop with transaction-cost accounting.
//!
//! Each period `t` a strategy sees the relatives of periods `1..t` (exclusive)
//! and its current holdings, proposes a portfolio `b_t`, pays for the
//! rebalance through the net proportion `w`, and then the period's relatives
//! move wealth and holdings:
//!
//! ```text
//! S_t = S_{t-1} * w * (b_t . x_t)
//! b_hat_t = b_t * x_t / (b_t . x_t)
//! ```

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market_data::{History, RelativesMatrix};
use crate::metrics::WealthSeries;
use crate::portfolio::{Portfolio, SIMPLEX_TOL};
use crate::transaction_cost::{net_proportion, CostSpec};

/// What a strategy may look at when choosing the portfolio for period `t`.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    /// One-based period about to be traded.
    pub t: usize,
    /// Relatives of periods `1..t`, exclusive of `t`.
    pub history: History<'a>,
    /// Holdings at the end of the previous period; all zeros before the
    /// first purchase.
    pub b_hat: &'a [f64],
    pub cost: CostSpec,
}

impl StepContext<'_> {
    pub fn assets(&self) -> usize {
        self.b_hat.len()
    }

    /// True before anything has been bought.
    pub fn is_first(&self) -> bool {
        self.t == 1
    }
}

/// An online portfolio selection rule.
///
/// Implementations must be deterministic: the same sequence of contexts
/// yields the same portfolios.
pub trait Strategy: Send {
    fn name(&self) -> String;

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio>;

    /// The uncertainty radius in effect for the last proposed portfolio, for
    /// strategies that have one.
    fn current_kappa(&self) -> Option<f64> {
        None
    }
}

impl<S: Strategy + ?Sized> Strategy for Box<S> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        (**self).next_portfolio(ctx)
    }

    fn current_kappa(&self) -> Option<f64> {
        (**self).current_kappa()
    }
}

/// One period of the investment loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeRecord {
    pub t: usize,
    /// Net proportion paid to move from the previous holdings to `b`.
    pub w: f64,
    /// Wealth after the period's relatives.
    pub wealth: f64,
    /// Gross period return `b . x_t`.
    pub gross: f64,
    /// Portfolio chosen for the period.
    pub b: Vec<f64>,
    /// Holdings before the trade (zeros at `t = 1`).
    pub b_hat_before: Vec<f64>,
    /// Holdings after the period's relatives.
    pub b_hat_after: Vec<f64>,
}

/// Wealth and holdings of one investor.
#[derive(Debug, Clone, PartialEq)]
pub struct BacktestState {
    b_hat: Vec<f64>,
    wealth: f64,
    t: usize,
    cost: CostSpec,
    pending: Option<(Portfolio, f64)>,
}

impl BacktestState {
    pub fn new(assets: usize, cost: CostSpec) -> Self {
        Self {
            b_hat: vec![0.0; assets],
            wealth: 1.0,
            t: 0,
            cost,
            pending: None,
        }
    }

    pub fn b_hat(&self) -> &[f64] {
        &self.b_hat
    }

    pub fn wealth(&self) -> f64 {
        self.wealth
    }

    /// Number of completed periods.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn cost(&self) -> CostSpec {
        self.cost
    }

    /// Context for choosing the next portfolio over the given history.
    pub fn context<'a>(&'a self, history: History<'a>) -> StepContext<'a> {
        StepContext {
            t: self.t + 1,
            history,
            b_hat: &self.b_hat,
            cost: self.cost,
        }
    }

    /// The portfolio committed for the coming period, if any.
    pub fn pending(&self) -> Option<&Portfolio> {
        self.pending.as_ref().map(|(b, _)| b)
    }

    /// Commits `b` for the coming period and returns the net proportion.
    pub fn rebalance(&mut self, b: Portfolio) -> Result<f64> {
        if b.len() != self.b_hat.len() {
            return Err(Error::Contract(format!(
                "portfolio has {} weights for {} assets",
                b.len(),
                self.b_hat.len()
            )));
        }
        let sum: f64 = b.weights().iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL || b.weights().iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Contract(format!("portfolio off the simplex (sum {sum})")));
        }
        let w = net_proportion(&self.b_hat, b.weights(), self.cost)?.value();
        self.pending = Some((b, w));
        Ok(w)
    }

    /// Applies the period's relatives to the committed portfolio.
    pub fn observe(&mut self, x: &[f64]) -> Result<TradeRecord> {
        let (b, w) = self
            .pending
            .take()
            .ok_or_else(|| Error::Contract("observe called without a committed portfolio".into()))?;
        let (held, gross) = b.drift(x);
        self.wealth *= w * gross;
        self.t += 1;
        let before = std::mem::replace(&mut self.b_hat, held);
        Ok(TradeRecord {
            t: self.t,
            w,
            wealth: self.wealth,
            gross,
            b: b.into_inner(),
            b_hat_before: before,
            b_hat_after: self.b_hat.clone(),
        })
    }

    /// Asks `strategy` for the next portfolio and commits it.
    pub fn propose<S: Strategy + ?Sized>(
        &mut self,
        strategy: &mut S,
        history: History<'_>,
    ) -> Result<f64> {
        let b = strategy.next_portfolio(&self.context(history))?;
        self.rebalance(b)
    }
}

/// Per-period records of a backtest.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TradeLog {
    pub records: Vec<TradeRecord>,
}

impl TradeLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// CSV with columns `t, w, S` followed by one weight column per asset.
    pub fn write_csv_to<W: Write>(&self, out: W, asset_names: &[String]) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string(), "w".into(), "S".into()];
        header.extend(asset_names.iter().map(|n| format!("b_{n}")));
        wtr.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.t.to_string(), r.w.to_string(), r.wealth.to_string()];
            row.extend(r.b.iter().map(f64::to_string));
            wtr.write_record(&row)?;
        }
        wtr.flush().map_err(|e| Error::io("<trade log>", e))?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, asset_names: &[String]) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(std::io::BufWriter::new(file), asset_names)
    }
}

#[derive(Debug, Clone)]
pub struct BacktestResult {
    pub strategy: String,
    pub wealth: WealthSeries,
    pub trades: TradeLog,
}

/// Runs `strategy` over every period of `relatives`.
pub fn run_backtest<S: Strategy + ?Sized>(
    relatives: &RelativesMatrix,
    strategy: &mut S,
    cost: CostSpec,
) -> Result<BacktestResult> {
    let mut state = BacktestState::new(relatives.assets(), cost);
    let mut records = Vec::with_capacity(relatives.periods());
    for t in 1..=relatives.periods() {
        state.propose(strategy, relatives.history(t - 1))?;
        records.push(state.observe(relatives.row(t - 1))?);
    }
    let path = records.iter().map(|r| r.wealth).collect();
    Ok(BacktestResult {
        strategy: strategy.name(),
        wealth: WealthSeries::from_growth(path)?,
        trades: TradeLog { records },
    })
}
