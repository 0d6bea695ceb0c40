//! Performance statistics of wealth paths.
//!
//! Statistics that are undefined for a given path (zero variance, zero
//! drawdown) are `None`; they serialize as `null` in JSON and `NA` in CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::TradeLog;
use crate::portfolio::l1_distance;

pub const DEFAULT_PERIODS_PER_YEAR: f64 = 252.0;
pub const DEFAULT_RISK_FREE: f64 = 0.04;

/// A wealth path `S_0, S_1, ..., S_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WealthSeries {
    values: Vec<f64>,
    periods_per_year: f64,
}

impl WealthSeries {
    /// Uses `values` as the full path, first entry included.
    pub fn from_path(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("wealth path is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Config(format!("wealth must be positive, found {v}")));
        }
        Ok(Self {
            values,
            periods_per_year: DEFAULT_PERIODS_PER_YEAR,
        })
    }

    /// Prefixes the initial wealth of 1 to `S_1, ..., S_n`.
    pub fn from_growth(path: Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(path.len() + 1);
        values.push(1.0);
        values.extend(path);
        Self::from_path(values)
    }

    pub fn with_periods_per_year(mut self, ppy: f64) -> Result<Self> {
        if !(ppy.is_finite() && ppy > 0.0) {
            return Err(Error::Config(format!("periods per year must be positive, got {ppy}")));
        }
        self.periods_per_year = ppy;
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn periods_per_year(&self) -> f64 {
        self.periods_per_year
    }

    /// Number of periods (returns) in the path.
    pub fn periods(&self) -> usize {
        self.values.len() - 1
    }

    /// Per-period simple returns `S_t / S_{t-1} - 1`.
    pub fn returns(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] / w[0] - 1.0).collect()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation; `None` with fewer than two points.
fn std_dev(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let mu = mean(v);
    let ss: f64 = v.iter().map(|x| (x - mu) * (x - mu)).sum();
    Some((ss / (v.len() - 1) as f64).sqrt())
}

/// `mean / std`, undefined for zero or missing spread.
fn ratio(v: &[f64]) -> Option<f64> {
    let sd = std_dev(v)?;
    // Spreads at round-off level of the mean count as zero.
    if !(sd > 1e-14 * (1.0 + mean(v).abs())) {
        return None;
    }
    Some(mean(v) / sd)
}

pub fn cumulative_wealth(ws: &WealthSeries) -> f64 {
    *ws.values.last().expect("non-empty by construction")
}

pub fn max_drawdown(ws: &WealthSeries) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for &s in &ws.values {
        peak = peak.max(s);
        worst = worst.max((peak - s) / peak);
    }
    worst
}

/// Mean excess return over its standard deviation, per period.
pub fn sharpe_daily(ws: &WealthSeries, rf_annual: f64) -> Option<f64> {
    let rf = rf_annual / ws.periods_per_year;
    let excess: Vec<f64> = ws.returns().iter().map(|r| r - rf).collect();
    ratio(&excess)
}

/// Annualized growth over maximum drawdown.
pub fn calmar(ws: &WealthSeries) -> Option<f64> {
    let mdd = max_drawdown(ws);
    let n = ws.periods();
    if mdd == 0.0 || n == 0 {
        return None;
    }
    let growth = cumulative_wealth(ws) / ws.values[0];
    Some((growth.powf(ws.periods_per_year / n as f64) - 1.0) / mdd)
}

fn paired_returns(ws: &WealthSeries, market: &WealthSeries) -> Result<(Vec<f64>, Vec<f64>)> {
    if ws.periods() != market.periods() {
        return Err(Error::Config(format!(
            "strategy has {} periods, market has {}",
            ws.periods(),
            market.periods()
        )));
    }
    Ok((ws.returns(), market.returns()))
}

/// Mean excess return over the market.
pub fn mer(ws: &WealthSeries, market: &WealthSeries) -> Result<Option<f64>> {
    let (r, q) = paired_returns(ws, market)?;
    if r.is_empty() {
        return Ok(None);
    }
    Ok(Some(mean(&r) - mean(&q)))
}

/// Mean over standard deviation of the excess return over the market.
pub fn information_ratio(ws: &WealthSeries, market: &WealthSeries) -> Result<Option<f64>> {
    let (r, q) = paired_returns(ws, market)?;
    let d: Vec<f64> = r.iter().zip(&q).map(|(a, b)| a - b).collect();
    Ok(ratio(&d))
}

/// Linear-interpolation quantile (`p` in `[0, 1]`) of unsorted data.
pub fn quantile(data: &[f64], p: f64) -> Option<f64> {
    if data.is_empty() {
        return None;
    }
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

/// 95th percentile of per-period losses `-r_t`.
pub fn var95(ws: &WealthSeries) -> Option<f64> {
    let losses: Vec<f64> = ws.returns().iter().map(|r| -r).collect();
    quantile(&losses, 0.95)
}

/// `(1 / 2n) sum_t ||b_hat_{t-1} - w_{t-1} b_t||_1`, entry purchase included.
pub fn average_turnover(log: &TradeLog) -> f64 {
    if log.is_empty() {
        return 0.0;
    }
    let total: f64 = log
        .records
        .iter()
        .map(|r| {
            let scaled: Vec<f64> = r.b.iter().map(|b| r.w * b).collect();
            l1_distance(&r.b_hat_before, &scaled)
        })
        .sum();
    total / (2.0 * log.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    HigherIsBetter,
    LowerIsBetter,
}

/// Rescales statistics to `[0, 1]`: 1 for the best, 0 for the worst. When
/// all values tie, every entry is 1.
pub fn relative_ranking(stats: &[f64], direction: Direction) -> Vec<f64> {
    let max = stats.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = stats.iter().copied().fold(f64::INFINITY, f64::min);
    let (best, worst) = match direction {
        Direction::HigherIsBetter => (max, min),
        Direction::LowerIsBetter => (min, max),
    };
    if best == worst {
        return vec![1.0; stats.len()];
    }
    // Adding 0.0 turns the -0.0 from a negative span into 0.0.
    stats.iter().map(|s| (s - worst) / (best - worst) + 0.0).collect()
}

/// Ranking over optional statistics; undefined entries stay undefined.
pub fn relative_ranking_partial(stats: &[Option<f64>], direction: Direction) -> Vec<Option<f64>> {
    let defined: Vec<f64> = stats.iter().flatten().copied().collect();
    let ranks = relative_ranking(&defined, direction);
    let mut it = ranks.into_iter();
    stats
        .iter()
        .map(|s| s.map(|_| it.next().expect("one rank per defined value")))
        .collect()
}

/// The full set of statistics for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub cumulative_wealth: f64,
    pub mer: Option<f64>,
    pub sharpe_daily: Option<f64>,
    pub calmar: Option<f64>,
    pub information_ratio: Option<f64>,
    pub max_drawdown: f64,
    pub var95: Option<f64>,
    pub average_turnover: f64,
}

impl MetricReport {
    /// Metric names in column order, with their preferred direction.
    pub const COLUMNS: [(&'static str, Direction); 8] = [
        ("cumulative_wealth", Direction::HigherIsBetter),
        ("mer", Direction::HigherIsBetter),
        ("sharpe_daily", Direction::HigherIsBetter),
        ("calmar", Direction::HigherIsBetter),
        ("information_ratio", Direction::HigherIsBetter),
        ("max_drawdown", Direction::LowerIsBetter),
        ("var95", Direction::LowerIsBetter),
        ("average_turnover", Direction::LowerIsBetter),
    ];

    /// `market` is the benchmark for the excess-return statistics.
    pub fn compute(ws: &WealthSeries, market: &WealthSeries, log: &TradeLog) -> Result<Self> {
        Ok(Self {
            cumulative_wealth: cumulative_wealth(ws),
            mer: mer(ws, market)?,
            sharpe_daily: sharpe_daily(ws, DEFAULT_RISK_FREE),
            calmar: calmar(ws),
            information_ratio: information_ratio(ws, market)?,
            max_drawdown: max_drawdown(ws),
            var95: var95(ws),
            average_turnover: average_turnover(log),
        })
    }

    /// Values in [`Self::COLUMNS`] order.
    pub fn values(&self) -> [Option<f64>; 8] {
        [
            Some(self.cumulative_wealth),
            self.mer,
            self.sharpe_daily,
            self.calmar,
            self.information_ratio,
            Some(self.max_drawdown),
            self.var95,
            Some(self.average_turnover),
        ]
    }

    pub fn get(&self, name: &str) -> Option<Option<f64>> {
        Self::COLUMNS
            .iter()
            .position(|(n, _)| *n == name)
            .map(|i| self.values()[i])
    }

    pub fn write_json(&self, out: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }
}

/// Formats an optional statistic for CSV output.
pub fn csv_cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => x.to_string(),
        _ => "NA".into(),
    }
}
