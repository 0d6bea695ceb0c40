//! Transaction-cost-aware online portfolio selection.
//!
//! The crate provides a backtest engine that charges proportional costs
//! through the net-proportion equation, baseline strategies, a robust
//! ellipsoidal-uncertainty strategy solved as a small cone program each
//! period, adaptive expert schemes that pick its parameters online, and
//! performance metrics.

// Index loops mirror the linear algebra; `!(x > 0.0)` is deliberate NaN rejection.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod market_data;
pub mod portfolio;
pub mod transaction_cost;
pub mod predictors;
pub mod conic;
pub mod framework;
pub mod strategies;
pub mod metrics;
pub mod adaptive;
pub mod cli;

pub use error::{Error, Result};
pub use framework::{run_backtest, BacktestResult, BacktestState, StepContext, Strategy, TradeLog, TradeRecord};
pub use metrics::{MetricReport, WealthSeries};
pub use market_data::{History, InputFormat, RelativesMatrix};
pub use portfolio::Portfolio;
pub use transaction_cost::{net_proportion, CostSpec, NetProportion};
