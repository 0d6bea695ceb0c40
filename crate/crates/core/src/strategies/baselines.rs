//! Reference strategies: buy-and-hold, constant rebalancing, exponential
//! gradient and moving-average reversion.

use crate::error::{Error, Result};
use crate::framework::{StepContext, Strategy};
use crate::portfolio::{project_simplex, Portfolio};
use crate::predictors::mar_predictor;

/// Uniform buy-and-hold: buys `1/m` once and never trades again.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ubah;

impl Strategy for Ubah {
    fn name(&self) -> String {
        "ubah".into()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        if ctx.is_first() {
            Ok(Portfolio::uniform(ctx.assets()))
        } else {
            Portfolio::normalized(ctx.b_hat.to_vec())
        }
    }
}

/// Uniform constant rebalanced portfolio.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ucrp;

impl Strategy for Ucrp {
    fn name(&self) -> String {
        "ucrp".into()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        Ok(Portfolio::uniform(ctx.assets()))
    }
}

/// One exponential-gradient step:
/// `b'_i ∝ b_i exp(eta x_i / (b . x))`.
pub fn eg_update(b: &[f64], x: &[f64], eta: f64) -> Result<Portfolio> {
    let gross: f64 = b.iter().zip(x).map(|(b, x)| b * x).sum();
    let raw: Vec<f64> = b
        .iter()
        .zip(x)
        .map(|(b, x)| b * (eta * x / gross).exp())
        .collect();
    Portfolio::normalized(raw)
}

/// Exponential gradient with learning rate `eta`.
#[derive(Debug, Clone)]
pub struct Eg {
    eta: f64,
    last: Option<Portfolio>,
}

impl Eg {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::Config(format!("eg learning rate must be positive, got {eta}")));
        }
        Ok(Self { eta, last: None })
    }
}

impl Default for Eg {
    fn default() -> Self {
        Self {
            eta: 0.05,
            last: None,
        }
    }
}

impl Strategy for Eg {
    fn name(&self) -> String {
        "eg".into()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        let next = match (&self.last, ctx.history.last()) {
            (Some(b), Some(x)) => eg_update(b.weights(), x, self.eta)?,
            _ => Portfolio::uniform(ctx.assets()),
        };
        self.last = Some(next.clone());
        Ok(next)
    }
}

/// One passive-aggressive step of moving-average reversion towards the
/// predicted relatives `x_tilde`, followed by projection onto the simplex.
pub fn olmar_update(b: &[f64], x_tilde: &[f64], eps: f64) -> Portfolio {
    let m = x_tilde.len() as f64;
    let mean = x_tilde.iter().sum::<f64>() / m;
    let dir: Vec<f64> = x_tilde.iter().map(|x| x - mean).collect();
    let denom: f64 = dir.iter().map(|d| d * d).sum();
    let predicted: f64 = b.iter().zip(x_tilde).map(|(b, x)| b * x).sum();
    let step = if denom > 0.0 {
        ((eps - predicted) / denom).max(0.0)
    } else {
        0.0
    };
    if step == 0.0 {
        return Portfolio::normalized(b.to_vec()).expect("previous portfolio is on the simplex");
    }
    let moved: Vec<f64> = b.iter().zip(&dir).map(|(b, d)| b + step * d).collect();
    Portfolio::normalized(project_simplex(&moved)).expect("projection lands on the simplex")
}

/// Online moving-average reversion.
///
/// Until `window` prices are available the predictor uses every price seen
/// so far.
#[derive(Debug, Clone)]
pub struct Olmar {
    eps: f64,
    window: usize,
    last: Option<Portfolio>,
}

impl Olmar {
    pub fn new(eps: f64, window: usize) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) || window == 0 {
            return Err(Error::Config(format!(
                "olmar needs eps > 0 and window >= 1, got {eps} and {window}"
            )));
        }
        Ok(Self {
            eps,
            window,
            last: None,
        })
    }
}

impl Default for Olmar {
    fn default() -> Self {
        Self {
            eps: 10.0,
            window: 5,
            last: None,
        }
    }
}

impl Strategy for Olmar {
    fn name(&self) -> String {
        "olmar".into()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        let next = match &self.last {
            Some(b) if !ctx.history.is_empty() => {
                let window = self.window.min(ctx.history.len() + 1);
                let x_tilde = mar_predictor(&ctx.history, window)?;
                olmar_update(b.weights(), x_tilde.values(), self.eps)
            }
            _ => Portfolio::uniform(ctx.assets()),
        };
        self.last = Some(next.clone());
        Ok(next)
    }
}
