//! The robust ellipsoidal-uncertainty strategy with fixed parameters.

use serde::{Deserialize, Serialize};

use crate::conic::{check_condition, solve_relp_socp, RelpProblem};
use crate::error::{Error, Result};
use crate::framework::{StepContext, Strategy};
use crate::portfolio::Portfolio;
use crate::predictors::{mar_predictor, shape_factor};

/// Parameters of one robust expert.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelpParams {
    /// Radius of the uncertainty ellipsoid.
    pub kappa: f64,
    /// Penalty on `||b_hat - b||_1`.
    pub lambda: f64,
    /// Cost rate assumed inside the model.
    pub gamma: f64,
    /// Price window of the moving-average predictor.
    pub window: usize,
}

impl RelpParams {
    pub const DEFAULT_WINDOW: usize = 5;

    pub fn new(kappa: f64, lambda: f64, gamma: f64) -> Result<Self> {
        let p = Self {
            kappa,
            lambda,
            gamma,
            window: Self::DEFAULT_WINDOW,
        };
        p.validate()?;
        Ok(p)
    }

    /// `lambda = 10 gamma` and `kappa = 1`.
    pub fn default_for(gamma: f64) -> Result<Self> {
        Self::new(1.0, 10.0 * gamma, gamma)
    }

    pub fn with_window(mut self, window: usize) -> Result<Self> {
        self.window = window;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(self.kappa) && ok(self.lambda) && ok(self.gamma) && self.gamma < 1.0) {
            return Err(Error::Config(format!("invalid robust parameters {self:?}")));
        }
        if self.window == 0 {
            return Err(Error::Config("predictor window must be at least 1".into()));
        }
        Ok(())
    }
}

/// Why the last portfolio was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// First period, uniform purchase.
    Initial,
    /// Not enough history for the covariance; holdings kept.
    WarmUp,
    /// Covariance could not be factored; holdings kept.
    InsufficientData,
    /// The model's optimum is the current holdings; kept without solving.
    ConditionFailed,
    Solved,
    /// The cone program failed; holdings kept.
    SolverFailed,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RelpStats {
    pub solved: usize,
    pub held: usize,
    pub solver_failures: usize,
}

#[derive(Debug, Clone)]
pub struct RelpFixed {
    params: RelpParams,
    last: Option<Decision>,
    stats: RelpStats,
}

impl RelpFixed {
    pub fn new(params: RelpParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            last: None,
            stats: RelpStats::default(),
        })
    }

    pub fn params(&self) -> RelpParams {
        self.params
    }

    /// Changes the radius used from the next period on.
    pub fn set_kappa(&mut self, kappa: f64) {
        debug_assert!(kappa.is_finite() && kappa >= 0.0);
        self.params.kappa = kappa;
    }

    pub fn last_decision(&self) -> Option<Decision> {
        self.last
    }

    pub fn stats(&self) -> RelpStats {
        self.stats
    }

    fn hold(&mut self, ctx: &StepContext<'_>, why: Decision) -> Result<Portfolio> {
        self.last = Some(why);
        self.stats.held += 1;
        Portfolio::normalized(ctx.b_hat.to_vec())
    }
}

impl Strategy for RelpFixed {
    fn name(&self) -> String {
        format!("relp(kappa={}, lambda={})", self.params.kappa, self.params.lambda)
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> Result<Portfolio> {
        let m = ctx.assets();
        if ctx.is_first() {
            self.last = Some(Decision::Initial);
            return Ok(Portfolio::uniform(m));
        }
        let history = &ctx.history;
        if history.len() < m + 1 {
            return self.hold(ctx, Decision::WarmUp);
        }
        let shape = match shape_factor(history) {
            Ok(u) => u,
            Err(_) => return self.hold(ctx, Decision::InsufficientData),
        };
        let window = self.params.window.min(history.len() + 1);
        let x_tilde = mar_predictor(history, window)?;
        let problem = RelpProblem {
            x_tilde: x_tilde.values(),
            b_hat: ctx.b_hat,
            shape: Some(&shape),
            lambda: self.params.lambda,
            kappa: self.params.kappa,
            gamma: self.params.gamma,
        };
        if !check_condition(&problem) {
            return self.hold(ctx, Decision::ConditionFailed);
        }
        match solve_relp_socp(&problem) {
            Ok(sol) => {
                self.last = Some(Decision::Solved);
                self.stats.solved += 1;
                Ok(sol.b_portfolio)
            }
            Err(e) => {
                log::warn!("period {}: {e}; holding", ctx.t);
                self.stats.solver_failures += 1;
                self.hold(ctx, Decision::SolverFailed)
            }
        }
    }

    fn current_kappa(&self) -> Option<f64> {
        Some(self.params.kappa)
    }
}
