//! Per-period robust portfolio problem and its conic reformulation.
//!
//! The model maximizes `x~^T b - lambda ||b_hat - b||_1 - kappa ||U b||_2`
//! over the cost-adjusted set `1^T b + gamma ||b_hat - b||_1 <= 1, b >= 0`.
//! The absolute values are split into `u, v >= 0` and the norm is moved into
//! an epigraph variable `s >= ||U b||`, giving a small second-order cone
//! program (a linear program when the norm term is absent).

pub mod cones;
pub mod ipm;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::portfolio::{dot, l1_distance, Portfolio};
use crate::transaction_cost::{net_proportion, CostSpec};
use crate::predictors::ShapeFactor;
use cones::Cone;
pub use ipm::{ConeProgram, IpmSettings, IpmSolution, IpmStatus};

/// Entries of the raw solution below this are set to zero before recovery.
pub const ROUNDING_THRESHOLD: f64 = 1e-5;

#[derive(Debug, Clone, Copy)]
pub struct RelpProblem<'a> {
    pub x_tilde: &'a [f64],
    pub b_hat: &'a [f64],
    /// `None` drops the uncertainty term.
    pub shape: Option<&'a ShapeFactor>,
    pub lambda: f64,
    pub kappa: f64,
    pub gamma: f64,
}

impl RelpProblem<'_> {
    pub fn assets(&self) -> usize {
        self.x_tilde.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.assets();
        if m == 0 || self.b_hat.len() != m {
            return Err(Error::Config(format!(
                "predictor has {m} assets, holdings have {}",
                self.b_hat.len()
            )));
        }
        if let Some(u) = self.shape {
            if u.dim() != m {
                return Err(Error::Config(format!(
                    "shape factor is {0}x{0}, expected {m}x{m}",
                    u.dim()
                )));
            }
        }
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !(finite_nonneg(self.lambda) && finite_nonneg(self.kappa)) {
            return Err(Error::Config(format!(
                "lambda and kappa must be nonnegative, got {} and {}",
                self.lambda, self.kappa
            )));
        }
        if !(finite_nonneg(self.gamma) && self.gamma < 1.0) {
            return Err(Error::Config(format!("gamma must lie in [0, 1), got {}", self.gamma)));
        }
        if self.x_tilde.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Config("predictor entries must be positive".into()));
        }
        let sum: f64 = self.b_hat.iter().sum();
        if self.b_hat.iter().any(|b| !(*b >= 0.0)) || (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!("holdings are not on the simplex (sum {sum})")));
        }
        Ok(())
    }

    /// `kappa * sigma`, zero when no shape factor is attached.
    fn uncertainty_margin(&self) -> f64 {
        self.shape.map_or(0.0, |u| self.kappa * u.sigma())
    }

    /// Objective of the cost-adjusted model at a raw vector `b`.
    pub fn objective_at(&self, b: &[f64]) -> f64 {
        let risk = match self.shape {
            Some(u) if self.kappa > 0.0 => self.kappa * u.volatility(b),
            _ => 0.0,
        };
        dot(self.x_tilde, b) - self.lambda * l1_distance(self.b_hat, b) - risk
    }

    /// Objective of the original model at a net proportion `w` and portfolio `b`.
    pub fn original_objective(&self, w: f64, b: &[f64]) -> f64 {
        let wb: Vec<f64> = b.iter().map(|x| w * x).collect();
        self.objective_at(&wb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// Nothing usable survived rounding; the holdings are kept.
    FallbackHold,
}

#[derive(Debug, Clone)]
pub struct RelpSolution {
    /// Cost-adjusted portfolio `w * b_portfolio`, with the budget tight.
    pub b_raw: Vec<f64>,
    /// Solver output before rounding.
    pub b_unrounded: Vec<f64>,
    /// Net proportion `1^T b_raw`.
    pub w: f64,
    pub b_portfolio: Portfolio,
    pub objective: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

/// True when `max x~ > kappa sigma + lambda`, the regime where the model
/// trades away from the current holdings.
pub fn check_condition(p: &RelpProblem<'_>) -> bool {
    let max = p.x_tilde.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max > p.uncertainty_margin() + p.lambda
}

/// Solves the model without the uncertainty term.
pub fn solve_relp_lp(p: &RelpProblem<'_>) -> Result<RelpSolution> {
    p.validate()?;
    solve_program(p, false)
}

/// Solves the robust model. Calls with `kappa = 0` or no shape factor reduce
/// to [`solve_relp_lp`].
pub fn solve_relp_socp(p: &RelpProblem<'_>) -> Result<RelpSolution> {
    p.validate()?;
    if !check_condition(p) {
        return Err(Error::Condition {
            max_pred: p.x_tilde.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            bound: p.uncertainty_margin() + p.lambda,
        });
    }
    let robust = p.shape.is_some() && p.kappa > 0.0;
    solve_program(p, robust)
}

/// Column layout of the decision vector `[b, u, v, s]`.
struct Layout {
    m: usize,
    split: bool,
    cone: bool,
}

impl Layout {
    fn vars(&self) -> usize {
        self.m * if self.split { 3 } else { 1 } + usize::from(self.cone)
    }
    fn u(&self, i: usize) -> usize {
        self.m + i
    }
    fn v(&self, i: usize) -> usize {
        2 * self.m + i
    }
    fn s(&self) -> usize {
        self.vars() - 1
    }
}

fn build_program(p: &RelpProblem<'_>, robust: bool) -> (ConeProgram, Layout) {
    let m = p.assets();
    // Without penalty or cost the split variables have an unbounded optimal
    // face; they carry no information then and are dropped.
    let layout = Layout {
        m,
        split: p.lambda > 0.0 || p.gamma > 0.0,
        cone: robust,
    };
    let n = layout.vars();
    let lin_rows = 1 + if layout.split { 2 * m } else { 0 } + n - usize::from(robust);
    let soc_rows = if robust { m + 1 } else { 0 };
    let mut g = DMatrix::<f64>::zeros(lin_rows + soc_rows, n);
    let mut h = vec![0.0; lin_rows + soc_rows];
    let mut c = vec![0.0; n];

    for i in 0..m {
        c[i] = -p.x_tilde[i];
    }
    // Budget row.
    for i in 0..m {
        g[(0, i)] = 1.0;
    }
    h[0] = 1.0;
    let mut row = 1;
    if layout.split {
        for i in 0..m {
            c[layout.u(i)] = p.lambda;
            c[layout.v(i)] = p.lambda;
            g[(0, layout.u(i))] = p.gamma;
            g[(0, layout.v(i))] = p.gamma;
            // b_hat - b <= u
            g[(row, i)] = -1.0;
            g[(row, layout.u(i))] = -1.0;
            h[row] = -p.b_hat[i];
            // b - b_hat <= v
            g[(row + 1, i)] = 1.0;
            g[(row + 1, layout.v(i))] = -1.0;
            h[row + 1] = p.b_hat[i];
            row += 2;
        }
    }
    // Sign constraints on every variable except the epigraph bound.
    for j in 0..n - usize::from(robust) {
        g[(row, j)] = -1.0;
        row += 1;
    }
    let mut cones = vec![Cone::NonNeg(lin_rows)];
    if robust {
        let u = p.shape.expect("robust program needs a shape factor").upper();
        c[layout.s()] = p.kappa;
        g[(row, layout.s())] = -1.0;
        for r in 0..m {
            for j in r..m {
                g[(row + 1 + r, j)] = -u[(r, j)];
            }
        }
        cones.push(Cone::Soc(m + 1));
    }
    (ConeProgram { c, g, h, cones }, layout)
}

fn solve_program(p: &RelpProblem<'_>, robust: bool) -> Result<RelpSolution> {
    let (prog, layout) = build_program(p, robust);
    let sol = ipm::solve(&prog, &IpmSettings::default())?;
    if sol.status == IpmStatus::ReducedAccuracy {
        log::debug!(
            "solver stopped at reduced accuracy (pres {:.1e}, dres {:.1e}, gap {:.1e})",
            sol.primal_residual,
            sol.dual_residual,
            sol.gap
        );
    }
    recover(p, &sol.x[..layout.m], sol.iterations)
}

/// Rounds tiny entries and splits the raw vector into `(w, b)`.
fn recover(p: &RelpProblem<'_>, raw: &[f64], iterations: usize) -> Result<RelpSolution> {
    let rounded: Vec<f64> = raw
        .iter()
        .map(|&x| if x < ROUNDING_THRESHOLD { 0.0 } else { x })
        .collect();
    if !(rounded.iter().sum::<f64>() > 0.0) {
        log::warn!("rounding removed every position; holding current portfolio");
        let hold = Portfolio::normalized(p.b_hat.to_vec())?;
        return Ok(RelpSolution {
            objective: p.objective_at(hold.weights()),
            b_raw: hold.weights().to_vec(),
            b_unrounded: raw.to_vec(),
            w: 1.0,
            b_portfolio: hold,
            status: SolveStatus::FallbackHold,
            iterations,
        });
    }
    // Zeroing small entries loosens the budget, so the scale is re-derived
    // from the balance equation for the rounded direction.
    let b_portfolio = Portfolio::normalized(rounded)?;
    let w = net_proportion(p.b_hat, b_portfolio.weights(), CostSpec::new(p.gamma)?)?.value();
    let b_raw: Vec<f64> = b_portfolio.weights().iter().map(|b| w * b).collect();
    Ok(RelpSolution {
        objective: p.objective_at(&b_raw),
        b_raw,
        b_unrounded: raw.to_vec(),
        w,
        b_portfolio,
        status: SolveStatus::Optimal,
        iterations,
    })
}
