//! One period of the robust model: check the trading condition, solve the
//! cone program and split the answer into net proportion and portfolio.
//!
//! ```text
//! cargo run --example robust_step
//! ```

use relp::conic::{check_condition, solve_relp_lp, solve_relp_socp, RelpProblem};
use relp::predictors::{mar_predictor, shape_factor};
use relp::RelativesMatrix;

fn main() -> relp::Result<()> {
    let data = RelativesMatrix::synthetic(30, 4, 3)?;
    let history = data.history(30);
    let x_tilde = mar_predictor(&history, 5)?;
    let u = shape_factor(&history).expect("covariance is factorable");
    let b_hat = [0.25; 4];
    let gamma = 0.002;

    for (kappa, lambda) in [(0.0, 0.0), (0.5, 10.0 * gamma), (2.0, 10.0 * gamma), (50.0, 0.1)] {
        let p = RelpProblem {
            x_tilde: x_tilde.values(),
            b_hat: &b_hat,
            shape: Some(&u),
            lambda,
            kappa,
            gamma,
        };
        if !check_condition(&p) {
            println!("kappa {kappa:>4}, lambda {lambda:.3}: condition fails, hold {b_hat:?}");
            continue;
        }
        let sol = solve_relp_socp(&p)?;
        println!(
            "kappa {kappa:>4}, lambda {lambda:.3}: w = {:.6}, b = {:.4?}, objective {:.6}, {} iterations",
            sol.w,
            sol.b_portfolio.weights(),
            sol.objective,
            sol.iterations
        );
    }

    let lp = RelpProblem { x_tilde: x_tilde.values(), b_hat: &b_hat, shape: None, lambda: 0.0, kappa: 0.0, gamma };
    let sol = solve_relp_lp(&lp)?;
    println!("no uncertainty, no penalty: all in {:?}", sol.b_portfolio.weights());
    Ok(())
}
