//! Plug a new rule into the backtest engine by implementing `Strategy`.
//!
//! ```text
//! cargo run --example custom_strategy
//! ```

use relp::{run_backtest, CostSpec, Portfolio, RelativesMatrix, StepContext, Strategy};

/// Puts everything on the asset with the best previous period.
struct FollowTheLeader;

impl Strategy for FollowTheLeader {
    fn name(&self) -> String {
        "follow-the-leader".into()
    }

    fn next_portfolio(&mut self, ctx: &StepContext<'_>) -> relp::Result<Portfolio> {
        let Some(x) = ctx.history.last() else {
            return Ok(Portfolio::uniform(ctx.assets()));
        };
        let best = (0..x.len()).max_by(|&i, &j| x[i].total_cmp(&x[j])).unwrap();
        let mut w = vec![0.0; x.len()];
        w[best] = 1.0;
        Portfolio::new(w)
    }
}

fn main() -> relp::Result<()> {
    let data = RelativesMatrix::synthetic(250, 5, 1)?;
    for gamma in [0.0, 0.002] {
        let res = run_backtest(&data, &mut FollowTheLeader, CostSpec::new(gamma)?)?;
        println!("{} at gamma {gamma}: {:.4}", res.strategy, res.wealth.values().last().unwrap());
    }
    let res = run_backtest(&data, &mut FollowTheLeader, CostSpec::new(0.002)?)?;
    let mut out = Vec::new();
    res.trades.write_csv_to(&mut out, data.asset_names())?;
    let text = String::from_utf8(out).expect("utf-8");
    println!("first rows of the trade log:");
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
