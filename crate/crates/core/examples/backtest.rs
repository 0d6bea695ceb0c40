//! Backtest the baseline strategies and the fixed robust strategy with
//! transaction costs.
//!
//! ```text
//! cargo run --release --example backtest
//! ```

use relp::strategies::{Eg, Olmar, RelpFixed, RelpParams, Ubah, Ucrp};
use relp::{run_backtest, CostSpec, RelativesMatrix, Strategy};

fn main() -> relp::Result<()> {
    let data = RelativesMatrix::synthetic(500, 6, 42)?;
    for gamma in [0.0, 0.002, 0.005] {
        println!("gamma = {gamma}");
        let strategies: Vec<Box<dyn Strategy>> = vec![
            Box::new(Ubah),
            Box::new(Ucrp),
            Box::new(Eg::default()),
            Box::new(Olmar::default()),
            Box::new(RelpFixed::new(RelpParams::default_for(gamma)?)?),
        ];
        for mut s in strategies {
            let res = run_backtest(&data, &mut s, CostSpec::new(gamma)?)?;
            let paid: f64 = res.trades.records.iter().map(|r| 1.0 - r.w).sum();
            println!(
                "  {:<28} final wealth {:>8.4}  summed cost fraction {:.4}",
                res.strategy,
                res.wealth.values().last().unwrap(),
                paid
            );
        }
    }
    Ok(())
}
