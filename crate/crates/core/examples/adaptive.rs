//! The two-level adaptive strategy: switching over penalty values, with
//! each penalty expert choosing its radius by switching (variant 1) or by
//! top-5 averaging (variant 2). Writes the parameter trace as CSV.
//!
//! ```text
//! cargo run --release --example adaptive
//! ```

use relp::adaptive::{log_grid, AdapVariant, AdaptiveConfig, RelpAdap};
use relp::{run_backtest, CostSpec, RelativesMatrix};

fn main() -> relp::Result<()> {
    let data = RelativesMatrix::synthetic(200, 4, 9)?;
    let gamma = 0.002;
    for variant in [AdapVariant::Adap1, AdapVariant::Adap2] {
        // Coarser grids than the defaults keep the example quick.
        let cfg = AdaptiveConfig {
            kappa_grid: log_grid(0.1, 10.0, 9)?,
            lambda_multipliers: log_grid(1.0, 100.0, 5)?,
            ..AdaptiveConfig::new(variant, gamma)?
        };
        let mut s = RelpAdap::new(&cfg)?;
        let res = run_backtest(&data, &mut s, CostSpec::new(gamma)?)?;
        let switches = s.trace().iter().filter(|r| r.switched).count();
        println!(
            "{}: final wealth {:.4}, {switches} switches, ending at lambda {:.4} kappa {:?}",
            res.strategy,
            res.wealth.values().last().unwrap(),
            s.tracked_lambda(),
            s.trace().last().and_then(|r| r.current_kappa)
        );
        let path = std::env::temp_dir().join(format!("{}_trace.csv", variant.name()));
        s.write_trace(&path)?;
        println!("  trace written to {}", path.display());
    }
    Ok(())
}
