//! Sensitivity of the fixed robust strategy to its radius and penalty, the
//! same computation as `relp sweep`.
//!
//! ```text
//! cargo run --release --example sweep
//! ```

use relp::cli::{sweep_rows, GridSpec, RunConfig, SyntheticSpec};

fn main() -> relp::Result<()> {
    let cfg = RunConfig {
        synthetic: Some(SyntheticSpec { periods: 150, assets: 4 }),
        gammas: vec![0.002],
        sweep_kappa: GridSpec::new(0.1, 10.0, 5),
        sweep_lambda: GridSpec::new(0.01, 100.0, 5),
        ..RunConfig::default()
    };
    let data = cfg.load_market()?;
    let rows = sweep_rows(&cfg, &data)?;
    println!("{:>8} {:>10} {:>10} {:>8}", "kappa", "lambda", "wealth", "mdd");
    for r in rows {
        println!("{:>8.3} {:>10.5} {:>10.4} {:>8.4}", r.kappa, r.lambda, r.cumulative_wealth, r.max_drawdown);
    }
    Ok(())
}
