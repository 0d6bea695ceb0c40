//! The ten schemes for choosing the uncertainty radius online, each run
//! over the same pool of fixed-radius experts.
//!
//! ```text
//! cargo run --release --example kappa_schemes
//! ```

use relp::adaptive::{log_grid, scheme_combinator, SbConfig, SchemeKind};
use relp::strategies::RelpParams;
use relp::{run_backtest, CostSpec, RelativesMatrix};

fn main() -> relp::Result<()> {
    let data = RelativesMatrix::synthetic(300, 4, 5)?;
    let gamma = 0.002;
    let grid = log_grid(0.1, 10.0, 11)?;
    let base = RelpParams::default_for(gamma)?;
    for (letter, kind) in SchemeKind::LETTERS {
        let mut s = scheme_combinator(kind, base, &grid, SbConfig::default(), true)?;
        let res = run_backtest(&data, &mut s, CostSpec::new(gamma)?)?;
        println!(
            "({letter}) {:<18} final wealth {:.4}  last kappa {}",
            kind.to_string(),
            res.wealth.values().last().unwrap(),
            s.current_kappa().map_or("-".into(), |k| format!("{k:.3}"))
        );
    }
    Ok(())
}
