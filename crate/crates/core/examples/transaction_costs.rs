//! How much wealth survives a rebalance under proportional costs.
//!
//! ```text
//! cargo run --example transaction_costs
//! ```

use relp::transaction_cost::net_proportion_bounds;
use relp::{net_proportion, CostSpec};

fn main() -> relp::Result<()> {
    let cost = CostSpec::new(0.005)?;
    let cases: [(&str, [f64; 3], [f64; 3]); 4] = [
        ("entry from cash", [0.0, 0.0, 0.0], [1.0 / 3.0; 3]),
        ("no trade", [0.2, 0.3, 0.5], [0.2, 0.3, 0.5]),
        ("small tilt", [0.2, 0.3, 0.5], [0.25, 0.3, 0.45]),
        ("full switch", [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
    ];
    for (label, held, target) in cases {
        let w = net_proportion(&held, &target, cost)?.value();
        let (lo, hi) = net_proportion_bounds(&held, &target, cost.gamma());
        println!("{label:>16}: w = {w:.6}  (bounds {lo:.6} .. {hi:.6}, cost {:.4}%)", 100.0 * (1.0 - w));
    }
    Ok(())
}
