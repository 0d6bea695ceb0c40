//! Performance statistics and relative rankings across strategies.
//!
//! ```text
//! cargo run --example metrics
//! ```

use relp::metrics::{relative_ranking_partial, MetricReport};
use relp::strategies::{Eg, Olmar, Ubah, Ucrp};
use relp::{run_backtest, CostSpec, RelativesMatrix, Strategy};

fn main() -> relp::Result<()> {
    let data = RelativesMatrix::synthetic(504, 5, 3)?;
    let cost = CostSpec::new(0.002)?;
    let market = run_backtest(&data, &mut Ubah, cost)?.wealth;

    let strategies: Vec<Box<dyn Strategy>> =
        vec![Box::new(Ubah), Box::new(Ucrp), Box::new(Eg::default()), Box::new(Olmar::default())];
    let mut names = Vec::new();
    let mut reports = Vec::new();
    for mut s in strategies {
        let res = run_backtest(&data, &mut s, cost)?;
        reports.push(MetricReport::compute(&res.wealth, &market, &res.trades)?);
        names.push(res.strategy);
    }

    println!("{}", serde_json::to_string_pretty(&reports[3]).expect("serializable"));
    for (col, (metric, direction)) in MetricReport::COLUMNS.iter().enumerate() {
        let stats: Vec<Option<f64>> = reports.iter().map(|r| r.values()[col]).collect();
        let ranks = relative_ranking_partial(&stats, *direction);
        let cells: Vec<String> = names
            .iter()
            .zip(&ranks)
            .map(|(n, r)| format!("{n}={}", r.map_or("NA".into(), |v| format!("{v:.2}"))))
            .collect();
        println!("{metric:>18}: {}", cells.join("  "));
    }
    Ok(())
}
