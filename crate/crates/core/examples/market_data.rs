//! Build a relatives matrix from prices, save it, and reload it through a
//! dataset manifest.
//!
//! ```text
//! cargo run --example market_data
//! ```

use relp::market_data::{parse_relatives, DatasetManifest, InputFormat};
use relp::RelativesMatrix;

fn main() -> relp::Result<()> {
    let prices = "date,alpha,beta\n2024-01-02,10,20\n2024-01-03,11,19\n2024-01-04,12.1,19.95\n";
    let m = parse_relatives(prices.as_bytes(), InputFormat::CsvPrices)?;
    println!("{} periods x {} assets {:?}", m.periods(), m.assets(), m.asset_names());
    for t in 0..m.periods() {
        println!("  x_{} = {:?}", t + 1, m.row(t));
    }

    let dir = std::env::temp_dir().join("relp-market-data-example");
    std::fs::create_dir_all(&dir).map_err(|e| relp::Error::Io { path: dir.clone(), source: e })?;
    let synthetic = RelativesMatrix::synthetic(250, 4, 7)?;
    synthetic.write_csv(dir.join("synthetic.csv"))?;
    DatasetManifest::describe("synthetic", "none", &synthetic, "synthetic.csv").write(dir.join("synthetic.json"))?;

    let (manifest, reloaded) = DatasetManifest::load_dataset(dir.join("synthetic.json"))?;
    assert_eq!(reloaded.row(100), synthetic.row(100));
    println!("reloaded '{}' ({} x {}) from {}", manifest.name, manifest.rows, manifest.assets, dir.display());

    // Strategies only ever see the observed prefix.
    let h = synthetic.history(10);
    println!("history after 10 periods: {} rows, last {:?}", h.len(), h.last());
    Ok(())
}
