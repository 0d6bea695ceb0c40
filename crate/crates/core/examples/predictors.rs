//! Moving-average price prediction and the covariance shape factor that
//! sizes the uncertainty ellipsoid.
//!
//! ```text
//! cargo run --example predictors
//! ```

use relp::predictors::{mar_predictor, shape_factor};
use relp::RelativesMatrix;

fn main() -> relp::Result<()> {
    let data = RelativesMatrix::synthetic(60, 3, 11)?;
    let history = data.history(40);

    for window in [1, 3, 5, 10] {
        let x = mar_predictor(&history, window)?;
        println!("window {window:>2}: predicted relatives {:.4?}", x.values());
    }

    let u = shape_factor(&history).expect("enough rows for a covariance");
    println!("sigma = ||U||_F = {:.5} (regularized: {})", u.sigma(), u.regularized());
    let b = [0.5, 0.3, 0.2];
    println!("volatility of {b:?}: {:.5}", u.volatility(&b));
    println!("U =\n{:.5}", u.upper());
    Ok(())
}
