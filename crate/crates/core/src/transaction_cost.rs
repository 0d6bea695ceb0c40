//! Proportional transaction costs.
//!
//! Rebalancing from holdings `b_hat` to a target `b` at cost rate `gamma`
//! leaves a fraction `w` of wealth invested, where `w` solves
//! `w + gamma * ||b_hat - w b||_1 = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::portfolio::l1_distance;

const BISECTION_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    gamma: f64,
}

impl CostSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && (0.0..1.0).contains(&gamma)) {
            return Err(Error::Config(format!(
                "transaction cost rate must lie in [0, 1), got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn free() -> Self {
        Self { gamma: 0.0 }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Fraction of wealth left after paying for a rebalance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NetProportion(f64);

impl NetProportion {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn balance(b_hat: &[f64], b_new: &[f64], gamma: f64, w: f64) -> f64 {
    let turnover: f64 = b_hat
        .iter()
        .zip(b_new)
        .map(|(h, b)| (h - w * b).abs())
        .sum();
    w + gamma * turnover - 1.0
}

/// Solves the balance equation for `w`. `b_hat` is either a portfolio or the
/// all-zero vector of the initial purchase.
pub fn net_proportion(b_hat: &[f64], b_new: &[f64], cost: CostSpec) -> Result<NetProportion> {
    if b_hat.len() != b_new.len() {
        return Err(Error::Config(format!(
            "holdings have {} assets, target has {}",
            b_hat.len(),
            b_new.len()
        )));
    }
    let gamma = cost.gamma();
    if gamma == 0.0 || l1_distance(b_hat, b_new) == 0.0 {
        return Ok(NetProportion(1.0));
    }

    // f(w) is increasing with slope >= 1 - gamma, f(0) < 0 <= f(1).
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if balance(b_hat, b_new, gamma, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut w = 0.5 * (lo + hi);

    // f is linear between breakpoints; solve the active piece exactly.
    let (mut num, mut den) = (1.0, 1.0);
    for (h, b) in b_hat.iter().zip(b_new) {
        let s = (h - w * b).signum();
        num -= gamma * s * h;
        den -= gamma * s * b;
    }
    let exact = num / den;
    if exact.is_finite()
        && (0.0..=1.0).contains(&exact)
        && balance(b_hat, b_new, gamma, exact).abs() <= balance(b_hat, b_new, gamma, w).abs()
    {
        w = exact;
    }

    let residual = balance(b_hat, b_new, gamma, w).abs();
    if residual > RESIDUAL_TOL {
        return Err(Error::Solver(format!(
            "net proportion residual {residual:e} above tolerance"
        )));
    }
    Ok(NetProportion(w))
}

/// The two-sided bound on `w` for `b_hat` on the simplex.
pub fn net_proportion_bounds(b_hat: &[f64], b_new: &[f64], gamma: f64) -> (f64, f64) {
    let d = gamma * l1_distance(b_hat, b_new);
    ((1.0 - gamma) / (1.0 - gamma + d), (1.0 + gamma) / (1.0 + gamma + d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(g: f64) -> CostSpec {
        CostSpec::new(g).unwrap()
    }

    #[test]
    fn no_trade_costs_nothing() {
        let b = [0.2, 0.3, 0.5];
        for g in [0.0, 0.002, 0.5, 0.9] {
            assert_eq!(net_proportion(&b, &b, cost(g)).unwrap().value(), 1.0);
        }
    }

    #[test]
    fn full_switch_matches_closed_form() {
        let w = net_proportion(&[1.0, 0.0], &[0.0, 1.0], cost(0.005))
            .unwrap()
            .value();
        // w + gamma (1 + w) = 1
        let expected = 0.995 / 1.005;
        assert!((w - expected).abs() < 1e-12, "{w}");
        assert!((w - 0.990_049_8).abs() < 1e-7);
    }

    #[test]
    fn initial_purchase_is_charged() {
        let w = net_proportion(&[0.0, 0.0, 0.0], &[0.2, 0.3, 0.5], cost(0.002))
            .unwrap()
            .value();
        assert!((w - 1.0 / 1.002).abs() < 1e-12);
        assert!((w - 0.998_004_0).abs() < 1e-7);
    }

    #[test]
    fn rate_must_be_below_one() {
        assert!(matches!(CostSpec::new(1.0), Err(Error::Config(_))));
        assert!(matches!(CostSpec::new(-0.1), Err(Error::Config(_))));
        assert!(matches!(CostSpec::new(f64::NAN), Err(Error::Config(_))));
    }

    #[test]
    fn bounds_hold_on_small_example() {
        let (h, b) = ([0.7, 0.2, 0.1], [0.1, 0.3, 0.6]);
        let w = net_proportion(&h, &b, cost(0.01)).unwrap().value();
        let (lo, hi) = net_proportion_bounds(&h, &b, 0.01);
        assert!(lo <= w && w <= hi, "{lo} {w} {hi}");
        assert!(w < 1.0);
    }
}
