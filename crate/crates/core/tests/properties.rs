use proptest::prelude::*;

use relp::adaptive::{sb_replay, topk_step, SbConfig, TopKState};
use relp::metrics::{max_drawdown, relative_ranking, sharpe_daily, Direction};
use relp::strategies::{Eg, Olmar, RelpFixed, RelpParams, Ubah, Ucrp};
use relp::transaction_cost::net_proportion_bounds;
use relp::{net_proportion, run_backtest, CostSpec, RelativesMatrix, Strategy as Investor, WealthSeries};

fn simplex(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, m).prop_filter_map("non-zero", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| v.iter().map(|x| x / s).collect())
    })
}

fn pair(max_m: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2..=max_m).prop_flat_map(|m| (simplex(m), simplex(m)))
}

proptest! {
    #[test]
    fn net_proportion_solves_balance_within_bounds((b_hat, b) in pair(8), gamma in 0.0f64..0.3) {
        let w = net_proportion(&b_hat, &b, CostSpec::new(gamma).unwrap()).unwrap().value();
        let l1: f64 = b_hat.iter().zip(&b).map(|(h, x)| (h - w * x).abs()).sum();
        prop_assert!((w + gamma * l1 - 1.0).abs() <= 1e-10);
        let (lo, hi) = net_proportion_bounds(&b_hat, &b, gamma);
        prop_assert!(lo - 1e-12 <= w && w <= hi + 1e-12);
    }

    #[test]
    fn drawdown_and_sharpe_ignore_scale(
        path in prop::collection::vec(0.5f64..2.0, 2..40),
        scale in 0.01f64..100.0,
    ) {
        let a = WealthSeries::from_path(path.clone()).unwrap();
        let b = WealthSeries::from_path(path.iter().map(|v| v * scale).collect()).unwrap();
        let (da, db) = (max_drawdown(&a), max_drawdown(&b));
        prop_assert!((0.0..=1.0).contains(&da));
        prop_assert!((da - db).abs() <= 1e-12);
        match (sharpe_daily(&a, 0.04), sharpe_daily(&b, 0.04)) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs())),
            (x, y) => prop_assert_eq!(x.is_some(), y.is_some()),
        }
    }

    #[test]
    fn ranking_spans_unit_interval(stats in prop::collection::vec(-5.0f64..5.0, 1..12)) {
        for dir in [Direction::HigherIsBetter, Direction::LowerIsBetter] {
            let r = relative_ranking(&stats, dir);
            prop_assert!(r.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!(r.contains(&1.0));
            let spread = stats.iter().cloned().fold(f64::MIN, f64::max)
                - stats.iter().cloned().fold(f64::MAX, f64::min);
            if spread > 0.0 {
                prop_assert!(r.contains(&0.0));
            }
        }
    }

    #[test]
    fn topk_kappa_stays_in_grid(
        wealth in prop::collection::vec(0.1f64..3.0, 7),
        k in 1usize..=7,
    ) {
        let grid: Vec<f64> = (0..7).map(|i| 0.1 * 10f64.powf(i as f64 / 3.0)).collect();
        let s = topk_step(TopKState::new(k, grid.clone()).unwrap(), &wealth);
        prop_assert!(s.current_kappa >= grid[0] * (1.0 - 1e-12));
        prop_assert!(s.current_kappa <= grid[6] * (1.0 + 1e-12));
    }

    #[test]
    fn sb_ignores_identical_experts(h in prop::collection::vec(0.5f64..2.0, 5..30), n in 1usize..5) {
        let histories = vec![h; n];
        let tracked = sb_replay(SbConfig::default(), &histories).unwrap();
        prop_assert!(tracked.iter().all(|&i| i == 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn wealth_is_product_of_period_factors(seed in 0u64..1000, m in 2usize..5, gamma in 0.0f64..0.01) {
        let data = RelativesMatrix::synthetic(30, m, seed).unwrap();
        let cost = CostSpec::new(gamma).unwrap();
        let strategies: Vec<Box<dyn Investor>> = vec![
            Box::new(Ubah),
            Box::new(Ucrp),
            Box::new(Eg::default()),
            Box::new(Olmar::default()),
            Box::new(RelpFixed::new(RelpParams::default_for(gamma).unwrap()).unwrap()),
        ];
        for mut s in strategies {
            let res = run_backtest(&data, &mut s, cost).unwrap();
            let mut product = 1.0;
            for (r, x) in res.trades.records.iter().zip(data.rows()) {
                let sum: f64 = r.b.iter().sum();
                prop_assert!((sum - 1.0).abs() <= 1e-9 && r.b.iter().all(|v| *v >= 0.0));
                prop_assert!(r.w > 0.0 && r.w <= 1.0);
                product *= r.w * r.b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>();
            }
            let sn = *res.wealth.values().last().unwrap();
            prop_assert!((sn - product).abs() <= 1e-9 * sn.max(1.0), "{}", s.name());
        }
    }
}
