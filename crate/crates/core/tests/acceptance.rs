//! Acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so every line is printed on a normal
//! `cargo test`. Exits non-zero when any criterion fails. Criterion 9 needs
//! the MSCI and NYSE-O relatives files; it looks for `msci.csv` and
//! `nyse_o.csv` in `$RELP_DATA_DIR` (default `<workspace>/data`) and prints
//! SKIP when they are absent.

use std::path::PathBuf;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use relp::adaptive::{
    sb_replay, topk_step, AdapVariant, AdaptiveConfig, RelpAdap, SbConfig, TopKState,
};
use relp::conic::{check_condition, solve_relp_socp, RelpProblem};
use relp::market_data::{load_relatives, InputFormat};
use relp::metrics::{
    average_turnover, calmar, cumulative_wealth, information_ratio, max_drawdown, mer, quantile,
    relative_ranking, sharpe_daily, var95, Direction,
};
use relp::predictors::ShapeFactor;
use relp::strategies::{Eg, Olmar, RelpFixed, RelpParams, Ubah, Ucrp};
use relp::transaction_cost::net_proportion_bounds;
use relp::{net_proportion, run_backtest, CostSpec, RelativesMatrix, Strategy, WealthSeries};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().ln()).collect();
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

/// Random covariance with per-asset volatility between 1% and 20%.
fn random_shape(rng: &mut ChaCha8Rng, m: usize) -> ShapeFactor {
    let scale = rng.random_range(0.01..0.2);
    let a = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal) * scale);
    let cov = &a * a.transpose() / m as f64 + DMatrix::identity(m, m) * (1e-3 * scale * scale);
    ShapeFactor::from_covariance(&cov).expect("positive definite by construction")
}

/// Grid over the simplex with spacing `1 / steps`.
fn simplex_grid(m: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(m: usize, left: usize, steps: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == m - 1 {
            cur.push(left as f64 / steps as f64);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k as f64 / steps as f64);
            rec(m, left - k, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, steps, steps, &mut Vec::new(), &mut out);
    out
}

/// Best value of the original model over `candidates`: each direction `b`
/// is paired with its exact net proportion, which makes the budget tight.
fn brute_force(p: &RelpProblem<'_>, candidates: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let cost = CostSpec::new(p.gamma).unwrap();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for b in candidates {
        let w = net_proportion(p.b_hat, b, cost).unwrap().value();
        let v = p.original_objective(w, b);
        if v > best.0 {
            best = (v, b.clone());
        }
    }
    best
}

/// Brute force on the 0.01 grid, then on a 0.0005 grid within one coarse
/// step of the coarse winner. The current holdings are always a candidate.
fn oracle(p: &RelpProblem<'_>, grid: &[Vec<f64>]) -> f64 {
    let mut cands = grid.to_vec();
    cands.push(p.b_hat.to_vec());
    let (coarse, at) = brute_force(p, &cands);
    coarse.max(brute_force(p, &local_grid(&at, 2000, 0.01)).0)
}

/// Simplex points on the `1 / steps` lattice within `radius` of `center`
/// in every coordinate.
fn local_grid(center: &[f64], steps: usize, radius: f64) -> Vec<Vec<f64>> {
    let m = center.len();
    let n = steps as f64;
    let span = |c: f64| {
        let lo = ((c - radius) * n).ceil().max(0.0) as usize;
        let hi = ((c + radius) * n).floor().min(n) as usize;
        lo..=hi
    };
    let mut out = vec![Vec::new()];
    for &c in &center[..m - 1] {
        out = out
            .into_iter()
            .flat_map(|pre: Vec<usize>| span(c).map(move |k| [pre.clone(), vec![k]].concat()))
            .collect();
    }
    out.into_iter()
        .filter_map(|ks| {
            let used: usize = ks.iter().sum();
            let last = steps.checked_sub(used)? as f64 / n;
            ((last - center[m - 1]).abs() <= radius + 1e-12).then(|| {
                let mut b: Vec<f64> = ks.iter().map(|&k| k as f64 / n).collect();
                b.push(last);
                b
            })
        })
        .collect()
}

struct Instance {
    x_tilde: Vec<f64>,
    b_hat: Vec<f64>,
    shape: ShapeFactor,
    lambda: f64,
    kappa: f64,
    gamma: f64,
}

impl Instance {
    fn problem(&self) -> RelpProblem<'_> {
        RelpProblem {
            x_tilde: &self.x_tilde,
            b_hat: &self.b_hat,
            shape: Some(&self.shape),
            lambda: self.lambda,
            kappa: self.kappa,
            gamma: self.gamma,
        }
    }
}

fn instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|i| {
            let m = 2 + i % 2;
            Instance {
                x_tilde: (0..m).map(|_| rng.random_range(0.8..1.2)).collect(),
                b_hat: random_simplex(&mut rng, m),
                shape: random_shape(&mut rng, m),
                lambda: rng.random_range(0.0..0.05),
                kappa: rng.random_range(0.0..1.0),
                gamma: [0.0, 0.002, 0.005][rng.random_range(0..3)],
            }
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let grids = [simplex_grid(2, 100), simplex_grid(3, 100)];
    let (mut worst_obj, mut worst_eq, mut worst_rec) = (0.0f64, 0.0f64, 0.0f64);
    let mut held = 0;
    for (i, inst) in instances().iter().enumerate() {
        let p = inst.problem();
        let brute = oracle(&p, &grids[p.assets() - 2]);
        if !check_condition(&p) {
            // The model keeps the holdings; the oracle must not beat that.
            let hold = p.original_objective(1.0, p.b_hat);
            worst_obj = worst_obj.max(brute - hold);
            held += 1;
            continue;
        }
        let sol = solve_relp_socp(&p).map_err(|e| format!("instance {i}: {e}"))?;
        worst_obj = worst_obj.max((sol.objective - brute).abs());
        let b = sol.b_portfolio.weights();
        let wb: Vec<f64> = b.iter().map(|x| sol.w * x).collect();
        let l1: f64 = p.b_hat.iter().zip(&wb).map(|(h, x)| (h - x).abs()).sum();
        worst_eq = worst_eq.max((sol.w + p.gamma * l1 - 1.0).abs());
        worst_rec = worst_rec.max((p.original_objective(sol.w, b) - sol.objective).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst_obj <= 1e-3, || format!("objective gap {worst_obj:.2e} > 1e-3"))?;
    ensure(worst_eq <= 1e-6, || format!("recovered budget residual {worst_eq:.2e} > 1e-6"))?;
    ensure(worst_rec <= 1e-6, || format!("recovered objective gap {worst_rec:.2e} > 1e-6"))?;
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "200 instances ({held} held), max |solver - brute force| {worst_obj:.1e}, \
         budget residual {worst_eq:.1e}, recovery gap {worst_rec:.1e}, {secs:.1}s"
    ))
}

fn criterion_2() -> Outcome {
    let (mut worst, mut worst_solver) = (0.0f64, 0.0f64);
    let mut n = 0;
    for (i, inst) in instances().iter().enumerate() {
        let p = inst.problem();
        if !check_condition(&p) {
            continue;
        }
        let sol = solve_relp_socp(&p).map_err(|e| format!("instance {i}: {e}"))?;
        let budget = |b: &[f64]| {
            let l1: f64 = p.b_hat.iter().zip(b).map(|(h, x)| (h - x).abs()).sum();
            b.iter().sum::<f64>() + p.gamma * l1
        };
        worst = worst.max((budget(&sol.b_raw) - 1.0).abs());
        worst_solver = worst_solver.max((budget(&sol.b_unrounded) - 1.0).abs());
        n += 1;
    }
    ensure(worst_solver <= 1e-6, || format!("solver budget slack {worst_solver:.2e} > 1e-6"))?;
    ensure(worst <= 1e-6, || format!("rounded budget slack {worst:.2e} > 1e-6"))?;
    Ok(format!(
        "{n} instances, max |budget - 1| {worst_solver:.1e} from the solver, {worst:.1e} after rounding"
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let m = rng.random_range(2..10);
        let b_hat = random_simplex(&mut rng, m);
        let b = random_simplex(&mut rng, m);
        let gamma = rng.random_range(0.0..0.2);
        let w = net_proportion(&b_hat, &b, CostSpec::new(gamma).unwrap())
            .map_err(|e| format!("triple {i}: {e}"))?
            .value();
        let l1: f64 = b_hat.iter().zip(&b).map(|(h, x)| (h - w * x).abs()).sum();
        let res = (w + gamma * l1 - 1.0).abs();
        worst = worst.max(res);
        let (lo, hi) = net_proportion_bounds(&b_hat, &b, gamma);
        ensure(lo - 1e-12 <= w && w <= hi + 1e-12, || {
            format!("triple {i}: w = {w} outside [{lo}, {hi}]")
        })?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-10, || format!("residual {worst:.2e} > 1e-10"))?;
    ensure(secs < 1.0, || format!("took {secs:.2}s"))?;
    Ok(format!("1000 triples, max residual {worst:.1e}, bounds hold, {:.0}ms", secs * 1e3))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..1000 {
        let m = rng.random_range(2..8);
        let u = random_shape(&mut rng, m);
        let b1: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b2: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lhs = (u.volatility(&b1) - u.volatility(&b2)).abs();
        let dist: f64 = b1.iter().zip(&b2).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let slack = lhs - u.sigma() * dist;
        ensure(slack <= 1e-12, || format!("sample {i}: excess {slack:.2e}"))?;
        worst = worst.max(slack / (u.sigma() * dist));
    }
    Ok(format!("1000 samples, worst ratio to bound {:.3}", 1.0 + worst))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_below, mut worst_gap) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let m = rng.random_range(2..4);
        let x_tilde: Vec<f64> = (0..m).map(|_| rng.random_range(0.8..1.2)).collect();
        let u = random_shape(&mut rng, m);
        let kappa = rng.random_range(0.0..2.0);
        let b = random_simplex(&mut rng, m);
        let closed: f64 = x_tilde.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>()
            - kappa * u.volatility(&b);
        // Worst case over x = x~ + kappa U^T xi with ||xi|| = 1.
        let ub = u.upper() * nalgebra::DVector::from_column_slice(&b);
        let base: f64 = x_tilde.iter().zip(&b).map(|(x, y)| x * y).sum();
        let mut best = f64::INFINITY;
        for _ in 0..100_000 {
            let xi: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let val = base + kappa * xi.iter().zip(ub.iter()).map(|(a, c)| a * c).sum::<f64>() / norm;
            best = best.min(val);
        }
        worst_below = worst_below.max(closed - best);
        worst_gap = worst_gap.max(best - closed);
    }
    ensure(worst_below <= 1e-6, || format!("sampled point beats closed form by {worst_below:.2e}"))?;
    ensure(worst_gap <= 1e-3, || format!("best sample {worst_gap:.2e} above closed form"))?;
    Ok(format!("100 instances x 1e5 directions, best sample within {worst_gap:.1e}"))
}

fn criterion_6() -> Outcome {
    let data = RelativesMatrix::synthetic(50, 3, 6).map_err(|e| e.to_string())?;
    let gamma = 0.002;
    let cost = CostSpec::new(gamma).unwrap();
    let strategies: Vec<Box<dyn Strategy>> = vec![
        Box::new(Ubah),
        Box::new(Ucrp),
        Box::new(Eg::default()),
        Box::new(Olmar::default()),
        Box::new(RelpFixed::new(RelpParams::default_for(gamma).unwrap()).unwrap()),
    ];
    let mut worst = 0.0f64;
    for mut s in strategies {
        let res = run_backtest(&data, &mut s, cost).map_err(|e| e.to_string())?;
        let mut product = 1.0;
        for (r, x) in res.trades.records.iter().zip(data.rows()) {
            product *= r.w * r.b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>();
        }
        let sn = *res.wealth.values().last().unwrap();
        worst = worst.max((sn - product).abs());
        if res.strategy == "ubah" {
            let w1 = res.trades.records[0].w;
            ensure((w1 - 1.0 / (1.0 + gamma)).abs() < 1e-15, || format!("ubah entry w = {w1}"))?;
            ensure(res.trades.records[1..].iter().all(|r| r.w == 1.0), || {
                "ubah paid costs after entry".into()
            })?;
        }
    }
    ensure(worst <= 1e-9, || format!("wealth mismatch {worst:.2e}"))?;
    let hand = RelativesMatrix::from_rows(vec![vec![2.0, 1.0], vec![2.0, 1.0]]).unwrap();
    let res = run_backtest(&hand, &mut Ubah, CostSpec::free()).unwrap();
    ensure(res.wealth.values() == [1.0, 1.5, 2.5], || {
        format!("hand example gave {:?}", res.wealth.values())
    })?;
    Ok(format!("5 strategies, max |S_n - product| {worst:.1e}; ubah costs only at entry; S_2 = 2.5"))
}

/// First period at which challenger 1 qualifies against tracked expert 0.
fn expected_switch(h: &[Vec<f64>], cfg: SbConfig) -> Option<usize> {
    let w = cfg.window;
    (w..=h[0].len()).find(|&t| {
        let a = &h[0][t - w..t];
        let b = &h[1][t - w..t];
        let ma = a.iter().sum::<f64>() / w as f64;
        let sa = (a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / (w - 1) as f64).sqrt();
        let mb = b.iter().sum::<f64>() / w as f64;
        mb > ma + cfg.delta.max(cfg.z * sa)
    })
}

fn criterion_7() -> Outcome {
    // Tracked expert wobbles around 1; the challenger climbs steadily.
    let flat: Vec<f64> = (0..60).map(|t| 1.0 + 0.01 * ((t as f64) * 1.7).sin()).collect();
    let climb: Vec<f64> = (0..60).map(|t| 0.9 + 0.01 * t as f64).collect();
    let histories = vec![flat, climb];
    let mut switches = Vec::new();
    for delta in [0.0, 0.2] {
        let cfg = SbConfig {
            delta,
            ..SbConfig::default()
        };
        let expected = expected_switch(&histories, cfg).ok_or("challenger never qualifies")?;
        let tracked = sb_replay(cfg, &histories).map_err(|e| e.to_string())?;
        let got = tracked.iter().position(|&i| i == 1).map(|i| i + 1);
        ensure(got == Some(expected), || {
            format!("delta {delta}: switched at {got:?}, expected {expected}")
        })?;
        switches.push(expected);
    }
    let state = TopKState::new(2, vec![0.1, 1.0, 10.0]).unwrap();
    let kappa = topk_step(state, &[1.0, 1.2, 1.3]).current_kappa;
    ensure((kappa - 10f64.sqrt()).abs() < 1e-12, || format!("top-2 kappa {kappa}"))?;

    let data = RelativesMatrix::synthetic(40, 3, 7).unwrap();
    let gamma = 0.002;
    let cost = CostSpec::new(gamma).unwrap();
    let fixed = RelpParams::new(0.8, 10.0 * gamma, gamma).unwrap();
    let reference = run_backtest(&data, &mut RelpFixed::new(fixed).unwrap(), cost).unwrap();
    for variant in [AdapVariant::Adap1, AdapVariant::Adap2] {
        let cfg = AdaptiveConfig {
            kappa_grid: vec![0.8],
            lambda_multipliers: vec![10.0],
            ..AdaptiveConfig::new(variant, gamma).unwrap()
        };
        let res = run_backtest(&data, &mut RelpAdap::new(&cfg).unwrap(), cost).unwrap();
        ensure(res.trades == reference.trades, || format!("{variant:?} 1x1 differs from fixed"))?;
    }
    Ok(format!(
        "switches at t = {} (delta 0) and {} (delta 0.2); top-2 kappa = sqrt(10); 1x1 grids match",
        switches[0], switches[1]
    ))
}

fn path(v: &[f64]) -> WealthSeries {
    WealthSeries::from_path(v.to_vec()).unwrap()
}

fn criterion_8() -> Outcome {
    let close = |a: f64, b: f64, tol: f64| (a - b).abs() <= tol;
    ensure(cumulative_wealth(&path(&[1.0, 1.0, 1.0])) == 1.0, || "cw of constant".into())?;
    ensure(cumulative_wealth(&path(&[1.0, 1.5, 2.5])) == 2.5, || "cw 2.5".into())?;
    ensure(max_drawdown(&path(&[1.0, 1.1, 1.3])) == 0.0, || "mdd monotone".into())?;
    ensure(max_drawdown(&path(&[1.0, 0.5, 1.0])) == 0.5, || "mdd (1, 0.5, 1)".into())?;
    ensure(max_drawdown(&path(&[2.0, 1.0, 4.0, 2.0])) == 0.5, || "mdd (2, 1, 4, 2)".into())?;
    let rf = 0.04 / 252.0;
    ensure(sharpe_daily(&path(&[1.0, 1.0 + rf, (1.0 + rf) * (1.0 + rf)]), 0.04).is_none(), || {
        "sharpe at risk-free".into()
    })?;
    let s = sharpe_daily(&path(&[1.0, 1.01, 1.01 * 0.99]), 0.0).ok_or("sharpe undefined")?;
    ensure(close(s, 0.0, 1e-12), || format!("sharpe {s}"))?;
    ensure(sharpe_daily(&path(&[1.0, 1.01, 1.0201]), 0.0).is_none(), || "sharpe const".into())?;
    ensure(calmar(&path(&[1.0, 1.2, 1.4])).is_none(), || "calmar monotone".into())?;
    let mut v = vec![1.0; 253];
    v[50] = 0.5;
    ensure(calmar(&path(&v)) == Some(0.0), || "calmar flat year".into())?;
    let mut v: Vec<f64> = (0..=252).map(|i| 2f64.powf(i as f64 / 252.0)).collect();
    v[100] = v[99] * 0.75;
    let c = calmar(&path(&v)).ok_or("calmar undefined")?;
    ensure(close(c, 4.0, 1e-9), || format!("calmar {c}"))?;
    let s = path(&[1.0, 1.02, 1.0]);
    ensure(mer(&s, &s).unwrap() == Some(0.0), || "mer vs itself".into())?;
    ensure(information_ratio(&s, &s).unwrap().is_none(), || "ir vs itself".into())?;
    let market = path(&[1.0, 1.0, 1.0]);
    let ir = information_ratio(&path(&[1.0, 1.001, 1.001 * 1.001]), &market).unwrap();
    ensure(ir.is_none(), || "ir constant excess".into())?;
    let ir = information_ratio(&path(&[1.0, 1.02, 1.02]), &market).unwrap().ok_or("ir undefined")?;
    ensure(close(ir, 0.5f64.sqrt(), 1e-12), || format!("ir {ir}"))?;
    let v = var95(&path(&[1.0, 1.01, 1.0201])).unwrap();
    ensure(close(v, -0.01, 1e-12), || format!("var equal gains {v}"))?;
    let v = var95(&path(&[1.0, 0.97])).unwrap();
    ensure(close(v, 0.03, 1e-12), || format!("var single period {v}"))?;
    let losses: Vec<f64> = (1..=100).map(|k| k as f64 / 100.0).collect();
    let q = quantile(&losses, 0.95).unwrap();
    ensure(close(q, 0.9505, 1e-12), || format!("quantile {q}"))?;

    let data = RelativesMatrix::synthetic(80, 3, 8).unwrap();
    let ubah = run_backtest(&data, &mut Ubah, CostSpec::free()).unwrap();
    let at = average_turnover(&ubah.trades);
    ensure(close(at, 1.0 / 160.0, 1e-15), || format!("ubah turnover {at}"))?;
    let n = 200;
    let rows: Vec<Vec<f64>> = (0..n).map(|t| if t % 2 == 0 { vec![2.0, 0.5] } else { vec![0.5, 2.0] }).collect();
    let switching = RelativesMatrix::from_rows(rows).unwrap();
    struct Flip;
    impl Strategy for Flip {
        fn name(&self) -> String {
            "flip".into()
        }
        fn next_portfolio(&mut self, ctx: &relp::StepContext<'_>) -> relp::Result<relp::Portfolio> {
            relp::Portfolio::new(if ctx.t % 2 == 1 { vec![1.0, 0.0] } else { vec![0.0, 1.0] })
        }
    }
    let flip = run_backtest(&switching, &mut Flip, CostSpec::free()).unwrap();
    let at = average_turnover(&flip.trades);
    ensure((1.0 - at).abs() <= 1.0 / (2.0 * n as f64) + 1e-12, || format!("switching turnover {at}"))?;

    let r = relative_ranking(&[2.0, 4.0, 10.0], Direction::HigherIsBetter);
    ensure(r == [0.0, 0.25, 1.0], || format!("ranking {r:?}"))?;
    let r = relative_ranking(&[3.0, 3.0, 3.0], Direction::HigherIsBetter);
    ensure(r == [1.0, 1.0, 1.0], || format!("tied ranking {r:?}"))?;
    Ok("all metric examples hold; ranking {2,4,10} -> {0,0.25,1}; MDD 0.5; switching AT within 1/(2n)".into())
}

fn data_dir() -> PathBuf {
    std::env::var_os("RELP_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

/// `None` means the datasets are not available.
fn criterion_9() -> Option<Outcome> {
    let dir = data_dir();
    let (msci, nyse) = (dir.join("msci.csv"), dir.join("nyse_o.csv"));
    if !(msci.exists() && nyse.exists()) {
        return None;
    }
    Some((|| {
        let start = Instant::now();
        let gamma = 0.002;
        let cost = CostSpec::new(gamma).unwrap();
        let load = |p: &PathBuf| load_relatives(p, InputFormat::CsvRelatives).map_err(|e| e.to_string());
        let (msci, nyse) = (load(&msci)?, load(&nyse)?);
        let cw = |d: &RelativesMatrix, s: &mut dyn Strategy| -> Result<f64, String> {
            let r = run_backtest(d, s, cost).map_err(|e| e.to_string())?;
            Ok(*r.wealth.values().last().unwrap())
        };
        let within = |got: f64, want: f64| (got / want - 1.0).abs() <= 0.02;
        let ubah_msci = cw(&msci, &mut Ubah)?;
        let ubah_nyse = cw(&nyse, &mut Ubah)?;
        let ucrp_msci = cw(&msci, &mut Ucrp)?;
        ensure(within(ubah_msci, 0.9045), || format!("ubah msci {ubah_msci}"))?;
        ensure(within(ubah_nyse, 14.5), || format!("ubah nyse-o {ubah_nyse}"))?;
        ensure(within(ucrp_msci, 0.9092), || format!("ucrp msci {ucrp_msci}"))?;
        let adap = cw(&msci, &mut RelpAdap::new(&AdaptiveConfig::new(AdapVariant::Adap1, gamma).unwrap()).unwrap())?;
        ensure(adap > ubah_msci, || format!("adaptive msci {adap} <= ubah {ubah_msci}"))?;
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 600.0, || format!("took {secs:.0}s"))?;
        Ok(format!(
            "ubah msci {ubah_msci:.4}, nyse-o {ubah_nyse:.3}; ucrp msci {ucrp_msci:.4}; adaptive msci {adap:.4}; {secs:.0}s"
        ))
    })())
}

fn main() {
    // Honour `cargo test -- <filter>` only as far as skipping everything for
    // filters that name other targets' tests.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let checks: [Check; 8] = [
        ("reformulation matches brute force", criterion_1),
        ("budget constraint is tight", criterion_2),
        ("net proportion residual and bounds", criterion_3),
        ("volatility is sigma-Lipschitz", criterion_4),
        ("worst case over the ellipsoid", criterion_5),
        ("framework bookkeeping", criterion_6),
        ("adaptive determinism", criterion_7),
        ("metric examples", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    match criterion_9() {
        None => println!(
            "criterion 9 SKIP  dataset reproduction: msci.csv and nyse_o.csv not found in {}",
            data_dir().display()
        ),
        Some(Ok(detail)) => println!("criterion 9 PASS  dataset reproduction: {detail}"),
        Some(Err(why)) => {
            failed += 1;
            println!("criterion 9 FAIL  dataset reproduction: {why}");
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
