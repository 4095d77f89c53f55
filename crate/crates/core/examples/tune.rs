//! Scratch harness for sizing the acceptance-suite experiment constants.

use conbandit_core::algorithms::{run_algorithm, AlgoParams, AlgorithmId};
use conbandit_core::env::{
    build_instance, compute_corruption, CorruptionPreset, CorruptionSchedule, EnvConfig,
    LossPattern,
};
use conbandit_core::metrics::fit_scaling_exponent;
use conbandit_core::offline::solve_opt;
use conbandit_core::strategy::RngStream;

fn block_len_for(horizon: u64, arms: usize) -> u64 {
    // Saturated switching: blocks comparable to the learner's reaction time.
    let eta = ((arms as f64 * horizon as f64).ln() / horizon as f64).sqrt();
    ((0.5 / (0.7 * eta)).ceil() as u64).max(4)
}

fn c5_env(horizon: u64, c_target: f64) -> EnvConfig {
    let base = vec![
        vec![-0.05, -0.05, -0.05, 1.0, -0.4],
        vec![-0.05, -0.05, -0.05, 0.6, -0.5],
    ];
    let schedule = if c_target > 0.0 {
        CorruptionSchedule::from_preset(
            base,
            CorruptionPreset::Spread,
            c_target,
            horizon,
            0,
            vec![0.3, 0.3, 0.3, 0.0, 0.0],
        )
        .unwrap()
    } else {
        CorruptionSchedule::stationary(base)
    };
    EnvConfig {
        horizon,
        arms: 5,
        constraints: 2,
        loss_pattern: LossPattern::SwitchingBestArm {
            leaders: vec![0, 1, 2],
            low: 0.1,
            rest: vec![0.8, 0.8, 0.8, 0.5, 0.9],
            block_len: block_len_for(horizon, 5),
            scramble: true,
        },
        schedule,
        rho_min: 0.04,
    }
}

fn c7_env(horizon: u64, c_target: f64) -> EnvConfig {
    let base = vec![
        vec![-0.15, -0.15, -0.15, -0.9, 0.6],
        vec![-0.10, -0.10, -0.10, -0.9, 0.4],
    ];
    let schedule = if c_target > 0.0 {
        CorruptionSchedule::from_preset(
            base,
            CorruptionPreset::Spread,
            c_target,
            horizon,
            0,
            vec![0.3, 0.3, 0.3, 0.0, 0.0],
        )
        .unwrap()
    } else {
        CorruptionSchedule::stationary(base)
    };
    EnvConfig {
        horizon,
        arms: 5,
        constraints: 2,
        loss_pattern: LossPattern::SwitchingBestArm {
            leaders: vec![0, 1, 2],
            low: 0.1,
            rest: vec![0.8, 0.8, 0.8, 0.57, 0.57],
            block_len: 128,
            scramble: true,
        },
        schedule,
        rho_min: 0.05,
    }
}

fn mean_metrics(
    config: &EnvConfig,
    id: AlgorithmId,
    beta: f64,
    seeds: u64,
) -> (f64, f64, u64, f64) {
    let mut rng = RngStream::new(0);
    let inst = build_instance(config, &mut rng).unwrap();
    let mut regret = 0.0;
    let mut violation = 0.0;
    let mut fallbacks = 0;
    let mut params = AlgoParams::default();
    params.beta = beta;
    for seed in 1..=seeds {
        let record = run_algorithm(id, &inst, &params, RngStream::new(seed)).unwrap();
        regret += record.summary.regret;
        violation += record.summary.violation;
        fallbacks += record.summary.fallbacks;
    }
    let c = compute_corruption(&inst).level;
    (
        regret / seeds as f64,
        violation / seeds as f64,
        fallbacks,
        c,
    )
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let what = args.get(1).map(String::as_str).unwrap_or("c5");
    let seeds: u64 = args
        .get(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    match what {
        "c5" => {
            let mut r_points = Vec::new();
            let mut v_points = Vec::new();
            for exp in 10..=14u32 {
                let t = 1u64 << exp;
                let config = c5_env(t, 0.0);
                let start = std::time::Instant::now();
                let (r, v, fb, _) = mean_metrics(&config, AlgorithmId::ConomdFs, 0.5, seeds);
                println!(
                    "T=2^{exp}: mean R={r:.1} V={v:.1} fallbacks={fb} ({:.1?})",
                    start.elapsed()
                );
                r_points.push((t as f64, r));
                v_points.push((t as f64, v));
            }
            if r_points.iter().all(|(_, r)| *r > 0.0) {
                let fit = fit_scaling_exponent(&r_points).unwrap();
                println!("R slope {:.3} r2 {:.3}", fit.slope, fit.r_squared);
            } else {
                println!("R has non-positive points: {r_points:?}");
            }
            if v_points.iter().all(|(_, v)| *v > 0.0) {
                let fit = fit_scaling_exponent(&v_points).unwrap();
                println!("V slope {:.3} r2 {:.3}", fit.slope, fit.r_squared);
            } else {
                println!("V has non-positive points: {v_points:?}");
            }
        }
        "c6" => {
            let t = 1u64 << 14;
            for id in [AlgorithmId::ConomdFs, AlgorithmId::Expopt] {
                let mut pts = Vec::new();
                for c_target in [0.0, 128.0, 1448.0] {
                    let config = c5_env(t, c_target);
                    let start = std::time::Instant::now();
                    let (r, v, fb, c) = mean_metrics(&config, id, 0.5, seeds);
                    println!(
                        "{id} C_target={c_target}: C={c:.1} mean R={r:.1} V={v:.1} fb={fb} ({:.1?})",
                        start.elapsed()
                    );
                    pts.push((c, v));
                }
                // Linear fit V = a + s C.
                let n = pts.len() as f64;
                let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
                let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
                let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
                let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
                let s = sxy / sxx;
                let a = my - s * mx;
                let resid = pts
                    .iter()
                    .map(|p| (p.1 - a - s * p.0).abs())
                    .fold(0.0f64, f64::max);
                let vmax = pts.iter().map(|p| p.1).fold(0.0f64, f64::max);
                println!("{id}: s={s:.3} resid={resid:.1} (vs 20% of {vmax:.1} = {:.1})", 0.2 * vmax);
            }
        }
        "c7" => {
            let t = 1u64 << 14;
            let config = c7_env(t, 128.0);
            for beta in [0.3, 0.5, 0.7] {
                let start = std::time::Instant::now();
                let (r, v, fb, c) = mean_metrics(&config, AlgorithmId::Expopt, beta, seeds);
                println!(
                    "beta={beta}: C={c:.0} mean R={r:.1} V={v:.1} fb={fb} ({:.1?})",
                    start.elapsed()
                );
            }
        }
        "opt" => {
            for (name, config) in [("c5", c5_env(1 << 12, 0.0)), ("c7", c7_env(1 << 12, 0.0))] {
                let mut rng = RngStream::new(0);
                let inst = build_instance(&config, &mut rng).unwrap();
                let sol = solve_opt(&inst).unwrap();
                println!(
                    "{name}: OPT/T={:.4} x*={:?} rho={:.3} rho_arm={:.3} (arm {})",
                    sol.opt_value / inst.horizon as f64,
                    sol.opt_strategy.probs(),
                    sol.rho,
                    sol.rho_arm_value,
                    sol.rho_arm
                );
            }
        }
        other => eprintln!("unknown mode {other}"),
    }
}
