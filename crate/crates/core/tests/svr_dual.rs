use rand::Rng;
use sentitrend_core::kernel::KernelSpec;
use sentitrend_core::svr::{build_lagged, recover_intercept, solve_dual, LaggedDataset, SvrParams};
use sentitrend_oracles::linalg::{gaussian_kernel, linear_kernel};
use sentitrend_oracles::qp::solve_svr_dual;
use sentitrend_oracles::random::{rng, uniform_vec};

fn oracle_gram(data: &LaggedDataset, kernel: KernelSpec) -> Vec<Vec<f64>> {
    data.regressors
        .iter()
        .map(|u| {
            data.regressors
                .iter()
                .map(|v| match kernel {
                    KernelSpec::Linear => linear_kernel(u, v),
                    KernelSpec::Gaussian { bandwidth } => gaussian_kernel(u, v, bandwidth),
                })
                .collect()
        })
        .collect()
}

fn random_case(seed: u64) -> (LaggedDataset, KernelSpec, SvrParams) {
    let mut r = rng(seed);
    let lag = r.gen_range(1..=2);
    let samples = r.gen_range(3..=7);
    let series = uniform_vec(&mut r, samples + lag, 0.0, 1.0);
    let data = build_lagged(&series, lag).unwrap();
    let kernel = if r.gen_bool(0.5) {
        KernelSpec::Linear
    } else {
        KernelSpec::gaussian(r.gen_range(0.1..2.0)).unwrap()
    };
    let params = SvrParams { c: r.gen_range(0.1..10.0), eps: r.gen_range(0.0..0.1), ..Default::default() };
    (data, kernel, params)
}

#[test]
fn dual_objective_matches_projected_gradient_oracle() {
    let mut worst = 0.0f64;
    for seed in 0..60 {
        let (data, kernel, params) = random_case(seed);
        let fit = solve_dual(&data, kernel, params).unwrap();
        let oracle = solve_svr_dual(&oracle_gram(&data, kernel), &data.targets, params.c, params.eps, 200_000);
        let gap = (fit.diagnostics.dual_objective - oracle.dual_objective).abs();
        worst = worst.max(gap);
        assert!(gap <= 1e-6, "seed {seed}: smo {} oracle {} ({} iters)", fit.diagnostics.dual_objective, oracle.dual_objective, oracle.iterations);
    }
    eprintln!("worst gap {worst:e}");
}

#[test]
fn linear_series_recovers_slope_and_intercept() {
    let data = build_lagged(&[1.0, 2.0, 3.0, 4.0], 1).unwrap();
    let fit = solve_dual(&data, KernelSpec::Linear, SvrParams { c: 100.0, eps: 0.01, ..Default::default() }).unwrap();
    let w = fit.weights().unwrap();
    assert!((w[0] - 1.0).abs() < 0.05, "{w:?}");
    assert!((fit.intercept - 1.0).abs() < 0.05, "{}", fit.intercept);
    let next = fit.predict(&[4.0]).unwrap();
    assert!((next - 5.0).abs() < 0.1, "{next}");
}

#[test]
fn invariants_hold_on_random_instances() {
    for seed in 100..160 {
        let (data, kernel, params) = random_case(seed);
        let fit = solve_dual(&data, kernel, params).unwrap();
        let beta = fit.beta();
        assert!(beta.iter().sum::<f64>().abs() <= 1e-8);
        for t in 0..data.len() {
            assert!(fit.alpha[t].min(fit.alpha_star[t]) == 0.0);
            assert!((0.0..=params.c).contains(&fit.alpha[t]));
            assert!((0.0..=params.c).contains(&fit.alpha_star[t]));
        }
        let cs = fit.complementary_slackness(&data).unwrap();
        assert!(cs <= 1e-6, "seed {seed}: complementary slackness {cs:e}");
        let d = &fit.diagnostics;
        for w in d.dual_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "seed {seed}: dual decreased");
        }
        for (p, q) in d.primal_trace.iter().zip(&d.dual_trace) {
            assert!(p + 1e-9 >= *q, "seed {seed}: weak duality violated {p} < {q}");
        }
        assert!(d.primal_objective - d.dual_objective <= 1e-6, "seed {seed}: gap {}", d.primal_objective - d.dual_objective);
    }
}

#[test]
fn kernel_expansion_equals_explicit_weights_for_linear_kernel() {
    for seed in 200..240 {
        let (data, _, params) = random_case(seed);
        let fit = solve_dual(&data, KernelSpec::Linear, params).unwrap();
        let w = fit.weights().unwrap();
        let mut r = rng(seed);
        for _ in 0..5 {
            let q = uniform_vec(&mut r, data.lag, -2.0, 2.0);
            let explicit: f64 = w.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() + fit.intercept;
            assert!((fit.predict(&q).unwrap() - explicit).abs() <= 1e-10);
        }
    }
}

/// Noiseless AR(1) series `Z_t = a Z_{t−1} + b`, started away from the fixed
/// point so the lag values spread over a range comparable to their magnitude.
fn ar1_series(a: f64, b: f64, offset: f64, len: usize) -> Vec<f64> {
    let fixed = b / (1.0 - a);
    let mut z = vec![fixed + offset * (1.0 + fixed.abs())];
    while z.len() < len {
        z.push(a * z[z.len() - 1] + b);
    }
    z
}

#[test]
fn noiseless_ar1_is_recovered() {
    let mut r = rng(7);
    let params = SvrParams { c: 1e4, eps: 0.001, ..Default::default() };
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = r.gen_range(-0.9..0.9);
        let b = r.gen_range(-1.0..1.0);
        let offset = if r.gen_bool(0.5) { 1.0 } else { -1.0 } * r.gen_range(2.0..4.0);
        let data = build_lagged(&ar1_series(a, b, offset, 8), 1).unwrap();
        let fit = solve_dual(&data, KernelSpec::Linear, params).unwrap();
        let w = fit.weights().unwrap()[0];
        worst = worst.max((w - a).abs()).max((fit.intercept - b).abs());
        assert!((w - a).abs() <= 0.01 && (fit.intercept - b).abs() <= 0.01, "a={a} b={b}: got {w} {}", fit.intercept);
    }
    eprintln!("worst recovery error {worst:e}");
}

#[test]
fn empty_support_set_uses_mean_target() {
    // every target lies inside the tube around the mean
    let data = build_lagged(&[0.50, 0.52, 0.49, 0.51, 0.50], 1).unwrap();
    let params = SvrParams { c: 1.0, eps: 0.1, ..Default::default() };
    let fit = solve_dual(&data, KernelSpec::Linear, params).unwrap();
    assert!(fit.support_set.is_empty());
    assert!(fit.beta().iter().all(|&b| b == 0.0));
    let mean = data.targets.iter().sum::<f64>() / data.len() as f64;
    assert_eq!(fit.intercept, mean);
    // the mean minimizes the primal over W₀ when W = 0: scan a grid
    let primal = |w0: f64| -> f64 {
        data.targets.iter().map(|y| ((y - w0).abs() - params.eps).max(0.0)).sum::<f64>() * params.c
    };
    let at_mean = primal(mean);
    for i in -200..=200 {
        let w0 = mean + i as f64 * 0.005;
        assert!(primal(w0) >= at_mean);
    }
    assert_eq!(recover_intercept(&data, KernelSpec::Linear, &fit.beta(), params.c, params.eps).unwrap(), mean);
}

#[test]
fn large_c_interpolates_linear_series() {
    let data = build_lagged(&ar1_series(0.5, 0.2, 3.0, 8), 1).unwrap();
    let fit = solve_dual(&data, KernelSpec::Linear, SvrParams { c: 1e6, eps: 0.0, ..Default::default() }).unwrap();
    for (x, y) in data.regressors.iter().zip(&data.targets) {
        assert!((fit.predict(x).unwrap() - y).abs() < 1e-3);
    }
}
