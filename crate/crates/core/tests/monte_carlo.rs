//! Analytic quantities checked against the Monte Carlo oracle.

use gmwb_core::hitting::{
    cdf_a, density_h_second, laplace_h, laplace_h_increment, DiffusionParams, YorParams,
};
use gmwb_core::mc::{
    simulate_a, simulate_gmwb, simulate_hitting_h, simulate_hitting_h_levels, simulate_hitting_tau,
    simulate_passage, simulate_x, McConfig,
};
use gmwb_core::gmwb::table_template;
use gmwb_core::quad::{integrate_finite, QuadConfig};
use gmwb_core::stats::{chi_square, ks_two_sample, Estimate};

fn cfg(n: usize, dt: f64, seed: u64) -> McConfig {
    McConfig { n_paths: n, dt, seed, ..McConfig::default() }
}

#[test]
fn laplace_of_h_against_simulation() {
    let p = YorParams::new(1.0, 0.5).unwrap();
    let s = simulate_hitting_h(1.0, 0.5, &cfg(100_000, 1e-3, 1)).unwrap();
    let est = s.estimate(false, |t| (-t).exp());
    assert!(est.within(laplace_h(&p, 1.0).unwrap(), 3.0), "{est:?}");
}

#[test]
fn increment_transform_against_simulation() {
    let p = YorParams::new(1.0, 0.8).unwrap();
    let hs = simulate_hitting_h_levels(1.0, &[0.3, 0.8], &cfg(100_000, 1e-3, 2)).unwrap();
    let xs: Vec<f64> = hs[0].times.iter().zip(&hs[1].times).map(|(a, b)| (-(b - a)).exp()).collect();
    let est = Estimate::from_samples(&xs);
    let exact = laplace_h_increment(&p, 0.3, 0.8, 1.0).unwrap();
    assert!(est.within(exact, 3.0), "{est:?} vs {exact}");
}

#[test]
fn cdf_of_a_against_simulation() {
    let xs = simulate_a(1.0, 0.2, &cfg(100_000, 1e-3, 3)).unwrap();
    let below: Vec<f64> = xs.iter().map(|&a| if a < 0.2 { 1.0 } else { 0.0 }).collect();
    let est = Estimate::from_samples(&below);
    let exact = cdf_a(1.0, 0.2, 0.2).unwrap();
    assert!(est.within(exact, 3.0), "{est:?} vs {exact}");
}

#[test]
fn histogram_of_h_against_density() {
    let p = YorParams::new(1.0, 0.5).unwrap();
    let s = simulate_hitting_h(1.0, 0.5, &cfg(100_000, 1e-3, 4)).unwrap();
    let edges: Vec<f64> = (0..=19).map(|k| 0.1 + 0.1 * k as f64).collect();
    let qc = QuadConfig::with_tolerances(1e-9, 1e-12);
    let mut probs = vec![integrate_finite(|u| density_h_second(&p, u).unwrap(), 0.0, edges[0], &qc).unwrap()];
    for w in edges.windows(2) {
        probs.push(integrate_finite(|u| density_h_second(&p, u).unwrap(), w[0], w[1], &qc).unwrap());
    }
    let inner: f64 = probs.iter().sum();
    probs.push(1.0 - inner);
    let mut counts = vec![0u64; probs.len()];
    for &t in &s.times {
        let k = edges.iter().position(|&e| t < e).unwrap_or(edges.len());
        counts[k] += 1;
    }
    let r = chi_square(&counts, &probs, 0).unwrap();
    assert!(r.p_value > 0.01, "{r:?}");
}

#[test]
fn ascending_process_matches_a_in_law() {
    let a = simulate_a(0.5, 0.6, &cfg(100_000, 1e-3, 5)).unwrap();
    let x = simulate_x(0.5, 0.6, &cfg(100_000, 1e-3, 6)).unwrap();
    let r = ks_two_sample(&a, &x).unwrap();
    assert!(r.p_value > 0.01, "{r:?}");
}

#[test]
fn time_change_of_diffusion_passage() {
    // τ^{(μ,σ)}_{y,0} has the law of (4/σ²)·τ^{(ν)}_{σ²y/4,0}
    let (mu, sigma, y) = (0.1, 0.5, 1.0);
    let nu = (2.0 * mu - sigma * sigma) / (sigma * sigma);
    let d = DiffusionParams::new(mu, sigma, y).unwrap();
    let direct = simulate_passage(&d, 0.0, &cfg(50_000, 4e-3, 7)).unwrap();
    let reduced = simulate_hitting_tau(nu, sigma * sigma * y / 4.0, &cfg(50_000, 1e-3, 8)).unwrap();
    let scaled: Vec<f64> = reduced.times.iter().map(|t| 4.0 / (sigma * sigma) * t).collect();
    let r = ks_two_sample(&direct.times, &scaled).unwrap();
    assert!(r.p_value > 0.01, "{r:?}");
}

#[test]
fn halving_the_step_stays_within_noise() {
    let mp = table_template(0.2, 0.05).with_fee(0.0029, 1.0);
    let coarse = simulate_gmwb(&mp, &cfg(100_000, 2e-3, 9)).unwrap();
    let fine = simulate_gmwb(&mp, &cfg(100_000, 1e-3, 9)).unwrap();
    for (a, b) in [
        (coarse.ruin_probability, fine.ruin_probability),
        (coarse.discounted_fund, fine.discounted_fund),
        (coarse.discounted_fund_integral, fine.discounted_fund_integral),
    ] {
        assert!((a.mean - b.mean).abs() <= 3.0 * b.std_error, "{a:?} vs {b:?}");
    }
}

#[test]
fn fair_cell_balances_the_policyholder_equation() {
    let mp = table_template(0.2, 0.05).with_fee(0.0029, 1.0);
    let e = simulate_gmwb(&mp, &cfg(200_000, 1e-3, 10)).unwrap();
    let lhs = Estimate {
        mean: e.discounted_fund.mean + mp.w * (1.0 - (-mp.r * mp.maturity()).exp()) / mp.r,
        ..e.discounted_fund
    };
    // the published fee is rounded to 1 bp, which moves G by well under 0.1
    assert!((lhs.mean - mp.g).abs() <= 3.0 * lhs.std_error + 0.1, "{lhs:?}");
}

#[test]
fn reproducible_across_worker_counts() {
    let c = cfg(5_000, 1e-3, 11);
    let par = simulate_gmwb(&table_template(0.3, 0.07), &c).unwrap();
    let seq = simulate_gmwb(&table_template(0.3, 0.07), &McConfig { parallel: false, ..c }).unwrap();
    assert_eq!(par, seq);
}
