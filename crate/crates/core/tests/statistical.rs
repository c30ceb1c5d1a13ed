//! Statistical behavior of the approximate greedy operator: with no noise,
//! richer bases should not measure larger greedy errors on average.

use apilab::garnet::{generate_garnet, GarnetParams};
use apilab::greedy::{approx_greedy, BasisKind, GreedyConfig, NoiseMode};
use apilab::mdp::{policy_value, DeterministicPolicy, Distribution};
use apilab::rng::StreamKey;

/// One-sided sign test: probability of seeing `wins` or more successes out
/// of `n` fair coin flips.
fn sign_test_p_value(wins: u64, n: u64) -> f64 {
    let log_half = 0.5f64.ln();
    let mut p = 0.0;
    for k in wins..=n {
        // log C(n, k) via lgamma-free accumulation.
        let mut log_c = 0.0;
        for i in 0..k {
            log_c += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
        }
        p += (log_c + n as f64 * log_half).exp();
    }
    p.min(1.0)
}

#[test]
fn epsilon_is_monotone_in_basis_fidelity_on_average() {
    let low = GreedyConfig {
        basis: BasisKind::Fourier,
        n_coeffs: 3,
        noise_amplitude: 0.0,
        noise_mode: NoiseMode::Relative,
    };
    let high = GreedyConfig {
        basis: BasisKind::Fourier,
        n_coeffs: 15,
        noise_amplitude: 0.0,
        noise_mode: NoiseMode::Relative,
    };
    let mut wins = 0u64;
    let mut losses = 0u64;
    let draws = 40;
    for seed in 0..draws {
        let params = GarnetParams::new(20, 2, 2, 2, 1000 + seed).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.95, 1.0).unwrap();
        let nu = Distribution::uniform(20);
        let v = policy_value(&mdp, &DeterministicPolicy::constant(20, 0)).unwrap();
        let stream = StreamKey::new(seed);
        let eps_low = approx_greedy(&mdp, &nu, &v, &low, None, stream, 0)
            .unwrap()
            .measurement
            .epsilon;
        let eps_high = approx_greedy(&mdp, &nu, &v, &high, None, stream, 0)
            .unwrap()
            .measurement
            .epsilon;
        if eps_high < eps_low - 1e-12 {
            wins += 1;
        } else if eps_high > eps_low + 1e-12 {
            losses += 1;
        }
    }
    let n = wins + losses;
    assert!(n >= 10, "too many ties ({wins} wins, {losses} losses) for a sign test");
    let p = sign_test_p_value(wins, n);
    assert!(
        p < 0.05,
        "richer basis not significantly better: {wins} wins / {losses} losses, p = {p:.4}"
    );
}

#[test]
fn sign_test_helper_is_sane() {
    // 9 wins out of 10 fair flips has probability just above 1 percent.
    let p = sign_test_p_value(9, 10);
    assert!((p - 11.0 / 1024.0).abs() < 1e-12);
    assert!(sign_test_p_value(5, 10) > 0.5);
}
