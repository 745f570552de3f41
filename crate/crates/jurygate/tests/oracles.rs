//! Cross-checks of the analytic and simulated paths against independent
//! oracles: naive non-log summation, exact binomial tail masses, linear-scan
//! gate thresholds, and exhaustive enumeration of tiny processes.

use jurygate::analytics::{bound_report, publish_probability};
use jurygate::belief::{BetaBelief, GateParams};
use jurygate::montecarlo::{simulate, SimConfig};
use jurygate::population::{build_scenario, AgentSpec, Population, Scenario};
use jurygate::GroundTruth;

fn agent(p: f64, prior: (f64, f64), p_crit: f64, tau: f64, force: bool) -> AgentSpec {
    AgentSpec::new(
        p,
        BetaBelief::new(prior.0, prior.1).unwrap(),
        GateParams::new(p_crit, tau, force).unwrap(),
    )
    .unwrap()
}

/// Binomial coefficient in plain f64 arithmetic; exact for the small n used
/// by the oracles.
fn binom_coeff(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 1..=k {
        c = c * (n - k + i) as f64 / i as f64;
    }
    c
}

fn gate_opens(a: &AgentSpec, n: u32, k: u32) -> bool {
    let post = BetaBelief::new(
        a.prior().alpha() + k as f64,
        a.prior().beta() + (n - k) as f64,
    )
    .unwrap();
    post.gate(a.gate()).unwrap()
}

/// Direct, non-log indicator sum over learning histories.
fn naive_publish_probability(a: &AgentSpec, horizon_t: u32) -> f64 {
    let n = horizon_t - 1;
    (0..=n)
        .filter(|&k| gate_opens(a, n, k))
        .map(|k| binom_coeff(n, k) * a.p().powi(k as i32) * (1.0 - a.p()).powi((n - k) as i32))
        .sum()
}

/// First success count that opens the gate, by linear scan.
fn linear_scan_k_star(a: &AgentSpec, horizon_t: u32) -> Option<u32> {
    let n = horizon_t - 1;
    (0..=n).find(|&k| gate_opens(a, n, k))
}

/// Upper-tail binomial mass at and above `k_star`.
fn binomial_tail(n: u32, k_star: u32, p: f64) -> f64 {
    (k_star..=n)
        .map(|k| binom_coeff(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .sum()
}

/// A spread of gated agents exercising priors, thresholds, and horizons.
fn oracle_agents() -> Vec<(AgentSpec, u32)> {
    vec![
        (agent(0.75, (1.0, 1.0), 0.5, 0.5, false), 20),
        (agent(0.35, (1.0, 1.0), 0.5, 0.5, false), 20),
        (agent(0.55, (1.0, 1.0), 0.5, 0.5, false), 20),
        (agent(0.75, (2.0, 6.0), 0.5, 0.5, false), 20),
        (agent(0.35, (5.2, 2.8), 0.5, 0.5, false), 20),
        (agent(0.6, (0.3, 0.7), 0.4, 0.25, false), 25),
        (agent(0.9, (2.5, 0.5), 0.7, 0.8, false), 12),
        (agent(0.2, (1.0, 3.0), 0.5, 0.1, false), 7),
        (agent(0.5, (1.0, 1.0), 0.5, 0.95, false), 2),
    ]
}

#[test]
fn log_space_sum_matches_naive_sum() {
    for (a, t) in oracle_agents() {
        let contrib = publish_probability(&a, t).unwrap();
        let oracle = naive_publish_probability(&a, t);
        assert!(
            (contrib.q - oracle).abs() <= 1e-12,
            "p = {}, T = {t}: log-space {} vs naive {oracle}",
            a.p(),
            contrib.q
        );
        assert!((contrib.c - (2.0 * a.p() - 1.0) * contrib.q).abs() <= 1e-15);
    }
}

#[test]
fn binary_search_threshold_matches_linear_scan() {
    for (a, t) in oracle_agents() {
        let contrib = publish_probability(&a, t).unwrap();
        assert_eq!(contrib.k_star, linear_scan_k_star(&a, t), "p = {}", a.p());
    }
    // Randomized sweep over the gate parameter space.
    for &p in &[0.2, 0.5, 0.8] {
        for &prior in &[(1.0, 1.0), (2.0, 6.0), (5.2, 2.8), (0.3, 0.7)] {
            for &tau in &[0.0, 0.25, 0.5, 0.9, 0.99] {
                for &t in &[2u32, 5, 20] {
                    let a = agent(p, prior, 0.5, tau, false);
                    let contrib = publish_probability(&a, t).unwrap();
                    assert_eq!(
                        contrib.k_star,
                        linear_scan_k_star(&a, t),
                        "p = {p}, prior = {prior:?}, tau = {tau}, T = {t}"
                    );
                }
            }
        }
    }
}

#[test]
fn publish_probability_equals_tail_mass_at_the_threshold() {
    for (a, t) in oracle_agents() {
        let contrib = publish_probability(&a, t).unwrap();
        match contrib.k_star {
            Some(k_star) => {
                let tail = binomial_tail(t - 1, k_star, a.p());
                assert!(
                    (contrib.q - tail).abs() <= 1e-12,
                    "p = {}, T = {t}: q {} vs tail {tail}",
                    a.p(),
                    contrib.q
                );
            }
            None => assert_eq!(contrib.q, 0.0),
        }
    }
}

#[test]
fn contributions_do_not_depend_on_evaluation_order() {
    let pop = build_scenario(Scenario::ContraryPriors, 20, 20, 0.5, 0.5).unwrap();
    let in_order: Vec<_> = pop
        .agents()
        .iter()
        .map(|a| publish_probability(a, 20).unwrap())
        .collect();
    // Evaluate in a scrambled order and place results back by index.
    let mut indices: Vec<usize> = (0..pop.len()).collect();
    indices.reverse();
    indices.swap(3, 11);
    indices.swap(0, 17);
    let mut scrambled = vec![None; pop.len()];
    for &i in &indices {
        scrambled[i] = Some(publish_probability(&pop.agents()[i], 20).unwrap());
    }
    for (a, b) in in_order.iter().zip(&scrambled) {
        assert_eq!(*a, b.unwrap());
    }
}

/// Frozen goldens for the reference heterogeneous pool (T = 20, tau = 0.5,
/// p_critical = 0.5, N = 50), cross-checked above against the naive oracle.
#[test]
fn heterogeneous_pool_regression_goldens() {
    let t = 20;
    let weak = agent(0.35, (1.0, 1.0), 0.5, 0.5, false);
    let strong = agent(0.75, (1.0, 1.0), 0.5, 0.5, false);
    let q_weak = publish_probability(&weak, t).unwrap();
    let q_strong = publish_probability(&strong, t).unwrap();

    assert!((q_weak.q - 0.08747360037017354).abs() <= 1e-12);
    assert!((q_strong.q - 0.9910967206960776).abs() <= 1e-12);
    assert_eq!(q_weak.k_star, Some(10));
    assert_eq!(q_strong.k_star, Some(10));

    let pop = build_scenario(Scenario::Heterogeneous, 50, t, 0.5, 0.5).unwrap();
    let report = bound_report(&pop, GroundTruth::Valid).unwrap();
    assert!((report.expected_margin - 11.732657005924668).abs() <= 1e-10);
    assert!((report.variance_budget - 361.5).abs() <= 1e-10);
    assert!((report.success_lower_bound - 0.17336705643726324).abs() <= 1e-10);

    let baseline = build_scenario(Scenario::NeverAbstain, 50, t, 0.5, 0.5).unwrap();
    let baseline_report = bound_report(&baseline, GroundTruth::Valid).unwrap();
    assert!((baseline_report.success_lower_bound - 0.03398715389368945).abs() <= 1e-10);
    assert!(report.success_lower_bound > baseline_report.success_lower_bound);
}

/// Exact success probability by exhaustive enumeration of every
/// (learning-outcome, final-vote) combination.
fn exact_success_probability(pop: &Population, ground_truth: GroundTruth) -> f64 {
    let n = (pop.horizon_t() - 1) as usize;
    let bits_per_agent = n + 1;
    let total_bits = bits_per_agent * pop.len();
    assert!(total_bits <= 20, "enumeration oracle is for tiny processes");
    let correct_side: i64 = match ground_truth {
        GroundTruth::Valid => 1,
        GroundTruth::Invalid => -1,
    };
    let mut success = 0.0;
    for combo in 0u64..(1 << total_bits) {
        let mut prob = 1.0;
        let mut net = 0i64;
        for (i, agent) in pop.agents().iter().enumerate() {
            let base = i * bits_per_agent;
            let mut belief = agent.prior();
            for t in 0..n {
                let correct = (combo >> (base + t)) & 1 == 1;
                prob *= if correct { agent.p() } else { 1.0 - agent.p() };
                belief = belief.update(correct);
            }
            let final_correct = (combo >> (base + n)) & 1 == 1;
            prob *= if final_correct {
                agent.p()
            } else {
                1.0 - agent.p()
            };
            if belief.gate(agent.gate()).unwrap() {
                net += if final_correct {
                    correct_side
                } else {
                    -correct_side
                };
            }
        }
        if net > 0 {
            success += prob;
        }
    }
    success
}

#[test]
fn simulator_agrees_with_exhaustive_enumeration() {
    let pop = Population::new(
        vec![
            agent(0.35, (1.0, 1.0), 0.5, 0.5, false),
            agent(0.75, (1.0, 1.0), 0.5, 0.5, false),
            agent(0.75, (2.0, 6.0), 0.5, 0.25, false),
        ],
        4,
    )
    .unwrap();
    let exact = exact_success_probability(&pop, GroundTruth::Valid);
    let runs = 20_000;
    let result = simulate(
        &pop,
        &SimConfig {
            runs,
            seed: 13,
            ground_truth: GroundTruth::Valid,
        },
    )
    .unwrap();
    let sigma = (exact * (1.0 - exact) / runs as f64).sqrt();
    assert!(
        (result.empirical_success - exact).abs() <= 4.0 * sigma,
        "exact {exact}, empirical {}, sigma {sigma}",
        result.empirical_success
    );
}

#[test]
fn empirical_publish_rates_track_analytic_q() {
    let pop = build_scenario(Scenario::Heterogeneous, 50, 20, 0.5, 0.5).unwrap();
    let analytic: Vec<f64> = pop
        .agents()
        .iter()
        .map(|a| publish_probability(a, 20).unwrap().q)
        .collect();
    let runs = 2000u64;
    let seeds = 10u64;
    let mut inside = 0usize;
    let mut total = 0usize;
    for seed in 0..seeds {
        let result = simulate(
            &pop,
            &SimConfig {
                runs,
                seed,
                ground_truth: GroundTruth::Valid,
            },
        )
        .unwrap();
        for (rate, q) in result.publish_rate_per_agent.iter().zip(&analytic) {
            let band = 4.0 * (q * (1.0 - q) / runs as f64).sqrt();
            total += 1;
            if (rate - q).abs() <= band {
                inside += 1;
            }
        }
    }
    assert!(
        inside as f64 >= 0.95 * total as f64,
        "only {inside}/{total} agent publish rates within the 4-sigma band"
    );
}
