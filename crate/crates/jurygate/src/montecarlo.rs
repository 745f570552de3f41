//! Seeded Monte Carlo simulation of the full sequential process: learning
//! draws, belief updates, decision-round gating, final private votes, and the
//! majority tally with ties as non-wins.
//!
//! Reproducibility contract: run `r` of a simulation draws from a ChaCha8
//! stream keyed by the master seed with stream id `r`. Within a run the
//! learning phase consumes one uniform per (round, agent) in round-major
//! order, then each publishing agent consumes one uniform for its final vote
//! in agent order. Runs execute concurrently and are merged with
//! order-independent integer accumulators, so results are bitwise identical
//! across executions and across thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::belief::BetaBelief;
use crate::error::{Error, Result};
use crate::population::Population;
use crate::GroundTruth;

/// Simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Number of independent runs; must be at least 1.
    pub runs: u64,
    /// Master seed; every derived quantity is a pure function of it.
    pub seed: u64,
    /// Truth assignment of the final task.
    pub ground_truth: GroundTruth,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            runs: 2000,
            seed: 0,
            ground_truth: GroundTruth::Valid,
        }
    }
}

/// Aggregate outcome of a seeded simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub runs: u64,
    /// Runs in which the positive alternative took a strictly positive net
    /// vote. Under [`GroundTruth::Invalid`] this counts hallucinations.
    pub wins: u64,
    /// `wins / runs`.
    pub empirical_success: f64,
    /// Fraction of runs in which each agent published, in agent order.
    pub publish_rate_per_agent: Vec<f64>,
    /// Wilson 95% score interval on `empirical_success`.
    pub wilson_ci95: (f64, f64),
    /// Echo of the master seed.
    pub seed: u64,
}

/// One sampled point on an agent's confidence trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// Round index, 1-based; the last round is the decision round.
    pub t: u32,
    /// Confidence of the pre-decision belief at `t`.
    pub confidence: f64,
    /// Gate decision the agent would take at `t`.
    pub published: bool,
}

/// RNG for one run: the master seed keys the cipher, the run index selects
/// the stream.
fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// Tabulated gate decisions per agent and learning success count.
///
/// The post-learning posterior depends only on how many of the `T - 1`
/// outcomes were correct, so each agent has `T` reachable posteriors. The
/// table replays the pseudo-count updates rather than adding totals, keeping
/// every tabulated posterior bitwise identical to the one a run reaches.
fn gate_table(pop: &Population) -> Result<Vec<Vec<bool>>> {
    let n_rounds = pop.horizon_t() - 1;
    pop.agents()
        .iter()
        .map(|agent| {
            (0..=n_rounds)
                .map(|k| {
                    let mut belief = agent.prior();
                    for _ in 0..k {
                        belief = belief.update(true);
                    }
                    for _ in 0..(n_rounds - k) {
                        belief = belief.update(false);
                    }
                    belief.gate(agent.gate())
                })
                .collect()
        })
        .collect()
}

/// Simulate the full sequential process.
///
/// Per run: beliefs start from the priors; for each of the `T - 1` learning
/// rounds every agent draws a Bernoulli(p) correctness outcome and updates;
/// the gate is evaluated on the post-learning belief; each publishing agent
/// casts a final vote that lands on the correct side with probability `p`.
/// The correct side is `+1` under [`GroundTruth::Valid`] and `-1` under
/// [`GroundTruth::Invalid`]. A win requires a strictly positive net vote.
pub fn simulate(pop: &Population, cfg: &SimConfig) -> Result<SimResult> {
    if cfg.runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    let n_agents = pop.len();
    let n_rounds = pop.horizon_t() - 1;
    let gate_open = gate_table(pop)?;
    let ps: Vec<f64> = pop.agents().iter().map(|a| a.p()).collect();
    let correct_vote: i64 = match cfg.ground_truth {
        GroundTruth::Valid => 1,
        GroundTruth::Invalid => -1,
    };

    let (wins, publish_counts) = (0..cfg.runs)
        .into_par_iter()
        .fold(
            || (0u64, vec![0u64; n_agents]),
            |(mut wins, mut published), run| {
                let mut rng = run_rng(cfg.seed, run);
                let mut successes = vec![0u32; n_agents];
                for _ in 0..n_rounds {
                    for (i, p) in ps.iter().enumerate() {
                        if rng.random::<f64>() < *p {
                            successes[i] += 1;
                        }
                    }
                }
                let mut net: i64 = 0;
                for (i, p) in ps.iter().enumerate() {
                    if gate_open[i][successes[i] as usize] {
                        published[i] += 1;
                        let correct = rng.random::<f64>() < *p;
                        net += if correct { correct_vote } else { -correct_vote };
                    }
                }
                if net > 0 {
                    wins += 1;
                }
                (wins, published)
            },
        )
        .reduce(
            || (0u64, vec![0u64; n_agents]),
            |(w1, p1), (w2, p2)| (w1 + w2, p1.iter().zip(&p2).map(|(a, b)| a + b).collect()),
        );

    let runs_f = cfg.runs as f64;
    Ok(SimResult {
        runs: cfg.runs,
        wins,
        empirical_success: wins as f64 / runs_f,
        publish_rate_per_agent: publish_counts.iter().map(|&c| c as f64 / runs_f).collect(),
        wilson_ci95: wilson_ci95(wins, cfg.runs),
        seed: cfg.seed,
    })
}

/// Fraction of runs in which the invalid alternative wins the tally.
///
/// Requires `cfg.ground_truth == GroundTruth::Invalid`: the measured event is
/// a strictly positive net vote while the truth is the negative alternative.
pub fn hallucination_rate(pop: &Population, cfg: &SimConfig) -> Result<f64> {
    if cfg.ground_truth != GroundTruth::Invalid {
        return Err(Error::InvalidArgument(
            "hallucination_rate requires ground_truth = Invalid".into(),
        ));
    }
    Ok(simulate(pop, cfg)?.empirical_success)
}

/// Confidence trajectory of one simulated run (stream 0 of `seed`): for each
/// agent, the confidence of the pre-decision belief and the gate decision at
/// every round `t = 1..=T`.
///
/// Learning-phase gate decisions are recorded for plotting only; they never
/// affect state, since feedback is observed regardless of abstention.
pub fn trace_confidence(pop: &Population, seed: u64) -> Result<Vec<Vec<TracePoint>>> {
    let agents = pop.agents();
    let horizon_t = pop.horizon_t();
    let mut rng = run_rng(seed, 0);
    let mut beliefs: Vec<BetaBelief> = agents.iter().map(|a| a.prior()).collect();
    let mut series: Vec<Vec<TracePoint>> = (0..agents.len())
        .map(|_| Vec::with_capacity(horizon_t as usize))
        .collect();
    for t in 1..=horizon_t {
        for (i, agent) in agents.iter().enumerate() {
            let confidence = beliefs[i].confidence(agent.gate().p_critical())?;
            let published = agent.gate().force_publish() || confidence > agent.gate().tau_abstain();
            series[i].push(TracePoint {
                t,
                confidence,
                published,
            });
        }
        if t < horizon_t {
            for (i, agent) in agents.iter().enumerate() {
                let correct = rng.random::<f64>() < agent.p();
                beliefs[i] = beliefs[i].update(correct);
            }
        }
    }
    Ok(series)
}

fn wilson_ci95(wins: u64, runs: u64) -> (f64, f64) {
    const Z: f64 = 1.96;
    let n = runs as f64;
    let p_hat = wins as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = Z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The score interval contains the point estimate in exact arithmetic;
    // the clips keep that true under rounding at the endpoints.
    let lo = (center - half).max(0.0).min(p_hat);
    let hi = (center + half).min(1.0).max(p_hat);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{BetaBelief, GateParams};
    use crate::population::{build_scenario, AgentSpec, Scenario};

    fn forced_pool(ps: &[f64], horizon_t: u32) -> Population {
        let agents = ps
            .iter()
            .map(|&p| {
                AgentSpec::new(
                    p,
                    BetaBelief::new(1.0, 1.0).unwrap(),
                    GateParams::new(0.5, 0.5, true).unwrap(),
                )
                .unwrap()
            })
            .collect();
        Population::new(agents, horizon_t).unwrap()
    }

    #[test]
    fn perfect_forced_agent_always_wins() {
        let pop = forced_pool(&[1.0], 5);
        for seed in [0, 1, 99] {
            let cfg = SimConfig {
                runs: 64,
                seed,
                ground_truth: GroundTruth::Valid,
            };
            assert_eq!(simulate(&pop, &cfg).unwrap().empirical_success, 1.0);
        }
    }

    #[test]
    fn hopeless_forced_agent_never_wins() {
        let pop = forced_pool(&[0.0], 5);
        let cfg = SimConfig {
            runs: 64,
            seed: 3,
            ground_truth: GroundTruth::Valid,
        };
        assert_eq!(simulate(&pop, &cfg).unwrap().empirical_success, 0.0);
    }

    #[test]
    fn rejects_zero_runs() {
        let pop = forced_pool(&[0.5], 5);
        let cfg = SimConfig {
            runs: 0,
            ..SimConfig::default()
        };
        assert!(matches!(
            simulate(&pop, &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let pop = build_scenario(Scenario::Heterogeneous, 10, 10, 0.5, 0.5).unwrap();
        let cfg = SimConfig {
            runs: 500,
            seed: 42,
            ground_truth: GroundTruth::Valid,
        };
        let a = simulate(&pop, &cfg).unwrap();
        let b = simulate(&pop, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let pop = build_scenario(Scenario::Heterogeneous, 10, 10, 0.5, 0.5).unwrap();
        let cfg = SimConfig {
            runs: 400,
            seed: 7,
            ground_truth: GroundTruth::Valid,
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate(&pop, &cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| simulate(&pop, &cfg).unwrap());
        assert_eq!(single, many);
    }

    #[test]
    fn hallucination_trivial_cases() {
        let cfg = SimConfig {
            runs: 64,
            seed: 11,
            ground_truth: GroundTruth::Invalid,
        };
        // Nobody errs: no hallucination.
        assert_eq!(
            hallucination_rate(&forced_pool(&[1.0, 1.0, 1.0], 4), &cfg).unwrap(),
            0.0
        );
        // Everybody errs and N is odd: the wrong side wins every run.
        assert_eq!(
            hallucination_rate(&forced_pool(&[0.0, 0.0, 0.0], 4), &cfg).unwrap(),
            1.0
        );
    }

    #[test]
    fn hallucination_rate_rejects_the_wrong_frame() {
        let pop = forced_pool(&[0.5], 4);
        let cfg = SimConfig {
            runs: 8,
            seed: 0,
            ground_truth: GroundTruth::Valid,
        };
        assert!(matches!(
            hallucination_rate(&pop, &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn label_symmetry_on_odd_forced_pools() {
        // With an odd forced pool there are no ties, and flipping the truth
        // assignment negates every net vote run-by-run, so wins under the two
        // frames partition the runs exactly.
        let pop = forced_pool(&[0.35, 0.75, 0.75], 6);
        let runs = 800;
        let valid = simulate(
            &pop,
            &SimConfig {
                runs,
                seed: 21,
                ground_truth: GroundTruth::Valid,
            },
        )
        .unwrap();
        let invalid = simulate(
            &pop,
            &SimConfig {
                runs,
                seed: 21,
                ground_truth: GroundTruth::Invalid,
            },
        )
        .unwrap();
        assert_eq!(valid.wins + invalid.wins, runs);
        // The gate never sees the truth assignment.
        assert_eq!(valid.publish_rate_per_agent, invalid.publish_rate_per_agent);
    }

    #[test]
    fn weak_agents_publish_less_often() {
        let pop = build_scenario(Scenario::Heterogeneous, 50, 20, 0.5, 0.5).unwrap();
        let cfg = SimConfig {
            runs: 2000,
            seed: 5,
            ground_truth: GroundTruth::Valid,
        };
        let result = simulate(&pop, &cfg).unwrap();
        let (weak, strong) = result.publish_rate_per_agent.split_at(25);
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(mean(weak) < mean(strong));
    }

    #[test]
    fn trace_shape_and_uniform_prior_start() {
        let pop = build_scenario(Scenario::Heterogeneous, 4, 10, 0.5, 0.5).unwrap();
        let series = trace_confidence(&pop, 9).unwrap();
        assert_eq!(series.len(), 4);
        for agent_series in &series {
            assert_eq!(agent_series.len(), 10);
            assert_eq!(agent_series[0].t, 1);
            assert!((agent_series[0].confidence - 0.5).abs() <= 1e-12);
            for point in agent_series {
                assert!((0.0..=1.0).contains(&point.confidence));
            }
        }
    }

    #[test]
    fn trace_replays_the_documented_stream() {
        let pop = build_scenario(Scenario::Heterogeneous, 6, 20, 0.5, 0.5).unwrap();
        let seed = 77;
        let series = trace_confidence(&pop, seed).unwrap();

        // Reproduce the learning draws: stream 0, round-major then agent.
        let mut rng = run_rng(seed, 0);
        let n_agents = pop.len();
        let mut beliefs: Vec<BetaBelief> = pop.agents().iter().map(|a| a.prior()).collect();
        for _ in 1..pop.horizon_t() {
            for (i, agent) in pop.agents().iter().enumerate() {
                let correct = rng.random::<f64>() < agent.p();
                beliefs[i] = beliefs[i].update(correct);
            }
        }
        for i in 0..n_agents {
            let agent = &pop.agents()[i];
            let expected = beliefs[i].confidence(agent.gate().p_critical()).unwrap();
            let last = series[i].last().unwrap();
            assert_eq!(last.confidence, expected);
            assert_eq!(last.published, beliefs[i].gate(agent.gate()).unwrap());
        }
    }
}
