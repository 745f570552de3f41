//! Closed-form quantities and certified bounds: the analytic publish
//! probability of each agent at the decision round, the expected net vote
//! margin, a concentration lower bound on collective success, the matching
//! upper bound on collective hallucination, and the explicit convergence
//! rate under a nondegenerate gate.

use crate::belief::BetaBelief;
use crate::error::{Error, Result};
use crate::population::{AgentSpec, Population};
use crate::specialfn::log_binomial;
use crate::GroundTruth;

/// Absolute slack used when verifying convergence premises. Certified values
/// routinely sit exactly on the premise boundary (a mean reliability of 0.55
/// checked against delta_p = 0.05), where bit-level comparison would reject
/// them.
const PREMISE_SLACK: f64 = 1e-9;

/// Analytic per-agent gate summary at the decision round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentContribution {
    /// Probability that the agent publishes at the decision round.
    pub q: f64,
    /// Expected contribution to the net vote: `(2p - 1) * q`.
    pub c: f64,
    /// Smallest learning success count that opens the gate; `None` when the
    /// gate never opens within the horizon.
    pub k_star: Option<u32>,
}

/// Expected margin, variance budget, and the certified bounds for one pool,
/// together with the convergence premises observed on it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Expected net vote for the correct alternative.
    pub expected_margin: f64,
    /// Sum over agents of `(T - 1)(2p - 1)^2 + 4`, the squared per-reveal
    /// deviation caps.
    pub variance_budget: f64,
    /// Lower bound on the probability that the correct alternative wins.
    /// Zero when the expected margin is not positive: the one-sided bound is
    /// vacuous there.
    pub success_lower_bound: f64,
    /// Upper bound on the probability that the invalid alternative wins.
    pub hallucination_upper_bound: f64,
    /// Convergence-rate lower bound at this pool's size, present when both
    /// premises hold.
    pub convergence_lower_bound: Option<f64>,
    /// Mean reliability strictly exceeds one half.
    pub delta_p_positive: bool,
    /// Every competent agent publishes with strictly positive probability.
    pub q_min_positive: bool,
}

/// Gate decision for the posterior reached after `k` successes in `n`
/// learning rounds.
fn gate_opens(agent: &AgentSpec, n: u32, k: u32) -> Result<bool> {
    let prior = agent.prior();
    let posterior = BetaBelief::new(prior.alpha() + k as f64, prior.beta() + (n - k) as f64)?;
    posterior.gate(agent.gate())
}

/// Smallest success count whose posterior clears the gate, located by binary
/// search: confidence is non-decreasing in the success count, so the open
/// region is an upper set of counts.
fn first_open_k(agent: &AgentSpec, n: u32) -> Result<Option<u32>> {
    if !gate_opens(agent, n, n)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0u32, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if gate_opens(agent, n, mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

/// Log binomial weight `ln C(n, k) p^k (1 - p)^(n - k)` for `0 < p < 1`.
fn log_weight(n: u32, k: u32, p: f64) -> Result<f64> {
    Ok(log_binomial(n as u64, k as u64)? + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln())
}

/// Sum of `exp(lw)` over the collected log weights, evaluated as a
/// log-sum-exp so extreme horizons cannot underflow.
fn sum_log_weights(log_weights: &[f64]) -> f64 {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return 0.0;
    }
    let sum: f64 = log_weights.iter().map(|lw| (lw - max).exp()).sum();
    (max + sum.ln()).exp()
}

/// Analytic publish probability and margin contribution of one agent at the
/// decision round of a horizon-`horizon_t` process.
///
/// Enumerates the `horizon_t - 1` learning successes `k = 0..=n`, forms the
/// posterior for each, evaluates the gate, and accumulates the binomial
/// weights of open histories in log space. A forced publisher has `q = 1`
/// and `k_star = 0` without enumeration.
pub fn publish_probability(agent: &AgentSpec, horizon_t: u32) -> Result<AgentContribution> {
    if horizon_t < 2 {
        return Err(Error::InvalidArgument(format!(
            "horizon_t must be at least 2, got {horizon_t}"
        )));
    }
    let p = agent.p();
    let margin = 2.0 * p - 1.0;
    if agent.gate().force_publish() {
        return Ok(AgentContribution {
            q: 1.0,
            c: margin,
            k_star: Some(0),
        });
    }
    let n = horizon_t - 1;
    let k_star = first_open_k(agent, n)?;

    // Degenerate reliabilities put all mass on a single history.
    if p == 0.0 || p == 1.0 {
        let k = if p == 0.0 { 0 } else { n };
        let q = if gate_opens(agent, n, k)? { 1.0 } else { 0.0 };
        return Ok(AgentContribution {
            q,
            c: margin * q,
            k_star,
        });
    }

    let mut open_log_weights = Vec::with_capacity((n + 1) as usize);
    for k in 0..=n {
        if gate_opens(agent, n, k)? {
            open_log_weights.push(log_weight(n, k, p)?);
        }
    }
    let q = sum_log_weights(&open_log_weights).min(1.0);
    Ok(AgentContribution {
        q,
        c: margin * q,
        k_star,
    })
}

/// Bounds for a pool via the per-agent contributions.
///
/// The gate depends only on each agent's correctness feedback, whose law is
/// fixed by the agent's reliability alone, so publish probabilities are
/// identical under either truth assignment and a single enumeration serves
/// both the success and the hallucination bound. The `condition` argument
/// records which frame the caller is reading.
pub fn bound_report(pop: &Population, condition: GroundTruth) -> Result<BoundReport> {
    let _ = condition;
    let horizon_t = pop.horizon_t();
    let mut expected_margin = 0.0;
    let mut variance_budget = 0.0;
    for agent in pop.agents() {
        expected_margin += publish_probability(agent, horizon_t)?.c;
        let margin = 2.0 * agent.p() - 1.0;
        variance_budget += (horizon_t - 1) as f64 * margin * margin + 4.0;
    }

    let exponent = expected_margin * expected_margin / (2.0 * variance_budget);
    // Shared tail mass: the success bound is its complement, the
    // hallucination bound is the tail itself.
    let tail = (-exponent).exp().min(1.0);
    let success_lower_bound = if expected_margin > 0.0 {
        1.0 - tail
    } else {
        0.0
    };

    let delta_p = pop.mean_p() - 0.5;
    let delta_p_positive = delta_p > 0.0;
    let q_min = match min_publish_over_competent(pop) {
        Ok(q) => Some(q),
        Err(Error::NoCompetentAgents) => None,
        Err(e) => return Err(e),
    };
    let q_min_positive = q_min.is_some_and(|q| q > 0.0);
    let convergence_lower_bound = match (delta_p_positive, q_min) {
        (true, Some(q)) if q > 0.0 => Some(convergence_rate(pop.len(), horizon_t, delta_p, q)),
        _ => None,
    };

    Ok(BoundReport {
        expected_margin,
        variance_budget,
        success_lower_bound,
        hallucination_upper_bound: tail,
        convergence_lower_bound,
        delta_p_positive,
        q_min_positive,
    })
}

fn convergence_rate(n_agents: usize, horizon_t: u32, delta_p: f64, q_min: f64) -> f64 {
    let exponent =
        2.0 * delta_p * delta_p * q_min * q_min * n_agents as f64 / (horizon_t as f64 + 3.0);
    -(-exponent).exp_m1()
}

/// Explicit convergence-rate lower bound
/// `1 - exp(-2 delta_p^2 q_min^2 N / (T + 3))` for caller-supplied premises.
///
/// Both premises are verified against the pool before the bound is granted:
/// the mean reliability must reach `0.5 + delta_p` and every competent agent
/// must publish with probability at least `q_min`. Verification allows
/// [`PREMISE_SLACK`] of float roundoff.
pub fn convergence_bound(pop: &Population, q_min: f64, delta_p: f64) -> Result<f64> {
    if !delta_p.is_finite() || delta_p <= 0.0 {
        return Err(Error::Domain(format!(
            "convergence_bound requires delta_p > 0, got {delta_p}"
        )));
    }
    if !q_min.is_finite() || q_min <= 0.0 || q_min > 1.0 {
        return Err(Error::Domain(format!(
            "convergence_bound requires q_min in (0, 1], got {q_min}"
        )));
    }
    let mean_p = pop.mean_p();
    if mean_p + PREMISE_SLACK < 0.5 + delta_p {
        return Err(Error::PremiseViolated {
            premise: "delta_p",
            detail: format!(
                "mean reliability {mean_p} is below the required 0.5 + delta_p = {}",
                0.5 + delta_p
            ),
        });
    }
    let observed_floor = min_publish_over_competent(pop)?;
    if observed_floor + PREMISE_SLACK < q_min {
        return Err(Error::PremiseViolated {
            premise: "q_min",
            detail: format!(
                "competent agents publish with probability as low as {observed_floor}, below the required q_min = {q_min}"
            ),
        });
    }
    Ok(convergence_rate(pop.len(), pop.horizon_t(), delta_p, q_min))
}

/// Smallest analytic publish probability among competent agents
/// (`p >= 0.5`); certifies the nondegenerate-gate premise empirically.
pub fn min_publish_over_competent(pop: &Population) -> Result<f64> {
    let horizon_t = pop.horizon_t();
    let mut min_q: Option<f64> = None;
    for agent in pop.agents().iter().filter(|a| a.p() >= 0.5) {
        let q = publish_probability(agent, horizon_t)?.q;
        min_q = Some(min_q.map_or(q, |m: f64| m.min(q)));
    }
    min_q.ok_or(Error::NoCompetentAgents)
}
