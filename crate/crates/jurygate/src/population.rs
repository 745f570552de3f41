//! Agent and scenario construction: competence assignment, prior schemes,
//! and the four standard evaluation pools.

use std::fmt;
use std::str::FromStr;

use crate::belief::{BetaBelief, GateParams};
use crate::error::{Error, Result};

/// Reliability shared by every agent in the homogeneous pool.
pub const HOMOGENEOUS_P: f64 = 0.55;
/// Reliability of the weaker half in two-point pools.
pub const LOW_P: f64 = 0.35;
/// Reliability of the stronger half in two-point pools.
pub const HIGH_P: f64 = 0.75;
/// Default total prior strength for contrary priors.
pub const DEFAULT_KAPPA: f64 = 8.0;
/// Default pseudo-count floor keeping contrary priors strictly positive.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Immutable per-agent parameters: true reliability, prior belief, gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSpec {
    p: f64,
    prior: BetaBelief,
    gate: GateParams,
}

impl AgentSpec {
    pub fn new(p: f64, prior: BetaBelief, gate: GateParams) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "AgentSpec requires reliability p in [0, 1], got {p}"
            )));
        }
        Ok(Self { p, prior, gate })
    }

    /// True (distribution-level) reliability.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn prior(&self) -> BetaBelief {
        self.prior
    }

    pub fn gate(&self) -> &GateParams {
        &self.gate
    }
}

/// An ordered pool of agents plus the decision horizon: `horizon_t - 1`
/// learning rounds followed by one decision round.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    agents: Vec<AgentSpec>,
    horizon_t: u32,
}

impl Population {
    pub fn new(agents: Vec<AgentSpec>, horizon_t: u32) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::InvalidArgument(
                "population needs at least one agent".into(),
            ));
        }
        if horizon_t < 2 {
            return Err(Error::InvalidArgument(format!(
                "horizon_t must be at least 2 (one learning round plus the decision round), got {horizon_t}"
            )));
        }
        Ok(Self { agents, horizon_t })
    }

    pub fn agents(&self) -> &[AgentSpec] {
        &self.agents
    }

    pub fn horizon_t(&self) -> u32 {
        self.horizon_t
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Average reliability across the pool.
    pub fn mean_p(&self) -> f64 {
        let sum: f64 = self.agents.iter().map(AgentSpec::p).sum();
        sum / self.agents.len() as f64
    }
}

/// The four standard evaluation pools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Identical competences, uniform priors, gated.
    Homogeneous,
    /// Two-point competences, uniform priors, gated.
    Heterogeneous,
    /// Two-point competences with publishing forced: the classical
    /// majority-vote baseline.
    NeverAbstain,
    /// Two-point competences with priors pointing away from true
    /// reliability, still gated.
    ContraryPriors,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Homogeneous,
        Scenario::Heterogeneous,
        Scenario::NeverAbstain,
        Scenario::ContraryPriors,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Homogeneous => "homogeneous",
            Scenario::Heterogeneous => "heterogeneous",
            Scenario::NeverAbstain => "never-abstain",
            Scenario::ContraryPriors => "contrary-priors",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "homogeneous" => Ok(Scenario::Homogeneous),
            "heterogeneous" => Ok(Scenario::Heterogeneous),
            "never-abstain" => Ok(Scenario::NeverAbstain),
            "contrary-priors" => Ok(Scenario::ContraryPriors),
            other => Err(Error::InvalidArgument(format!(
                "unknown scenario `{other}` (expected homogeneous, heterogeneous, never-abstain, or contrary-priors)"
            ))),
        }
    }
}

/// Prior with mean pointing away from the true reliability: pseudo-counts
/// `(max(kappa * (1 - p), epsilon), max(kappa * p, epsilon))`, so competent
/// agents start pessimistic and weak agents optimistic.
pub fn contrary_prior(p: f64, kappa: f64, epsilon: f64) -> Result<BetaBelief> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "contrary_prior requires p in [0, 1], got {p}"
        )));
    }
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::Domain(format!(
            "contrary_prior requires kappa > 0, got {kappa}"
        )));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Domain(format!(
            "contrary_prior requires epsilon > 0, got {epsilon}"
        )));
    }
    BetaBelief::new((kappa * (1.0 - p)).max(epsilon), (kappa * p).max(epsilon))
}

/// Build one of the standard pools with the default contrary-prior strength.
pub fn build_scenario(
    kind: Scenario,
    n_agents: usize,
    horizon_t: u32,
    tau: f64,
    p_critical: f64,
) -> Result<Population> {
    build_scenario_with(
        kind,
        n_agents,
        horizon_t,
        tau,
        p_critical,
        DEFAULT_KAPPA,
        DEFAULT_EPSILON,
    )
}

/// Build one of the standard pools.
///
/// Two-point pools split `n_agents` into equal halves (weaker half first, so
/// seeded runs do not depend on builder internals) and therefore require an
/// even `n_agents`. Construction is deterministic.
pub fn build_scenario_with(
    kind: Scenario,
    n_agents: usize,
    horizon_t: u32,
    tau: f64,
    p_critical: f64,
    kappa: f64,
    epsilon: f64,
) -> Result<Population> {
    if n_agents == 0 {
        return Err(Error::InvalidArgument(
            "scenario needs at least one agent".into(),
        ));
    }
    let uniform = BetaBelief::new(1.0, 1.0)?;
    let agents = match kind {
        Scenario::Homogeneous => {
            let gate = GateParams::new(p_critical, tau, false)?;
            vec![AgentSpec::new(HOMOGENEOUS_P, uniform, gate)?; n_agents]
        }
        Scenario::Heterogeneous | Scenario::NeverAbstain | Scenario::ContraryPriors => {
            if !n_agents.is_multiple_of(2) {
                return Err(Error::InvalidArgument(format!(
                    "scenario `{kind}` splits agents into equal halves and needs an even n_agents, got {n_agents}"
                )));
            }
            let force = kind == Scenario::NeverAbstain;
            let gate = GateParams::new(p_critical, tau, force)?;
            let mut agents = Vec::with_capacity(n_agents);
            for &p in &[LOW_P, HIGH_P] {
                let prior = if kind == Scenario::ContraryPriors {
                    contrary_prior(p, kappa, epsilon)?
                } else {
                    uniform
                };
                for _ in 0..n_agents / 2 {
                    agents.push(AgentSpec::new(p, prior, gate)?);
                }
            }
            agents
        }
    };
    Population::new(agents, horizon_t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contrary_prior_worked_values() {
        let pessimistic = contrary_prior(0.75, 8.0, 1e-6).unwrap();
        assert_eq!((pessimistic.alpha(), pessimistic.beta()), (2.0, 6.0));
        let optimistic = contrary_prior(0.35, 8.0, 1e-6).unwrap();
        assert_eq!((optimistic.alpha(), optimistic.beta()), (5.2, 2.8));
    }

    #[test]
    fn contrary_prior_clips_at_the_boundary() {
        let clipped = contrary_prior(1.0, 8.0, 1e-6).unwrap();
        assert_eq!((clipped.alpha(), clipped.beta()), (1e-6, 8.0));
    }

    #[test]
    fn contrary_prior_rejects_bad_parameters() {
        assert!(contrary_prior(1.5, 8.0, 1e-6).is_err());
        assert!(contrary_prior(0.5, 0.0, 1e-6).is_err());
        assert!(contrary_prior(0.5, -1.0, 1e-6).is_err());
        assert!(contrary_prior(0.5, 8.0, 0.0).is_err());
        assert!(contrary_prior(0.5, f64::NAN, 1e-6).is_err());
    }

    #[test]
    fn heterogeneous_pool_splits_evenly() {
        let pop = build_scenario(Scenario::Heterogeneous, 50, 20, 0.5, 0.5).unwrap();
        assert_eq!(pop.len(), 50);
        let low = pop.agents().iter().filter(|a| a.p() == LOW_P).count();
        let high = pop.agents().iter().filter(|a| a.p() == HIGH_P).count();
        assert_eq!((low, high), (25, 25));
        // Weaker half first.
        assert_eq!(pop.agents()[0].p(), LOW_P);
        assert_eq!(pop.agents()[49].p(), HIGH_P);
        assert!((pop.mean_p() - 0.55).abs() <= 1e-15);
        for agent in pop.agents() {
            assert!(!agent.gate().force_publish());
            assert_eq!((agent.prior().alpha(), agent.prior().beta()), (1.0, 1.0));
        }
    }

    #[test]
    fn homogeneous_pool_is_uniform() {
        let pop = build_scenario(Scenario::Homogeneous, 11, 20, 0.5, 0.5).unwrap();
        assert!(pop.agents().iter().all(|a| a.p() == HOMOGENEOUS_P));
        assert!((pop.mean_p() - 0.55).abs() <= 1e-15);
    }

    #[test]
    fn never_abstain_pool_forces_publication() {
        let pop = build_scenario(Scenario::NeverAbstain, 10, 20, 0.5, 0.5).unwrap();
        assert!(pop.agents().iter().all(|a| a.gate().force_publish()));
    }

    #[test]
    fn contrary_pool_keeps_the_gate_and_inverts_priors() {
        let pop = build_scenario(Scenario::ContraryPriors, 4, 20, 0.5, 0.5).unwrap();
        for agent in pop.agents() {
            assert!(!agent.gate().force_publish());
            let prior = agent.prior();
            if agent.p() == HIGH_P {
                assert_eq!((prior.alpha(), prior.beta()), (2.0, 6.0));
            } else {
                assert_eq!((prior.alpha(), prior.beta()), (5.2, 2.8));
            }
        }
    }

    #[test]
    fn two_point_pools_reject_odd_sizes() {
        for kind in [
            Scenario::Heterogeneous,
            Scenario::NeverAbstain,
            Scenario::ContraryPriors,
        ] {
            assert!(matches!(
                build_scenario(kind, 7, 20, 0.5, 0.5),
                Err(Error::InvalidArgument(_))
            ));
        }
        assert!(build_scenario(Scenario::Homogeneous, 7, 20, 0.5, 0.5).is_ok());
    }

    #[test]
    fn builders_are_deterministic() {
        let a = build_scenario(Scenario::ContraryPriors, 20, 15, 0.4, 0.6).unwrap();
        let b = build_scenario(Scenario::ContraryPriors, 20, 15, 0.4, 0.6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn population_validation() {
        assert!(matches!(
            Population::new(vec![], 5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_scenario(Scenario::Homogeneous, 4, 1, 0.5, 0.5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_scenario(Scenario::Homogeneous, 0, 5, 0.5, 0.5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn scenario_tags_round_trip() {
        for kind in Scenario::ALL {
            assert_eq!(kind.name().parse::<Scenario>().unwrap(), kind);
        }
        assert!("jury-of-one".parse::<Scenario>().is_err());
    }
}
