//! Agent-side belief state: Beta pseudo-counts, the confidence measure, and
//! the publish-or-abstain gate.

use crate::error::{Error, Result};
use crate::specialfn::reg_inc_beta;

/// Beta-distributed belief over an agent's own reliability, stored as
/// pseudo-counts of correct (`alpha`) and incorrect (`beta`) outcomes.
///
/// Beliefs are immutable values: [`BetaBelief::update`] returns a new belief,
/// so simulation replays and the analytic enumerator share belief arithmetic
/// without aliasing hazards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaBelief {
    alpha: f64,
    beta: f64,
}

impl BetaBelief {
    /// Both pseudo-counts must be positive and finite.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || !beta.is_finite() || beta <= 0.0 {
            return Err(Error::Domain(format!(
                "BetaBelief requires finite alpha, beta > 0, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Fold one round of correctness feedback into the pseudo-counts.
    #[must_use]
    pub fn update(self, correct: bool) -> Self {
        if correct {
            Self {
                alpha: self.alpha + 1.0,
                beta: self.beta,
            }
        } else {
            Self {
                alpha: self.alpha,
                beta: self.beta + 1.0,
            }
        }
    }

    /// Posterior probability that the agent's reliability exceeds
    /// `p_critical`: one minus the Beta CDF at `p_critical`.
    pub fn confidence(&self, p_critical: f64) -> Result<f64> {
        if !p_critical.is_finite() || p_critical <= 0.0 || p_critical >= 1.0 {
            return Err(Error::Domain(format!(
                "confidence requires p_critical in (0, 1), got {p_critical}"
            )));
        }
        Ok(1.0 - reg_inc_beta(p_critical, self.alpha, self.beta)?)
    }

    /// Publish decision at this belief state: `true` when publishing is
    /// forced or confidence *strictly* exceeds the abstention threshold.
    /// Exact equality abstains.
    pub fn gate(&self, params: &GateParams) -> Result<bool> {
        if params.force_publish {
            return Ok(true);
        }
        Ok(self.confidence(params.p_critical)? > params.tau_abstain)
    }
}

/// Parameters of the confidence gate.
///
/// `force_publish` is a distinct flag rather than a degenerate threshold: it
/// keeps the never-abstain baseline independent of confidence arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    p_critical: f64,
    tau_abstain: f64,
    force_publish: bool,
}

impl GateParams {
    /// `p_critical` must lie in (0, 1) and `tau_abstain` in [0, 1).
    pub fn new(p_critical: f64, tau_abstain: f64, force_publish: bool) -> Result<Self> {
        if !p_critical.is_finite() || p_critical <= 0.0 || p_critical >= 1.0 {
            return Err(Error::Domain(format!(
                "GateParams requires p_critical in (0, 1), got {p_critical}"
            )));
        }
        if !tau_abstain.is_finite() || !(0.0..1.0).contains(&tau_abstain) {
            return Err(Error::Domain(format!(
                "GateParams requires tau_abstain in [0, 1), got {tau_abstain}"
            )));
        }
        Ok(Self {
            p_critical,
            tau_abstain,
            force_publish,
        })
    }

    pub fn p_critical(&self) -> f64 {
        self.p_critical
    }

    pub fn tau_abstain(&self) -> f64 {
        self.tau_abstain
    }

    pub fn force_publish(&self) -> bool {
        self.force_publish
    }
}
