//! Confidence-gated majority voting.
//!
//! A pool of agents faces a sequence of binary tasks. Each agent has a fixed,
//! unknown reliability and maintains a Beta belief about it: over a learning
//! phase the agent observes correctness feedback and updates pseudo-counts,
//! and at the final decision round it publishes a vote only if the posterior
//! probability of being better than a critical level clears an abstention
//! threshold. Published votes are tallied by majority, ties counting as
//! non-wins.
//!
//! The crate provides:
//!
//! - [`specialfn`]: log-gamma, log-beta, log-binomial and the regularized
//!   incomplete beta function backing the confidence measure;
//! - [`belief`]: Beta pseudo-count updates, the confidence score, and the
//!   publish-or-abstain gate;
//! - [`population`]: agent construction and the four standard evaluation
//!   pools (homogeneous, heterogeneous, never-abstain, contrary priors);
//! - [`analytics`]: closed-form publish probabilities, the expected vote
//!   margin, and certified success / hallucination / convergence bounds;
//! - [`montecarlo`]: a seeded, parallel, bitwise-reproducible simulator of
//!   the full sequential process.
//!
//! ```
//! use jurygate::analytics::bound_report;
//! use jurygate::montecarlo::{simulate, SimConfig};
//! use jurygate::population::{build_scenario, Scenario};
//! use jurygate::GroundTruth;
//!
//! let pop = build_scenario(Scenario::Heterogeneous, 50, 20, 0.5, 0.5)?;
//! let report = bound_report(&pop, GroundTruth::Valid)?;
//! let result = simulate(&pop, &SimConfig { runs: 2000, seed: 42, ..Default::default() })?;
//! assert!(result.empirical_success >= report.success_lower_bound);
//! # Ok::<(), jurygate::Error>(())
//! ```

pub mod analytics;
pub mod belief;
mod error;
pub mod montecarlo;
pub mod population;
pub mod specialfn;

pub use error::{Error, Result};

/// Truth assignment for the final decision task.
///
/// Votes are tallied for the positive alternative. Under `Valid` the positive
/// alternative is the correct one, so a strictly positive net vote is a
/// collective success. Under `Invalid` the positive alternative is wrong, and
/// a strictly positive net vote means the group accepted an invalid item
/// (a collective hallucination).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroundTruth {
    Valid,
    Invalid,
}
