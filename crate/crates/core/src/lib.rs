//! Solvers and experiment drivers for data-driven robust Markov decision
//! problems whose transition laws are only known to lie in a
//! Kullback-Leibler ball around a maximum-likelihood estimate.
//!
//! The crate is organised bottom-up:
//!
//! * [`simplex`]: finite distributions, KL divergence, simplex grids, sampling.
//! * [`ambiguity`]: chi-squared calibration of the ball radius and the inner
//!   worst-case expectation.
//! * [`mdp`]: generic robust value iteration and exact policy evaluation.
//! * [`zurcher`]: the bus engine replacement model with logit shocks.
//! * [`urn`]: the urn guessing example used to illustrate decision criteria.
//! * [`criteria`]: maximin, minimax regret and subjective Bayes selection.
//! * [`experiments`]: fleet simulation, misspecification curves, smoothing and
//!   the ex-ante sweep over the probability simplex.
//!
//! Rectangularity is a contract of every solver here: the worst case is chosen
//! independently for each state-action pair, even when the data-generating
//! process ties the pairs together.

// Negated comparisons (`!(x > 0.0)`) are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambiguity;
pub mod criteria;
mod error;
pub mod experiments;
pub mod mdp;
pub mod seed;
pub mod simplex;
pub mod urn;
pub mod zurcher;

pub use error::{Error, Result};
