//! Finite robust Markov decision problems.
//!
//! Each state-action pair carries its own KL ambiguity set over a list of
//! destination states. Sets are combined freely across pairs and periods
//! (rectangularity), which is what makes the robust Bellman operator a
//! sup-norm contraction with modulus equal to the discount factor. With every
//! radius at zero the operator is the classic Bellman operator.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ambiguity::{worst_case_expectation, AmbiguitySet};
use crate::simplex::Distribution;
use crate::{Error, Result};

/// Default sup-norm stopping threshold.
pub const DEFAULT_KAPPA: f64 = 1e-8;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Ambiguity set over the destination states `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSet {
    support: Vec<usize>,
    set: AmbiguitySet,
}

impl TransitionSet {
    pub fn new(support: Vec<usize>, set: AmbiguitySet) -> Result<Self> {
        if support.len() != set.support_size() {
            return Err(Error::SupportMismatch {
                left: support.len(),
                right: set.support_size(),
            });
        }
        Ok(Self { support, set })
    }

    /// Calibrated set from observed destination counts. Destinations with a
    /// zero count are dropped from the support.
    pub fn from_counts(destinations: &[usize], counts: &[u64], confidence: f64) -> Result<Self> {
        if destinations.len() != counts.len() {
            return Err(Error::SupportMismatch {
                left: destinations.len(),
                right: counts.len(),
            });
        }
        let (support, kept): (Vec<usize>, Vec<u64>) = destinations
            .iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0)
            .map(|(&d, &c)| (d, c))
            .unzip();
        let n_obs = kept.iter().sum();
        let center = Distribution::from_counts(&kept)?;
        Self::new(support, AmbiguitySet::calibrated(center, n_obs, confidence)?)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn set(&self) -> &AmbiguitySet {
        &self.set
    }
}

/// A finite robust MDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MdpSpecJson", into = "MdpSpecJson")]
pub struct MdpSpec {
    n_states: usize,
    n_actions: usize,
    discount: f64,
    utility: Vec<Vec<f64>>,
    transitions: Vec<Vec<TransitionSet>>,
}

impl MdpSpec {
    /// `utility[s][a]` and `transitions[s][a]` for every state and action.
    pub fn new(discount: f64, utility: Vec<Vec<f64>>, transitions: Vec<Vec<TransitionSet>>) -> Result<Self> {
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::InvalidArgument(format!("discount {discount} must lie in [0, 1)")));
        }
        let n_states = utility.len();
        if n_states == 0 {
            return Err(Error::InvalidArgument("no states".into()));
        }
        let n_actions = utility[0].len();
        if n_actions == 0 {
            return Err(Error::InvalidArgument("no actions".into()));
        }
        if transitions.len() != n_states {
            return Err(Error::InvalidArgument(format!(
                "{} transition rows for {n_states} states",
                transitions.len()
            )));
        }
        for (s, (u, t)) in utility.iter().zip(&transitions).enumerate() {
            if u.len() != n_actions || t.len() != n_actions {
                return Err(Error::InvalidArgument(format!("state {s} does not list {n_actions} actions")));
            }
            if let Some(a) = u.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("utility of ({s}, {a}) is not finite")));
            }
            for ts in t {
                if let Some(&bad) = ts.support.iter().find(|&&d| d >= n_states) {
                    return Err(Error::InvalidArgument(format!(
                        "state {s} transitions to unknown state {bad}"
                    )));
                }
            }
        }
        Ok(Self {
            n_states,
            n_actions,
            discount,
            utility,
            transitions,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn utility(&self, state: usize, action: usize) -> f64 {
        self.utility[state][action]
    }

    pub fn transition(&self, state: usize, action: usize) -> &TransitionSet {
        &self.transitions[state][action]
    }

    /// The same problem with every set shrunk to its center.
    pub fn nominal(&self) -> Result<Self> {
        let transitions = self
            .transitions
            .iter()
            .map(|row| {
                row.iter()
                    .map(|ts| {
                        TransitionSet::new(ts.support.clone(), AmbiguitySet::singleton(ts.set.center().clone())?)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.discount, self.utility.clone(), transitions)
    }

    /// The centers as a known transition law.
    pub fn center_law(&self) -> Result<TrueMdp> {
        let transitions = self
            .transitions
            .iter()
            .map(|row| {
                row.iter()
                    .map(|ts| SparseLaw::new(ts.support.clone(), ts.set.center().clone()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        TrueMdp::new(self.discount, self.utility.clone(), transitions)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MdpSpecJson {
    discount: f64,
    utility: Vec<Vec<f64>>,
    transitions: Vec<Vec<TransitionJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TransitionJson {
    support: Vec<usize>,
    center: Vec<f64>,
    radius: f64,
}

impl TryFrom<MdpSpecJson> for MdpSpec {
    type Error = Error;

    fn try_from(raw: MdpSpecJson) -> Result<Self> {
        let transitions = raw
            .transitions
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|t| {
                        let set = AmbiguitySet::with_radius(Distribution::new(t.center)?, t.radius)?;
                        TransitionSet::new(t.support, set)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MdpSpec::new(raw.discount, raw.utility, transitions)
    }
}

impl From<MdpSpec> for MdpSpecJson {
    fn from(spec: MdpSpec) -> Self {
        let transitions = spec
            .transitions
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|ts| TransitionJson {
                        center: ts.set.center().probs().to_vec(),
                        radius: ts.set.radius(),
                        support: ts.support,
                    })
                    .collect()
            })
            .collect();
        MdpSpecJson {
            discount: spec.discount,
            utility: spec.utility,
            transitions,
        }
    }
}

/// One application of the robust Bellman operator.
#[derive(Debug, Clone, PartialEq)]
pub struct BellmanStep {
    pub values: Vec<f64>,
    pub policy: Vec<usize>,
    /// Worst-case distribution over each pair's support, `[state][action]`.
    pub worst_case: Vec<Vec<Distribution>>,
}

/// `max_a [u(s, a) + discount * min_{q in set(s, a)} q . w]` for every state.
///
/// Ties in the maximum go to the lowest action index.
pub fn robust_bellman_apply(spec: &MdpSpec, w: &[f64]) -> Result<BellmanStep> {
    if w.len() != spec.n_states {
        return Err(Error::SupportMismatch {
            left: w.len(),
            right: spec.n_states,
        });
    }
    if let Some(index) = w.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue { index });
    }
    let mut values = Vec::with_capacity(spec.n_states);
    let mut policy = Vec::with_capacity(spec.n_states);
    let mut worst_case = Vec::with_capacity(spec.n_states);
    let mut local = Vec::new();
    for s in 0..spec.n_states {
        let mut best = f64::NEG_INFINITY;
        let mut best_action = 0;
        let mut row = Vec::with_capacity(spec.n_actions);
        for a in 0..spec.n_actions {
            let ts = &spec.transitions[s][a];
            local.clear();
            local.extend(ts.support.iter().map(|&d| w[d]));
            let wc = worst_case_expectation(&ts.set, &local)?;
            let q = spec.utility[s][a] + spec.discount * wc.value;
            if q > best {
                best = q;
                best_action = a;
            }
            row.push(wc.minimizer);
        }
        values.push(best);
        policy.push(best_action);
        worst_case.push(row);
    }
    Ok(BellmanStep {
        values,
        policy,
        worst_case,
    })
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustSolution {
    pub values: Vec<f64>,
    pub policy: Vec<usize>,
    pub worst_case: Vec<Vec<Distribution>>,
    pub iterations: usize,
    /// Sup-norm distance between the last two iterates.
    pub residual: f64,
    /// `residual * discount / (1 - discount)`, a bound on the distance to the
    /// exact fixed point.
    pub error_bound: f64,
}

/// Robust value iteration from `v = 0`, stopping once successive iterates are
/// within `kappa` in sup norm.
pub fn robust_value_iteration(spec: &MdpSpec, kappa: f64, max_iter: usize) -> Result<RobustSolution> {
    robust_value_iteration_from(spec, vec![0.0; spec.n_states], kappa, max_iter)
}

/// As [`robust_value_iteration`] from a caller-supplied start.
pub fn robust_value_iteration_from(
    spec: &MdpSpec,
    start: Vec<f64>,
    kappa: f64,
    max_iter: usize,
) -> Result<RobustSolution> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa {kappa} must be positive")));
    }
    let mut v = start;
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        let next = robust_bellman_apply(spec, &v)?.values;
        residual = sup_distance(&next, &v);
        v = next;
        if residual <= kappa {
            // policy and worst cases greedy with respect to the returned values
            let step = robust_bellman_apply(spec, &v)?;
            return Ok(RobustSolution {
                values: v,
                policy: step.policy,
                worst_case: step.worst_case,
                iterations: iteration,
                residual,
                error_bound: residual * spec.discount / (1.0 - spec.discount),
            });
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual,
    })
}

/// A transition law over an explicit list of destination states.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLaw {
    support: Vec<usize>,
    probs: Distribution,
}

impl SparseLaw {
    pub fn new(support: Vec<usize>, probs: Distribution) -> Result<Self> {
        if support.len() != probs.support_size() {
            return Err(Error::SupportMismatch {
                left: support.len(),
                right: probs.support_size(),
            });
        }
        Ok(Self { support, probs })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn probs(&self) -> &Distribution {
        &self.probs
    }

    pub fn expect(&self, w: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(self.probs.probs())
            .map(|(&d, p)| p * w[d])
            .sum()
    }
}

/// A known-transition MDP used to score decision rules.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueMdp {
    discount: f64,
    utility: Vec<Vec<f64>>,
    transitions: Vec<Vec<SparseLaw>>,
}

impl TrueMdp {
    pub fn new(discount: f64, utility: Vec<Vec<f64>>, transitions: Vec<Vec<SparseLaw>>) -> Result<Self> {
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::InvalidArgument(format!("discount {discount} must lie in [0, 1)")));
        }
        let n = utility.len();
        if n == 0 || transitions.len() != n {
            return Err(Error::InvalidArgument("utility and transition tables disagree".into()));
        }
        let k = utility[0].len();
        for (u, t) in utility.iter().zip(&transitions) {
            if u.len() != k || t.len() != k {
                return Err(Error::InvalidArgument("ragged action tables".into()));
            }
            if t.iter().any(|law| law.support.iter().any(|&d| d >= n)) {
                return Err(Error::InvalidArgument("transition to an unknown state".into()));
            }
        }
        Ok(Self {
            discount,
            utility,
            transitions,
        })
    }

    pub fn n_states(&self) -> usize {
        self.utility.len()
    }

    pub fn n_actions(&self) -> usize {
        self.utility[0].len()
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn law(&self, state: usize, action: usize) -> &SparseLaw {
        &self.transitions[state][action]
    }

    pub fn utility(&self, state: usize, action: usize) -> f64 {
        self.utility[state][action]
    }
}

/// A stationary decision rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    Deterministic(Vec<usize>),
    /// Action probabilities per state.
    Randomized(Vec<Vec<f64>>),
    /// Logit choice probabilities from additive mean-zero extreme-value
    /// shocks; the expected shock of the chosen action,
    /// `-sum_a pi_a ln pi_a`, is credited to the reward.
    Logit(Vec<Vec<f64>>),
}

impl Policy {
    fn action_probs(&self, state: usize, n_actions: usize) -> Vec<f64> {
        match self {
            Policy::Deterministic(actions) => {
                let mut p = vec![0.0; n_actions];
                p[actions[state]] = 1.0;
                p
            }
            Policy::Randomized(probs) | Policy::Logit(probs) => probs[state].clone(),
        }
    }

    fn shock_surplus(&self, state: usize) -> f64 {
        match self {
            Policy::Logit(probs) => -probs[state]
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|p| p * p.ln())
                .sum::<f64>(),
            _ => 0.0,
        }
    }

    fn check(&self, n_states: usize, n_actions: usize) -> Result<()> {
        match self {
            Policy::Deterministic(actions) => {
                if actions.len() != n_states || actions.iter().any(|&a| a >= n_actions) {
                    return Err(Error::InvalidArgument("policy does not match the MDP".into()));
                }
            }
            Policy::Randomized(probs) | Policy::Logit(probs) => {
                if probs.len() != n_states {
                    return Err(Error::InvalidArgument("policy does not match the MDP".into()));
                }
                for row in probs {
                    Distribution::new(row.clone())?;
                    if row.len() != n_actions {
                        return Err(Error::InvalidArgument("policy does not match the MDP".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Expected one-period reward and transition matrix of a policy.
fn policy_chain(truth: &TrueMdp, policy: &Policy) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = truth.n_states();
    let k = truth.n_actions();
    policy.check(n, k)?;
    let mut reward = vec![0.0; n];
    let mut matrix = vec![vec![0.0; n]; n];
    for s in 0..n {
        let probs = policy.action_probs(s, k);
        reward[s] = policy.shock_surplus(s);
        for (a, &pa) in probs.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            reward[s] += pa * truth.utility[s][a];
            let law = &truth.transitions[s][a];
            for (&d, &q) in law.support.iter().zip(law.probs.probs()) {
                matrix[s][d] += pa * q;
            }
        }
    }
    Ok((reward, matrix))
}

/// Exact discounted value of `policy` under the known law: the solution of
/// `(I - discount * P_pi) v = r_pi`.
pub fn evaluate_policy_under_truth(truth: &TrueMdp, policy: &Policy) -> Result<Vec<f64>> {
    let n = truth.n_states();
    let (reward, matrix) = policy_chain(truth, policy)?;
    let a = DMatrix::from_fn(n, n, |i, j| {
        let identity = if i == j { 1.0 } else { 0.0 };
        identity - truth.discount * matrix[i][j]
    });
    let b = DVector::from_vec(reward);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidArgument("policy evaluation system is singular".into()))?;
    Ok(x.iter().copied().collect())
}

/// Expected discounted utility over the first `horizon` periods.
pub fn evaluate_policy_finite_horizon(truth: &TrueMdp, policy: &Policy, horizon: usize) -> Result<Vec<f64>> {
    let n = truth.n_states();
    let (reward, matrix) = policy_chain(truth, policy)?;
    let mut v = vec![0.0; n];
    for _ in 0..horizon {
        v = (0..n)
            .map(|s| {
                reward[s] + truth.discount * matrix[s].iter().zip(&v).map(|(p, x)| p * x).sum::<f64>()
            })
            .collect();
    }
    Ok(v)
}
