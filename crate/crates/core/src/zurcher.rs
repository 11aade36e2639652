//! The bus engine replacement model with ambiguous mileage transitions.
//!
//! Mileage is discretized into bins; each month the bus either receives
//! maintenance (cost `slope * x`) or a new engine (cost `RC`, mileage reset).
//! Additive i.i.d. extreme-value shocks with mean zero and unit scale
//! integrate out to a log-sum-exp, so the expected value function solves
//!
//! ```text
//! EV(x) = ln sum_a exp( u(x, a) + delta * min_{q in P((1 - a) x)} sum_j q_j EV(x + j) )
//! ```
//!
//! where `P(x)` is the KL ball around the pooled jump estimate, calibrated
//! with the per-state observation count. Jumps that would leave the grid
//! land on the last bin.

use std::collections::HashMap;
use std::io::Read;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::ambiguity::{worst_case_expectation, AmbiguitySet};
use crate::mdp::{SparseLaw, TrueMdp};
use crate::simplex::Distribution;
use crate::{Error, Result};

/// Mileage state of a bus with 75,000 miles on 5,000-mile bins.
pub const REPRESENTATIVE_STATE: usize = 15;

/// Jump law used by the synthetic fleet generator: about 60% of months
/// fall in the one-bin band and 1.2% move two bins or more.
pub const SYNTHETIC_JUMP_PROBS: [f64; 4] = [0.392, 0.596, 0.011, 0.001];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZurcherConfig {
    pub n_states: usize,
    /// Miles per mileage bin.
    pub bin_width: f64,
    pub replacement_cost: f64,
    /// Maintenance cost per mileage bin.
    pub maintenance_slope: f64,
    pub discount: f64,
    pub max_jump: usize,
    /// Confidence level `omega` of the ambiguity sets.
    pub confidence: f64,
    /// Observation count used to calibrate every state's set.
    pub pooled_n_obs: u64,
}

impl Default for ZurcherConfig {
    fn default() -> Self {
        Self {
            n_states: 78,
            bin_width: 5_000.0,
            replacement_cost: 50.0,
            maintenance_slope: 0.4,
            discount: 0.9999,
            max_jump: 3,
            confidence: 0.0,
            pooled_n_obs: 55,
        }
    }
}

impl ZurcherConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_states < self.max_jump + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} states cannot hold jumps of {} bins",
                self.n_states, self.max_jump
            )));
        }
        if !(self.replacement_cost >= 0.0 && self.maintenance_slope >= 0.0) {
            return Err(Error::InvalidArgument("costs must be non-negative".into()));
        }
        if !(self.bin_width > 0.0) {
            return Err(Error::InvalidArgument("bin width must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return Err(Error::InvalidArgument(format!("discount {} must lie in [0, 1)", self.discount)));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::InvalidArgument(format!("confidence {} outside [0, 1]", self.confidence)));
        }
        if self.pooled_n_obs == 0 {
            return Err(Error::InvalidArgument("pooled_n_obs must be positive".into()));
        }
        Ok(())
    }

    pub fn with_confidence(&self, confidence: f64) -> Self {
        Self {
            confidence,
            ..self.clone()
        }
    }

    pub fn maintenance_cost(&self, state: usize) -> f64 {
        self.maintenance_slope * state as f64
    }

    /// Per-period utility of maintaining (`0`) or replacing (`1`).
    pub fn utility(&self, state: usize, replace: bool) -> f64 {
        if replace {
            -self.replacement_cost
        } else {
            -self.maintenance_cost(state)
        }
    }

    /// Destination bin of a jump, truncated at the top of the grid.
    pub fn destination(&self, state: usize, jump: usize) -> usize {
        (state + jump).min(self.n_states - 1)
    }

    pub fn mileage(&self, state: usize) -> f64 {
        state as f64 * self.bin_width
    }
}

/// One monthly record of a bus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdometerRow {
    pub bus_id: String,
    pub month: u32,
    /// Miles since the last engine replacement.
    pub odometer: f64,
    /// Whether the engine was replaced this month.
    pub replace: bool,
}

#[derive(Debug, Deserialize)]
struct RawRow {
    bus_id: String,
    month: u32,
    odometer: f64,
    replace: u8,
}

/// Reads `bus_id,month,odometer,replace` records. Errors carry the line number.
pub fn read_odometer_csv<R: Read>(reader: R) -> Result<Vec<OdometerRow>> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers().map_err(|e| Error::Data {
        line: 1,
        message: e.to_string(),
    })?;
    let expected = ["bus_id", "month", "odometer", "replace"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Data {
            line: 1,
            message: format!("expected header {}", expected.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in csv.deserialize::<RawRow>() {
        let raw = record.map_err(|e| Error::Data {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rows.len() + 2;
        if raw.replace > 1 {
            return Err(Error::Data {
                line,
                message: format!("replace flag must be 0 or 1, got {}", raw.replace),
            });
        }
        if !(raw.odometer.is_finite() && raw.odometer >= 0.0) {
            return Err(Error::Data {
                line,
                message: format!("odometer reading {} is invalid", raw.odometer),
            });
        }
        rows.push(OdometerRow {
            bus_id: raw.bus_id,
            month: raw.month,
            odometer: raw.odometer,
            replace: raw.replace == 1,
        });
    }
    Ok(rows)
}

pub fn write_odometer_csv<W: std::io::Write>(rows: &[OdometerRow], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    csv.write_record(["bus_id", "month", "odometer", "replace"]).map_err(io)?;
    for r in rows {
        csv.write_record([
            r.bus_id.clone(),
            r.month.to_string(),
            r.odometer.to_string(),
            u8::from(r.replace).to_string(),
        ])
        .map_err(io)?;
    }
    csv.flush()?;
    Ok(())
}

/// Maximum-likelihood estimate of the pooled monthly jump distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEstimate {
    /// Jump probabilities over `0..=max_jump`.
    pub jump_probs: Distribution,
    pub counts: Vec<u64>,
    pub n_obs: u64,
    /// Transitions observed out of each mileage state.
    pub observations_per_state: Vec<u64>,
}

impl TransitionEstimate {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let jump_probs = Distribution::from_counts(&counts)?;
        let n_obs = counts.iter().sum();
        Ok(Self {
            jump_probs,
            counts,
            n_obs,
            observations_per_state: Vec::new(),
        })
    }

    /// Jumps with a positive estimated probability.
    pub fn support(&self) -> Vec<usize> {
        self.jump_probs.positive_support()
    }

    /// The estimate restricted to its positive support.
    pub fn restricted(&self) -> Distribution {
        self.jump_probs
            .restrict(&self.support())
            .expect("estimate has positive mass")
    }
}

/// Discretizes odometer readings and counts monthly bin jumps.
///
/// Rows of a bus must be in month order. A month flagged as a replacement
/// resets the baseline for the following jump to bin 0.
pub fn ingest_odometer_data(rows: &[OdometerRow], config: &ZurcherConfig) -> Result<TransitionEstimate> {
    let mut order: Vec<&str> = Vec::new();
    let mut by_bus: HashMap<&str, Vec<(usize, &OdometerRow)>> = HashMap::new();
    for (i, row) in rows.iter().enumerate() {
        let entry = by_bus.entry(row.bus_id.as_str()).or_insert_with(|| {
            order.push(row.bus_id.as_str());
            Vec::new()
        });
        entry.push((i + 2, row));
    }

    let mut counts = vec![0u64; config.max_jump + 1];
    let mut per_state = vec![0u64; config.n_states];
    let bin = |miles: f64| ((miles / config.bin_width).floor() as usize).min(config.n_states - 1);
    for bus in order {
        let records = &by_bus[bus];
        for pair in records.windows(2) {
            let (_, prev) = pair[0];
            let (line, next) = pair[1];
            if next.month <= prev.month {
                return Err(Error::Data {
                    line,
                    message: format!("bus {bus} months are not increasing"),
                });
            }
            let from = if prev.replace { 0 } else { bin(prev.odometer) };
            let to = bin(next.odometer);
            if to < from {
                return Err(Error::Data {
                    line,
                    message: format!("bus {bus} odometer decreases without a replacement"),
                });
            }
            let jump = to - from;
            if jump > config.max_jump {
                return Err(Error::Data {
                    line,
                    message: format!(
                        "bus {bus} jumps {jump} bins in one month, more than the maximum of {}",
                        config.max_jump
                    ),
                });
            }
            counts[jump] += 1;
            per_state[from] += 1;
        }
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::Data {
            line: 0,
            message: "no monthly transitions in the data".into(),
        });
    }
    let mut estimate = TransitionEstimate::from_counts(counts)?;
    estimate.observations_per_state = per_state;
    Ok(estimate)
}

/// Ambiguity set over the estimate's positive jumps at the configured
/// confidence and observation count.
pub fn jump_ambiguity_set(config: &ZurcherConfig, estimate: &Distribution) -> Result<(Vec<usize>, AmbiguitySet)> {
    let support = estimate.positive_support();
    let center = estimate.restrict(&support)?;
    let set = AmbiguitySet::calibrated(center, config.pooled_n_obs, config.confidence)?;
    Ok((support, set))
}

/// The robust log-sum-exp operator on mileage states.
#[derive(Debug, Clone)]
pub struct RobustOperator<'a> {
    config: &'a ZurcherConfig,
    support: Vec<usize>,
    set: AmbiguitySet,
}

/// Result of one operator application.
#[derive(Debug, Clone)]
pub struct OperatorStep {
    pub values: Vec<f64>,
    /// Worst-case continuation `min_q q . v(x + j)` for maintenance at each state.
    pub continuation: Vec<f64>,
    /// Worst-case jump distribution at each state, over `0..=max_jump`.
    pub worst_case: Vec<Distribution>,
}

impl<'a> RobustOperator<'a> {
    pub fn new(config: &'a ZurcherConfig, estimate: &Distribution) -> Result<Self> {
        config.validate()?;
        if estimate.support_size() != config.max_jump + 1 {
            return Err(Error::SupportMismatch {
                left: estimate.support_size(),
                right: config.max_jump + 1,
            });
        }
        let (support, set) = jump_ambiguity_set(config, estimate)?;
        Ok(Self { config, support, set })
    }

    pub fn set(&self) -> &AmbiguitySet {
        &self.set
    }

    /// Worst-case continuation and jump distribution from `state`.
    pub fn continuation(&self, v: &[f64], state: usize) -> Result<(f64, Distribution)> {
        let local: Vec<f64> = self
            .support
            .iter()
            .map(|&j| v[self.config.destination(state, j)])
            .collect();
        let wc = worst_case_expectation(&self.set, &local)?;
        let mut full = vec![0.0; self.config.max_jump + 1];
        for (&j, &q) in self.support.iter().zip(wc.minimizer.probs()) {
            full[j] = q;
        }
        Ok((wc.value, Distribution::new(full)?))
    }

    pub fn apply(&self, v: &[f64]) -> Result<OperatorStep> {
        let n = self.config.n_states;
        if v.len() != n {
            return Err(Error::SupportMismatch { left: v.len(), right: n });
        }
        let mut continuation = Vec::with_capacity(n);
        let mut worst_case = Vec::with_capacity(n);
        for x in 0..n {
            let (value, q) = self.continuation(v, x)?;
            continuation.push(value);
            worst_case.push(q);
        }
        let values = self.combine(&continuation);
        Ok(OperatorStep {
            values,
            continuation,
            worst_case,
        })
    }

    fn combine(&self, continuation: &[f64]) -> Vec<f64> {
        let replace_value = self.config.utility(0, true) + self.config.discount * continuation[0];
        continuation
            .iter()
            .enumerate()
            .map(|(x, w)| log_sum_exp2(self.config.utility(x, false) + self.config.discount * w, replace_value))
            .collect()
    }
}

pub fn log_sum_exp2(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + (-(a - b).abs()).exp().ln_1p()
}

/// Converged expected value function.
#[derive(Debug, Clone, PartialEq)]
pub struct EvFunction {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvSolution {
    pub ev: EvFunction,
    /// Worst-case jump distribution at each state, greedy for `ev`.
    pub worst_case: Vec<Distribution>,
    pub iterations: usize,
    /// `||Lambda(EV) - EV||_inf`.
    pub residual: f64,
    /// Guaranteed bound on the distance to the exact fixed point.
    pub error_bound: f64,
}

pub const DEFAULT_EV_MAX_ITER: usize = 1_000_000;

/// Solves the robust fixed point from a zero start.
pub fn solve_ev(config: &ZurcherConfig, estimate: &Distribution, kappa: f64) -> Result<EvSolution> {
    solve_ev_from(config, estimate, kappa, DEFAULT_EV_MAX_ITER, None)
}

/// Successive approximation with span-based extrapolation.
///
/// Because the operator is monotone and shifts constants by `delta`, any
/// iterate `h` with `Lambda(h) - h` inside `[lo, hi]` brackets the fixed point
/// between `Lambda(h) + delta lo / (1 - delta)` and
/// `Lambda(h) + delta hi / (1 - delta)`. Iterates are renormalized to
/// `h(0) = 0`, which leaves the bracket width unchanged and keeps the
/// numbers small, and the midpoint of the bracket is returned once its half
/// width is at most `kappa / 2`. The returned function is then within
/// `kappa / 2` of the fixed point and its residual is below `kappa`.
pub fn solve_ev_from(
    config: &ZurcherConfig,
    estimate: &Distribution,
    kappa: f64,
    max_iter: usize,
    start: Option<&[f64]>,
) -> Result<EvSolution> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa {kappa} must be positive")));
    }
    let op = RobustOperator::new(config, estimate)?;
    let n = config.n_states;
    let delta = config.discount;
    let mut h: Vec<f64> = match start {
        Some(s) if s.len() == n => s.iter().map(|x| x - s[0]).collect(),
        Some(s) => return Err(Error::SupportMismatch { left: s.len(), right: n }),
        None => vec![0.0; n],
    };
    let scale = delta / (1.0 - delta);
    let mut half_width = f64::INFINITY;
    for iteration in 1..=max_iter {
        let w = op.apply(&h)?.values;
        let (lo, hi) = w
            .iter()
            .zip(&h)
            .map(|(a, b)| a - b)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
        half_width = 0.5 * scale * (hi - lo);
        if half_width <= 0.5 * kappa {
            let shift = 0.5 * scale * (lo + hi);
            let values: Vec<f64> = w.iter().map(|x| x + shift).collect();
            let check = op.apply(&values)?;
            let residual = crate::mdp::sup_distance(&check.values, &values);
            return Ok(EvSolution {
                ev: EvFunction { values },
                worst_case: check.worst_case,
                iterations: iteration,
                residual,
                error_bound: half_width,
            });
        }
        let anchor = w[0];
        h = w.iter().map(|x| x - anchor).collect();
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: half_width,
    })
}

/// Choice-specific values and maintenance probabilities of a decision rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceProbabilities {
    pub maintain_prob: Vec<f64>,
    /// `u(x, 0) + delta * worst-case continuation from x`.
    pub maintain_value: Vec<f64>,
    /// `u(x, 1) + delta * worst-case continuation from 0`.
    pub replace_value: Vec<f64>,
}

impl ChoiceProbabilities {
    /// Logit action probabilities `[maintain, replace]` per state.
    pub fn action_probs(&self) -> Vec<Vec<f64>> {
        self.maintain_prob.iter().map(|&p| vec![p, 1.0 - p]).collect()
    }

    /// Whether the rule replaces given shock-inclusive values.
    pub fn replaces(&self, state: usize, maintain_shock: f64, replace_shock: f64) -> bool {
        // ties keep the bus running
        self.replace_value[state] + replace_shock > self.maintain_value[state] + maintain_shock
    }
}

/// Logit maintenance probabilities implied by `ev` and its worst cases.
pub fn choice_probabilities(config: &ZurcherConfig, ev: &EvFunction, worst_case: &[Distribution]) -> Result<ChoiceProbabilities> {
    let n = config.n_states;
    if ev.values.len() != n || worst_case.len() != n {
        return Err(Error::SupportMismatch {
            left: ev.values.len().min(worst_case.len()),
            right: n,
        });
    }
    let continuation: Vec<f64> = (0..n)
        .map(|x| {
            worst_case[x]
                .probs()
                .iter()
                .enumerate()
                .map(|(j, q)| q * ev.values[config.destination(x, j)])
                .sum()
        })
        .collect();
    let replace = config.utility(0, true) + config.discount * continuation[0];
    let maintain_value: Vec<f64> = (0..n)
        .map(|x| config.utility(x, false) + config.discount * continuation[x])
        .collect();
    let maintain_prob = maintain_value
        .iter()
        .map(|&m| logistic(m - replace))
        .collect();
    Ok(ChoiceProbabilities {
        maintain_prob,
        maintain_value,
        replace_value: vec![replace; n],
    })
}

/// `1 / (1 + exp(-z))` without overflow.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Full decision rule at one confidence level.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustRule {
    pub confidence: f64,
    pub solution: EvSolution,
    pub choice: ChoiceProbabilities,
}

pub fn solve_rule(config: &ZurcherConfig, estimate: &Distribution, kappa: f64) -> Result<RobustRule> {
    solve_rule_from(config, estimate, kappa, None)
}

pub fn solve_rule_from(
    config: &ZurcherConfig,
    estimate: &Distribution,
    kappa: f64,
    start: Option<&[f64]>,
) -> Result<RobustRule> {
    let solution = solve_ev_from(config, estimate, kappa, DEFAULT_EV_MAX_ITER, start)?;
    let choice = choice_probabilities(config, &solution.ev, &solution.worst_case)?;
    Ok(RobustRule {
        confidence: config.confidence,
        solution,
        choice,
    })
}

/// Transition law governing actual mileage.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpLaw {
    /// One jump distribution for every state.
    Pooled(Distribution),
    /// A jump distribution per state.
    PerState(Vec<Distribution>),
}

impl JumpLaw {
    pub fn at(&self, state: usize) -> &Distribution {
        match self {
            JumpLaw::Pooled(d) => d,
            JumpLaw::PerState(v) => &v[state],
        }
    }
}

/// The model under a known jump law, for exact evaluation of decision rules.
pub fn true_mdp(config: &ZurcherConfig, law: &JumpLaw) -> Result<TrueMdp> {
    config.validate()?;
    let n = config.n_states;
    if let JumpLaw::PerState(v) = law {
        if v.len() != n {
            return Err(Error::SupportMismatch { left: v.len(), right: n });
        }
    }
    let sparse = |state: usize| -> Result<SparseLaw> {
        let d = law.at(state);
        if d.support_size() != config.max_jump + 1 {
            return Err(Error::SupportMismatch {
                left: d.support_size(),
                right: config.max_jump + 1,
            });
        }
        let support = (0..d.support_size()).map(|j| config.destination(state, j)).collect();
        SparseLaw::new(support, d.clone())
    };
    let regeneration = sparse(0)?;
    let mut utility = Vec::with_capacity(n);
    let mut transitions = Vec::with_capacity(n);
    for x in 0..n {
        utility.push(vec![config.utility(x, false), config.utility(x, true)]);
        transitions.push(vec![sparse(x)?, regeneration.clone()]);
    }
    TrueMdp::new(config.discount, utility, transitions)
}

/// Worst-case jump distribution at one state for a confidence and count.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseRow {
    pub confidence: f64,
    pub n_obs: u64,
    pub state: usize,
    pub probs: Distribution,
}

impl WorstCaseRow {
    /// Probability of moving `from_jump` bins or more.
    pub fn tail(&self, from_jump: usize) -> f64 {
        self.probs.probs().iter().skip(from_jump).sum()
    }
}

/// Worst-case jump distributions at `state` across confidence levels and
/// observation counts, each from its own converged robust solve.
pub fn worst_case_jump_table(
    config: &ZurcherConfig,
    estimate: &Distribution,
    omegas: &[f64],
    n_obs_variants: &[u64],
    state: usize,
    kappa: f64,
) -> Result<Vec<WorstCaseRow>> {
    if state >= config.n_states {
        return Err(Error::InvalidArgument(format!("state {state} outside the grid")));
    }
    let mut rows = Vec::new();
    for &n_obs in n_obs_variants {
        for &omega in omegas {
            if !(0.0..1.0).contains(&omega) {
                return Err(Error::InvalidArgument(format!("confidence {omega} must lie in [0, 1)")));
            }
            let cfg = ZurcherConfig {
                confidence: omega,
                pooled_n_obs: n_obs,
                ..config.clone()
            };
            let sol = solve_ev(&cfg, estimate, kappa)?;
            rows.push(WorstCaseRow {
                confidence: omega,
                n_obs,
                state,
                probs: sol.worst_case[state].clone(),
            });
        }
    }
    Ok(rows)
}

/// Standard Gumbel draw shifted to mean zero.
pub fn mean_zero_gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    // open interval keeps both logarithms finite
    let u: f64 = loop {
        let u = rng.random::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    -(-u.ln()).ln() - EULER_GAMMA
}

/// Simulated odometer panel standing in for a missing data file.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFleet {
    pub n_buses: usize,
    /// Readings per bus, so each bus contributes `n_months - 1` transitions.
    pub n_months: u32,
    pub jump_probs: Distribution,
    pub seed: u64,
}

impl Default for SyntheticFleet {
    fn default() -> Self {
        Self {
            n_buses: 37,
            n_months: 117,
            jump_probs: Distribution::new(SYNTHETIC_JUMP_PROBS.to_vec()).expect("valid constant"),
            seed: 0,
        }
    }
}

/// Simulates a fleet run by the as-if rule for the generating law and
/// records readings in miles since the last replacement.
pub fn generate_synthetic_fleet(config: &ZurcherConfig, fleet: &SyntheticFleet) -> Result<Vec<OdometerRow>> {
    let cfg = config.with_confidence(0.0);
    let rule = solve_rule(&cfg, &fleet.jump_probs, 1e-8)?;
    let mut rows = Vec::with_capacity(fleet.n_buses * fleet.n_months as usize);
    for bus in 0..fleet.n_buses {
        let mut rng = crate::seed::cell_rng(fleet.seed, &[bus as u64]);
        let mut state = 0usize;
        for month in 0..fleet.n_months {
            let e0 = mean_zero_gumbel(&mut rng);
            let e1 = mean_zero_gumbel(&mut rng);
            let replace = rule.choice.replaces(state, e0, e1);
            let offset: f64 = rng.random::<f64>() * cfg.bin_width;
            rows.push(OdometerRow {
                bus_id: format!("bus{bus:03}"),
                month: month + 1,
                odometer: (cfg.mileage(state) + offset).floor(),
                replace,
            });
            let jump = fleet.jump_probs.sample(&mut rng);
            let from = if replace { 0 } else { state };
            state = cfg.destination(from, jump);
        }
    }
    Ok(rows)
}
