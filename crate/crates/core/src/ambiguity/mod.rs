//! Kullback-Leibler ambiguity sets: calibration from data and the inner
//! worst-case expectation over the set.
//!
//! The worst case of `q . v` over `{q : KL(q || p) <= rho}` is found through
//! its scalar dual
//!
//! ```text
//! max_{mu > 0}  -mu * rho - mu * ln sum_i p_i exp(-v_i / mu)
//! ```
//!
//! whose derivative in `mu` is `KL(q_mu || p) - rho` for the exponentially
//! tilted `q_mu ∝ p exp(-v / mu)`. The derivative is monotone, so the root is
//! bracketed and found by safeguarded Newton steps. Once `rho` reaches `-ln p(argmin v)` the tilt
//! degenerates and the minimizer is `p` conditioned on the argmin atoms.

mod chi2;

pub use chi2::{chi2_cdf, chi2_quantile, gamma_p, ln_gamma};

use crate::simplex::{kl_divergence, Distribution};
use crate::{Error, Result};

/// Radius of the KL ball that covers the truth with asymptotic probability
/// `w`: `F^{-1}_{k-1}(w) / (2 n)` for a support of `k` atoms.
///
/// `w = 1` asks for the whole simplex and yields an infinite radius.
pub fn calibrate_radius(n_obs: u64, support_size: usize, w: f64) -> Result<f64> {
    if support_size < 2 {
        return Err(Error::DegenerateSupport);
    }
    if n_obs == 0 {
        return Err(Error::InvalidArgument("calibration needs at least one observation".into()));
    }
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidArgument(format!("confidence {w} outside [0, 1]")));
    }
    if w == 1.0 {
        return Ok(f64::INFINITY);
    }
    let df = u32::try_from(support_size - 1)
        .map_err(|_| Error::InvalidArgument("support too large".into()))?;
    Ok(chi2_quantile(df, w)? / (2.0 * n_obs as f64))
}

/// KL ball around an estimated distribution, restricted to the atoms the
/// estimate charges.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySet {
    center: Distribution,
    radius: f64,
    n_obs: Option<u64>,
    confidence: Option<f64>,
}

impl AmbiguitySet {
    /// A ball with an explicit radius. The center must be strictly positive.
    pub fn with_radius(center: Distribution, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::InvalidArgument(format!("radius {radius} must be non-negative")));
        }
        if center.probs().iter().any(|&p| p <= 0.0) {
            return Err(Error::InvalidDistribution(
                "ambiguity set center must be strictly positive on its support".into(),
            ));
        }
        Ok(Self {
            center,
            radius,
            n_obs: None,
            confidence: None,
        })
    }

    /// A ball calibrated from `n_obs` observations at confidence `w`.
    ///
    /// Single-atom centers admit no ambiguity; they get radius zero.
    pub fn calibrated(center: Distribution, n_obs: u64, confidence: f64) -> Result<Self> {
        let radius = match calibrate_radius(n_obs, center.support_size(), confidence) {
            Ok(r) => r,
            Err(Error::DegenerateSupport) => 0.0,
            Err(e) => return Err(e),
        };
        let mut set = Self::with_radius(center, radius)?;
        set.n_obs = Some(n_obs);
        set.confidence = Some(confidence);
        Ok(set)
    }

    /// A set containing only the center.
    pub fn singleton(center: Distribution) -> Result<Self> {
        Self::with_radius(center, 0.0)
    }

    pub fn center(&self) -> &Distribution {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n_obs(&self) -> Option<u64> {
        self.n_obs
    }

    pub fn confidence(&self) -> Option<f64> {
        self.confidence
    }

    pub fn support_size(&self) -> usize {
        self.center.support_size()
    }
}

/// How the worst case was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplier {
    /// Zero radius, a single atom, or constant values: the center is optimal.
    Center,
    /// Interior solution with the optimal dual multiplier.
    Interior(f64),
    /// The radius reaches the break point; mass sits on the argmin atoms.
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseResult {
    pub value: f64,
    pub minimizer: Distribution,
    pub multiplier: Multiplier,
}

/// Radius beyond which the worst case puts all mass on the minimum-value
/// atoms: `-ln sum_{i in argmin v} p_i`.
pub fn break_radius(center: &Distribution, v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::INFINITY, f64::min);
    let mass: f64 = center
        .probs()
        .iter()
        .zip(v)
        .filter(|(_, &vi)| vi == m)
        .map(|(p, _)| p)
        .sum();
    -mass.ln()
}

/// Minimizes `q . v` over the ambiguity set.
pub fn worst_case_expectation(set: &AmbiguitySet, v: &[f64]) -> Result<WorstCaseResult> {
    let p = set.center();
    if v.len() != p.support_size() {
        return Err(Error::SupportMismatch {
            left: v.len(),
            right: p.support_size(),
        });
    }
    if let Some(index) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue { index });
    }

    let center_result = || WorstCaseResult {
        value: p.expect(v),
        minimizer: p.clone(),
        multiplier: Multiplier::Center,
    };

    let rho = set.radius();
    if rho == 0.0 || p.support_size() == 1 {
        return Ok(center_result());
    }
    let m = v.iter().copied().fold(f64::INFINITY, f64::min);
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == m {
        return Ok(WorstCaseResult {
            value: m,
            ..center_result()
        });
    }

    let gaps: Vec<f64> = v.iter().map(|x| x - m).collect();
    let boundary = || -> Result<WorstCaseResult> {
        let weights: Vec<f64> = p
            .probs()
            .iter()
            .zip(&gaps)
            .map(|(&pi, &g)| if g == 0.0 { pi } else { 0.0 })
            .collect();
        Ok(WorstCaseResult {
            value: m,
            minimizer: Distribution::from_weights(&weights)?,
            multiplier: Multiplier::Boundary,
        })
    };
    if rho >= break_radius(p, v) {
        return boundary();
    }

    let tilt = Tilt { p: p.probs(), gaps: &gaps };
    let Some(beta) = tilt.solve(rho, top - m) else {
        return boundary();
    };
    let q = tilt.tilted(beta);
    let value = m + q.iter().zip(&gaps).map(|(qi, g)| qi * g).sum::<f64>();
    Ok(WorstCaseResult {
        value,
        minimizer: Distribution::new(q)?,
        multiplier: Multiplier::Interior(1.0 / beta),
    })
}

/// Exponential tilting of `p` by value gaps `v - min v >= 0`, parameterized
/// by the inverse multiplier `beta = 1 / mu`.
struct Tilt<'a> {
    p: &'a [f64],
    gaps: &'a [f64],
}

impl Tilt<'_> {
    fn tilted(&self, beta: f64) -> Vec<f64> {
        let mut q: Vec<f64> = self
            .p
            .iter()
            .zip(self.gaps)
            .map(|(pi, g)| pi * (-beta * g).exp())
            .collect();
        let s: f64 = q.iter().sum();
        q.iter_mut().for_each(|x| *x /= s);
        q
    }

    /// `KL(q_beta || p)` and its derivative `beta * Var_q(gap)`.
    fn divergence(&self, beta: f64) -> (f64, f64) {
        let mut s = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (pi, g) in self.p.iter().zip(self.gaps) {
            let e = pi * (-beta * g).exp();
            s += e;
            m1 += e * g;
            m2 += e * g * g;
        }
        let mean = m1 / s;
        let var = (m2 / s - mean * mean).max(0.0);
        ((-beta * mean - s.ln()).max(0.0), beta * var)
    }

    /// Root of `KL(q_beta || p) = rho`, which is increasing in `beta`.
    ///
    /// Newton steps are taken inside a bracket that shrinks on every
    /// evaluation; steps that leave the bracket fall back to bisection.
    /// Returns `None` when the root lies beyond the representable range,
    /// i.e. the break point is reached numerically.
    fn solve(&self, rho: f64, scale: f64) -> Option<f64> {
        let mut lo = 0.0;
        let mut hi = 1.0 / scale;
        loop {
            let (kl, _) = self.divergence(hi);
            if kl > rho {
                break;
            }
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() || hi > 1e300 / scale {
                return None;
            }
        }
        let mut beta = 0.5 * (lo + hi);
        for _ in 0..500 {
            let (kl, slope) = self.divergence(beta);
            let f = kl - rho;
            if f == 0.0 {
                return Some(beta);
            }
            if f > 0.0 {
                hi = beta;
            } else {
                lo = beta;
            }
            let newton = beta - f / slope;
            let next = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - beta).abs() <= 4.0 * f64::EPSILON * beta || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Some(next);
            }
            beta = next;
        }
        Some(beta)
    }
}

/// Checks a result against its set: KL feasibility and value consistency.
pub fn verify_worst_case(set: &AmbiguitySet, v: &[f64], result: &WorstCaseResult) -> Result<bool> {
    let kl = kl_divergence(&result.minimizer, set.center())?;
    let feasible = kl <= set.radius() + 1e-9;
    let consistent = (result.minimizer.expect(v) - result.value).abs() <= 1e-9 * (1.0 + result.value.abs());
    Ok(feasible && consistent)
}
