//! Finite probability distributions and the probability simplex.

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::seed;
use crate::{Error, Result};

/// Tolerance on the total mass of a [`Distribution`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability vector over a finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates non-negativity and unit mass.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(i) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weight {} at index {i} is negative or not finite",
                probs[i]
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes non-negative weights to unit mass.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    /// Empirical frequencies of a count vector.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidDistribution("no observations".into()));
        }
        Self::new(counts.iter().map(|&c| c as f64 / n as f64).collect())
    }

    pub fn uniform(support_size: usize) -> Result<Self> {
        if support_size == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        Ok(Self {
            probs: vec![1.0 / support_size as f64; support_size],
        })
    }

    pub fn point_mass(support_size: usize, index: usize) -> Result<Self> {
        if index >= support_size {
            return Err(Error::InvalidArgument(format!(
                "atom {index} outside support of size {support_size}"
            )));
        }
        let mut probs = vec![0.0; support_size];
        probs[index] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    /// Expectation of `values` under this distribution.
    pub fn expect(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.probs.len());
        self.probs.iter().zip(values).map(|(p, v)| p * v).sum()
    }

    /// Indices of atoms with strictly positive mass.
    pub fn positive_support(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&i| self.probs[i] > 0.0).collect()
    }

    /// Restriction to the given atoms, renormalized.
    pub fn restrict(&self, atoms: &[usize]) -> Result<Self> {
        let weights: Vec<f64> = atoms.iter().map(|&i| self.probs[i]).collect();
        Self::from_weights(&weights)
    }

    /// Inverse-CDF lookup for a uniform draw `u` in `[0, 1)`.
    pub fn quantile_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let last = self.probs.len() - 1;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // round-off can leave `acc` just below one; fall back to the last
        // atom that carries mass
        (0..=last).rev().find(|&i| self.probs[i] > 0.0).unwrap_or(last)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.quantile_index(rng.random::<f64>())
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

/// Kullback-Leibler divergence `KL(q || p) = sum_i q_i ln(q_i / p_i)`.
///
/// Terms with `q_i = 0` contribute nothing. An atom with `q_i > 0` and
/// `p_i = 0` makes the divergence infinite, which is reported as
/// [`Error::InfiniteDivergence`].
pub fn kl_divergence(q: &Distribution, p: &Distribution) -> Result<f64> {
    if q.support_size() != p.support_size() {
        return Err(Error::SupportMismatch {
            left: q.support_size(),
            right: p.support_size(),
        });
    }
    let mut total = 0.0;
    for (i, (&qi, &pi)) in q.probs.iter().zip(&p.probs).enumerate() {
        if qi == 0.0 {
            continue;
        }
        if pi == 0.0 {
            return Err(Error::InfiniteDivergence { index: i });
        }
        total += qi * (qi / pi).ln();
    }
    // the exact value is non-negative; clamp round-off
    Ok(total.max(0.0))
}

/// Uniform grid over the interior of the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexGrid {
    increment: f64,
    compositions: Vec<Vec<u32>>,
    points: Vec<Distribution>,
}

impl SimplexGrid {
    pub fn increment(&self) -> f64 {
        self.increment
    }

    pub fn points(&self) -> &[Distribution] {
        &self.points
    }

    /// Integer compositions behind each point, in units of the increment.
    pub fn compositions(&self) -> &[Vec<u32>] {
        &self.compositions
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Enumerates every strictly interior point of the `dim`-atom simplex whose
/// weights are multiples of `increment`.
///
/// Points are built from integer compositions of `1 / increment` into `dim`
/// positive parts, in lexicographic order.
pub fn build_simplex_grid(dim: usize, increment: f64) -> Result<SimplexGrid> {
    if !(increment > 0.0 && increment < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "grid increment {increment} must lie in (0, 1)"
        )));
    }
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid dimension {dim} must be at least 2"
        )));
    }
    let units = (1.0 / increment).round();
    if (units * increment - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "increment {increment} does not divide 1"
        )));
    }
    let units = units as u32;
    if (units as usize) < dim {
        return Err(Error::EmptyGrid { dim, increment });
    }

    let mut compositions = Vec::new();
    let mut current = Vec::with_capacity(dim);
    compose(units, dim, &mut current, &mut compositions);

    let points = compositions
        .iter()
        .map(|parts| {
            let probs = parts
                .iter()
                .map(|&k| f64::from(k) / f64::from(units))
                .collect();
            Distribution::new(probs)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SimplexGrid {
        increment,
        compositions,
        points,
    })
}

fn compose(remaining: u32, slots: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slots == 1 {
        current.push(remaining);
        out.push(current.clone());
        current.pop();
        return;
    }
    // leave at least one unit for each remaining slot
    let max_here = remaining - (slots as u32 - 1);
    for k in 1..=max_here {
        current.push(k);
        compose(remaining - k, slots - 1, current, out);
        current.pop();
    }
}

/// Draws `n` categorical samples from `p` and returns the count per atom.
pub fn multinomial_sample(p: &Distribution, n: u64, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let mut rng = seed::rng(seed);
    Ok(multinomial_sample_with(p, n, &mut rng))
}

/// As [`multinomial_sample`], drawing from a caller-owned generator.
pub fn multinomial_sample_with<R: Rng + ?Sized>(p: &Distribution, n: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; p.support_size()];
    for _ in 0..n {
        counts[p.sample(rng)] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(p: &[f64]) -> Distribution {
        Distribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
        assert!(Distribution::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn kl_examples() {
        let half = dist(&[0.5, 0.5]);
        assert_eq!(kl_divergence(&half, &half).unwrap(), 0.0);
        // 0.5 ln 2 + 0.5 ln(2/3)
        let v = kl_divergence(&half, &dist(&[0.25, 0.75])).unwrap();
        assert!((v - 0.143_841_036_225_890_2).abs() < 1e-12, "{v}");
        let v = kl_divergence(&dist(&[1.0, 0.0]), &half).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn kl_errors() {
        let err = kl_divergence(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap_err();
        assert_eq!(err, Error::InfiniteDivergence { index: 1 });
        let err = kl_divergence(&dist(&[0.5, 0.5]), &dist(&[0.2, 0.3, 0.5])).unwrap_err();
        assert!(matches!(err, Error::SupportMismatch { .. }));
    }

    #[test]
    fn grid_counts() {
        let g = build_simplex_grid(3, 0.1).unwrap();
        assert_eq!(g.len(), 36);
        let g = build_simplex_grid(2, 0.5).unwrap();
        assert_eq!(g.points(), &[dist(&[0.5, 0.5])]);
        assert_eq!(
            build_simplex_grid(3, 0.5).unwrap_err(),
            Error::EmptyGrid { dim: 3, increment: 0.5 }
        );
        let g = build_simplex_grid(3, 0.2).unwrap();
        assert_eq!(g.len(), 6);
    }

    #[test]
    fn grid_rejects_bad_increment() {
        assert!(build_simplex_grid(3, 0.0).is_err());
        assert!(build_simplex_grid(3, 1.0).is_err());
        assert!(build_simplex_grid(3, 0.3).is_err());
        assert!(build_simplex_grid(1, 0.1).is_err());
    }

    #[test]
    fn grid_points_are_interior_multiples() {
        let g = build_simplex_grid(4, 0.1).unwrap();
        // compositions of 10 into 4 positive parts: C(9, 3)
        assert_eq!(g.len(), 84);
        for p in g.points() {
            for &w in p.probs() {
                assert!(w >= g.increment() - 1e-12);
                let k = w / g.increment();
                assert!((k - k.round()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn multinomial_degenerate_and_deterministic() {
        let p = dist(&[1.0, 0.0, 0.0]);
        assert_eq!(multinomial_sample(&p, 55, 3).unwrap(), vec![55, 0, 0]);
        let q = dist(&[0.2, 0.5, 0.3]);
        assert_eq!(
            multinomial_sample(&q, 1000, 11).unwrap(),
            multinomial_sample(&q, 1000, 11).unwrap()
        );
        assert!(multinomial_sample(&q, 0, 1).is_err());
    }

    #[test]
    fn multinomial_within_three_sigma() {
        let p = Distribution::uniform(3).unwrap();
        let n = 3_000_000u64;
        let counts = multinomial_sample(&p, n, 2024).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), n);
        let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - 1e6).abs() < 3.0 * sigma, "{c}");
        }
    }

    fn interior(len: usize) -> impl Strategy<Value = Distribution> {
        prop::collection::vec(0.05f64..1.0, len)
            .prop_map(|w| Distribution::from_weights(&w).unwrap())
    }

    proptest! {
        #[test]
        fn kl_jointly_convex(
            (q, p, q2, p2) in (2usize..6).prop_flat_map(|n| (interior(n), interior(n), interior(n), interior(n))),
            t in 0.0f64..=1.0,
        ) {
            let mix = |a: &Distribution, b: &Distribution| {
                let w: Vec<f64> = a.probs().iter().zip(b.probs()).map(|(x, y)| t * x + (1.0 - t) * y).collect();
                Distribution::from_weights(&w).unwrap()
            };
            let lhs = kl_divergence(&mix(&q, &q2), &mix(&p, &p2)).unwrap();
            let rhs = t * kl_divergence(&q, &p).unwrap() + (1.0 - t) * kl_divergence(&q2, &p2).unwrap();
            prop_assert!(lhs <= rhs + 1e-10);
        }
    }

    #[test]
    fn kl_zero_iff_equal_on_grid() {
        let g = build_simplex_grid(3, 0.1).unwrap();
        for (i, q) in g.points().iter().enumerate() {
            for (j, p) in g.points().iter().enumerate() {
                let d = kl_divergence(q, p).unwrap();
                if i == j {
                    assert!(d.abs() < 1e-15);
                } else {
                    assert!(d > 1e-6);
                }
            }
        }
    }
}
