//! Reference implementations used as test oracles. None of them share code
//! with the solvers under test beyond the plain data types.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, RngExt};
use robust_mdp::ambiguity::AmbiguitySet;
use robust_mdp::mdp::{MdpSpec, TransitionSet};
use robust_mdp::simplex::Distribution;
use robust_mdp::zurcher::ZurcherConfig;

/// Smallest `q . v` over grid points of step `step` with `KL(q || p) <= rho`.
/// Supports of size 2 or 3 only.
pub fn grid_worst_case(p: &[f64], v: &[f64], rho: f64, step: f64) -> f64 {
    let m = (1.0 / step).round() as usize;
    let kl = |q: &[f64]| -> f64 {
        q.iter()
            .zip(p)
            .filter(|(qi, _)| **qi > 0.0)
            .map(|(qi, pi)| qi * (qi / pi).ln())
            .sum()
    };
    let mut best = f64::INFINITY;
    match p.len() {
        2 => {
            for i in 0..=m {
                let a = i as f64 / m as f64;
                let q = [a, 1.0 - a];
                if kl(&q) <= rho {
                    best = best.min(a * v[0] + (1.0 - a) * v[1]);
                }
            }
        }
        3 => {
            for i in 0..=m {
                for j in 0..=(m - i) {
                    let a = i as f64 / m as f64;
                    let b = j as f64 / m as f64;
                    let q = [a, b, (1.0 - a - b).max(0.0)];
                    let value = q[0] * v[0] + q[1] * v[1] + q[2] * v[2];
                    if value < best && kl(&q) <= rho {
                        best = value;
                    }
                }
            }
        }
        _ => panic!("grid oracle supports two or three atoms"),
    }
    best
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Chi-squared CDF from the density integrated numerically, with the gamma
/// normalizer itself obtained by quadrature. Substituting `t = s^2` removes
/// the square-root behaviour at the origin.
pub fn chi2_cdf_quadrature(df: u32, x: f64) -> f64 {
    let k = f64::from(df);
    let kernel = |s: f64| 2.0 * s.powf(k - 1.0) * (-s * s / 2.0).exp();
    let total = simpson(kernel, 0.0, 40.0, 200_000);
    simpson(kernel, 0.0, x.sqrt(), 200_000) / total
}

pub fn chi2_quantile_quadrature(df: u32, w: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 100.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if chi2_cdf_quadrature(df, mid) < w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Random strictly positive distribution on `n` atoms.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Distribution {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|x| x / s).collect();
    let rest: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - rest;
    Distribution::new(p).unwrap()
}

/// Random robust MDP; radii of zero (singletons) and beyond the break
/// point both occur.
pub fn random_spec<R: Rng>(rng: &mut R, n_states: usize, n_actions: usize, discount: f64, nominal: bool) -> MdpSpec {
    let mut utility = Vec::new();
    let mut transitions = Vec::new();
    for _ in 0..n_states {
        let mut urow = Vec::new();
        let mut trow = Vec::new();
        for _ in 0..n_actions {
            urow.push(rng.random_range(-1.0..1.0));
            let k = rng.random_range(1..=n_states.min(4));
            let mut support: Vec<usize> = (0..n_states).collect();
            for i in 0..k {
                let j = rng.random_range(i..n_states);
                support.swap(i, j);
            }
            support.truncate(k);
            let center = random_distribution(rng, k);
            let radius = if nominal {
                0.0
            } else {
                match rng.random_range(0..4) {
                    0 => 0.0,
                    1 => 10.0,
                    _ => rng.random_range(0.0..0.5),
                }
            };
            let set = AmbiguitySet::with_radius(center, radius).unwrap();
            trow.push(TransitionSet::new(support, set).unwrap());
        }
        utility.push(urow);
        transitions.push(trow);
    }
    MdpSpec::new(discount, utility, transitions).unwrap()
}

fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    // Gaussian elimination with partial pivoting
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Values of a deterministic policy under the center laws of `spec`.
pub fn policy_values(spec: &MdpSpec, policy: &[usize]) -> Vec<f64> {
    let n = spec.n_states();
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for s in 0..n {
        a[s][s] += 1.0;
        let t = spec.transition(s, policy[s]);
        for (&d, &q) in t.support().iter().zip(t.set().center().probs()) {
            a[s][d] -= spec.discount() * q;
        }
        b[s] = spec.utility(s, policy[s]);
    }
    solve_dense(&mut a, &mut b)
}

/// Classic (non-robust) optimum under the center laws by policy iteration.
pub fn classic_policy_iteration(spec: &MdpSpec) -> Vec<f64> {
    let n = spec.n_states();
    let mut policy = vec![0usize; n];
    loop {
        let v = policy_values(spec, &policy);
        let mut changed = false;
        for s in 0..n {
            let q = |a: usize| {
                let t = spec.transition(s, a);
                spec.utility(s, a)
                    + spec.discount()
                        * t.support().iter().zip(t.set().center().probs()).map(|(&d, q)| q * v[d]).sum::<f64>()
            };
            let current = q(policy[s]);
            for a in 0..spec.n_actions() {
                if q(a) > current + 1e-12 * (1.0 + current.abs()) {
                    policy[s] = a;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            return v;
        }
    }
}

/// Textbook value iteration under the center laws from `v = 0`, stopping
/// once successive iterates are within `kappa`.
pub fn classic_value_iteration(spec: &MdpSpec, kappa: f64) -> Vec<f64> {
    let n = spec.n_states();
    let mut v = vec![0.0; n];
    loop {
        let next: Vec<f64> = (0..n)
            .map(|s| {
                (0..spec.n_actions())
                    .map(|a| {
                        let t = spec.transition(s, a);
                        spec.utility(s, a)
                            + spec.discount()
                                * t.support().iter().zip(t.set().center().probs()).map(|(&d, q)| q * v[d]).sum::<f64>()
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let diff = next.iter().zip(&v).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        v = next;
        if diff <= kappa {
            return v;
        }
    }
}

/// Non-robust bus-replacement fixed point by Newton-Kantorovich iteration
/// on `V = lse(u0 + delta P V, -RC + delta P0 V)`.
pub fn classic_bus_ev(cfg: &ZurcherConfig, p: &[f64]) -> Vec<f64> {
    let n = cfg.n_states;
    let dest = |x: usize, j: usize| (x + j).min(n - 1);
    let cont = |v: &[f64], x: usize| -> f64 { p.iter().enumerate().map(|(j, q)| q * v[dest(x, j)]).sum() };
    let mut v = vec![0.0; n];
    for _ in 0..200 {
        let c0 = cont(&v, 0);
        let mut resid = vec![0.0; n];
        let mut jac = vec![vec![0.0; n]; n];
        for x in 0..n {
            let a = -cfg.maintenance_slope * x as f64 + cfg.discount * cont(&v, x);
            let b = -cfg.replacement_cost + cfg.discount * c0;
            let m = a.max(b);
            let lse = m + ((a - m).exp() + (b - m).exp()).ln();
            let pa = (a - lse).exp();
            resid[x] = lse - v[x];
            jac[x][x] += 1.0;
            for (j, q) in p.iter().enumerate() {
                jac[x][dest(x, j)] -= cfg.discount * pa * q;
                jac[x][dest(0, j)] -= cfg.discount * (1.0 - pa) * q;
            }
        }
        let step = solve_dense(&mut jac, &mut resid);
        let size = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        for (vi, s) in v.iter_mut().zip(&step) {
            *vi += s;
        }
        if size < 1e-11 * (1.0 + v[0].abs()) {
            break;
        }
    }
    v
}
