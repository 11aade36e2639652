use robust_mdp::criteria::{bayes_select, maximin_select, uniform_prior};
use robust_mdp::experiments::*;
use robust_mdp::mdp::{evaluate_policy_finite_horizon, Policy};
use robust_mdp::simplex::Distribution;
use robust_mdp::zurcher::*;

fn desk() -> ZurcherConfig {
    Preset::Desk.zurcher_config()
}

fn synthetic() -> Distribution {
    Distribution::new(SYNTHETIC_JUMP_PROBS.to_vec()).unwrap()
}

fn small_sweep() -> ExAnteConfig {
    ExAnteConfig {
        samples_per_point: 3,
        omega_grid: vec![0.0, 0.5, 1.0],
        ..ExAnteConfig::preset(Preset::Desk)
    }
}

#[test]
fn simulated_fleet_matches_exact_finite_horizon() {
    let cfg = desk();
    let rule = solve_rule(&cfg, &synthetic(), 1e-8).unwrap();
    let law = JumpLaw::Pooled(synthetic());
    let sim = FleetSimConfig {
        n_buses: 400,
        n_months: 3_000,
        seed: 17,
        ..FleetSimConfig::default()
    };
    let paths = simulate_fleet(&cfg, std::slice::from_ref(&rule.choice), &law, &sim).unwrap();
    let truth = true_mdp(&cfg, &law).unwrap();
    let exact = evaluate_policy_finite_horizon(&truth, &Policy::Logit(rule.choice.action_probs()), 3_000).unwrap()[0];
    let gap = (paths.mean_total(0) - exact).abs();
    assert!(gap <= 3.0 * paths.std_error[0], "gap {gap} se {}", paths.std_error[0]);
    assert_eq!(paths.mean_path[0].len(), 3_000);
}

#[test]
fn fleet_results_do_not_depend_on_thread_count() {
    let cfg = desk();
    let rules: Vec<_> = [0.0, 0.9]
        .iter()
        .map(|&w| solve_rule(&cfg.with_confidence(w), &synthetic(), 1e-8).unwrap().choice)
        .collect();
    let law = JumpLaw::Pooled(synthetic());
    let sim = FleetSimConfig {
        n_buses: 70,
        n_months: 300,
        ..FleetSimConfig::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_fleet(&cfg, &rules, &law, &sim).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.mean_path, b.mean_path);
    assert_eq!(a.bus_totals, b.bus_totals);
    assert_eq!(a.trajectories, b.trajectories);
}

#[test]
fn misspecification_signs() {
    let grid = [0.0, 0.25, 0.5, 0.75, 0.95];
    let curve = misspecification_curve(&desk(), &synthetic(), &[0.0, 0.5, 0.95], &grid, 1e-8, &Evaluation::Exact).unwrap();
    assert!(curve.difference[1][0] <= 0.0 && curve.difference[2][0] <= 0.0);
    assert!(curve.difference[1][4] > 0.0 && curve.difference[2][4] > 0.0);
    assert!(curve.difference[0].iter().all(|&d| d == 0.0));
    assert!(curve.crossings[0].is_none());
    let (c5, c95) = (curve.crossings[1].unwrap(), curve.crossings[2].unwrap());
    assert!(c5 > 0.0 && c5 < c95 && c95 < 0.95);
    // the as-if rule loses value as the truth worsens
    for k in 1..grid.len() {
        assert!(curve.performance[0][k] < curve.performance[0][k - 1]);
    }
}

#[test]
fn forced_counts_score_the_asif_optimum() {
    let cfg = small_sweep();
    let model = cfg.model(&desk());
    let p0 = Distribution::new(vec![0.2, 0.2, 0.6]).unwrap();
    let scores = ex_ante_cell(&cfg, &model, &p0, &[11, 11, 33], (0, 0));
    let rule = solve_rule(&model, &p0, 1e-8).unwrap();
    let exact = exact_performance(&model, &rule.choice, &JumpLaw::Pooled(p0.clone())).unwrap();
    assert!((scores[0].as_ref().unwrap() - exact).abs() < 1e-6);
    // with no estimation noise nothing beats the as-if rule
    for s in &scores[1..] {
        assert!(*s.as_ref().unwrap() <= exact + 1e-6);
    }
    let failed = ex_ante_cell(&cfg, &model, &p0, &[0, 0, 0], (0, 0));
    assert!(failed.iter().all(|s| s.is_err()));
}

#[test]
fn sweep_is_deterministic_and_coupled() {
    let cfg = small_sweep();
    let a = ex_ante_sweep(&cfg, &desk()).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(2)
        .build()
        .unwrap()
        .install(|| ex_ante_sweep(&cfg, &desk()).unwrap());
    assert_eq!(a, b);
    assert!(a.failures.is_empty());
    assert_eq!(a.truths.len(), 6);
    for (truth, point) in a.truths.iter().zip(a.surface.points()) {
        assert_eq!(truth.probs(), point.as_slice());
    }
    let other = ex_ante_sweep(&ExAnteConfig { seed: 1, ..cfg }, &desk()).unwrap();
    assert_ne!(a.surface, other.surface);
    let s = &a.surface;
    let best = s.best_attainable().unwrap();
    for row in s.scores() {
        for (x, b) in row.iter().zip(best) {
            assert!(x <= b);
        }
    }
    let maximin = maximin_select(s);
    let bayes = bayes_select(s, &uniform_prior(6)).unwrap();
    assert!(s.candidates().contains(&maximin.candidate) && s.candidates().contains(&bayes.candidate));
}

#[test]
fn larger_samples_concentrate_estimates() {
    let cfg = ExAnteConfig::preset(Preset::Desk);
    let p0 = Distribution::new(vec![0.2, 0.4, 0.4]).unwrap();
    let spread = |draws: u64| {
        let cfg = ExAnteConfig {
            draws_per_sample: draws,
            ..cfg.clone()
        };
        (0..300)
            .map(|s| {
                let counts = sample_counts(&cfg, 1, s, &p0);
                let n: u64 = counts.iter().sum();
                counts
                    .iter()
                    .zip(p0.probs())
                    .map(|(&c, p)| (c as f64 / n as f64 - p).powi(2))
                    .sum::<f64>()
            })
            .sum::<f64>()
    };
    assert!(spread(550) < spread(55));
}

#[test]
fn smoothing_keeps_crossing_shape() {
    let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.025).collect();
    let diff: Vec<f64> = grid.iter().map(|w| w - 0.3).collect();
    let smooth = savitzky_golay_smooth(&diff, DEFAULT_WINDOW, DEFAULT_ORDER).unwrap();
    let crossing = crossing_point(&grid, &smooth).unwrap();
    assert!((crossing - 0.3).abs() < 1e-9);
}
