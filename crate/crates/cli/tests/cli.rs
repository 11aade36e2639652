use std::path::Path;
use std::process::{Command, Output};

fn rmdp(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmdp"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn urn_default_and_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmdp(&["urn"], dir.path());
    assert!(out.status.success());
    let s = json(&dir.path().join("urn_summary.json"));
    assert!((s["lambda_maximin"].as_f64().unwrap() - 0.876).abs() < 0.002);
    assert!((s["lambda_bayes"].as_f64().unwrap() - 0.9615).abs() < 0.002);
    for f in ["urn_payoffs.csv", "urn_rankings.csv", "urn_optima.csv"] {
        assert!(dir.path().join(f).exists());
    }

    let one = dir.path().join("one");
    assert!(rmdp(&["urn", "--set", "lambda_grid=0.3"], &one).status.success());
    let s = json(&one.join("urn_summary.json"));
    for key in ["lambda_maximin", "lambda_regret", "lambda_bayes"] {
        assert_eq!(s[key].as_f64().unwrap(), 0.3);
    }
}

#[test]
fn zurcher_solve_outputs_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmdp(&["zurcher-solve", "--set", "omegas=0,0.5,0.95"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ev = rows(&dir.path().join("ev.csv"));
    let prob = |omega: &str, state: usize| -> f64 {
        ev.iter()
            .find(|r| r[0] == omega && r[1] == state.to_string())
            .unwrap()[4]
            .parse()
            .unwrap()
    };
    for x in 1..30 {
        assert!(prob("0", x) <= prob("0", x - 1));
    }
    for x in 0..30 {
        assert!(prob("0.5", x) >= prob("0", x));
        assert!(prob("0.95", x) >= prob("0", x));
    }
    // the synthetic panel is written out and can be read back in
    let again = dir.path().join("again");
    let data = format!("data={}", dir.path().join("odometer.csv").display());
    assert!(rmdp(&["zurcher-solve", "--set", &data], &again).status.success());
    assert_eq!(
        std::fs::read(dir.path().join("mle.csv")).unwrap(),
        std::fs::read(again.join("mle.csv")).unwrap()
    );
}

#[test]
fn malformed_data_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    std::fs::write(&data, "bus_id,month,odometer,replace\na,1,0,0\na,2,6000,0\na,3,oops,0\n").unwrap();
    let out = rmdp(&["zurcher-solve", "--set", &format!("data={}", data.display())], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    std::fs::write(&data, "bus_id,month,odometer,replace\na,1,0,0\na,2,90000,0\n").unwrap();
    let out = rmdp(&["zurcher-solve", "--set", &format!("data={}", data.display())], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(rmdp(&["urn", "--set", "nonsense=1"], dir.path()).status.code(), Some(2));
    assert_eq!(rmdp(&["urn", "--preset", "huge"], dir.path()).status.code(), Some(2));
    assert_eq!(rmdp(&["urn", "--set", "n_draws=0"], dir.path()).status.code(), Some(2));
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n_draws = 10\nlambda_steps = 10\n").unwrap();
    let out = rmdp(&["urn", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    assert_eq!(json(&dir.path().join("urn_summary.json"))["n_lambdas"], 11);
}

#[test]
fn solve_mdp_and_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"discount":0.9,"utility":[[1.0,0.0],[0.0,2.0]],
            "transitions":[[{"support":[0],"center":[1.0],"radius":0.0},{"support":[0,1],"center":[0.5,0.5],"radius":0.1}],
                           [{"support":[1],"center":[1.0],"radius":0.0},{"support":[0,1],"center":[0.3,0.7],"radius":0.05}]]}"#,
    )
    .unwrap();
    let arg = format!("spec={}", spec.display());
    let out = rmdp(&["solve-mdp", "--set", &arg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sol = json(&dir.path().join("mdp_solution.json"));
    assert_eq!(sol["values"].as_array().unwrap().len(), 2);
    assert!(sol["residual"].as_f64().unwrap() <= 1e-8);
    let out = rmdp(&["solve-mdp", "--set", &arg, "--set", "max_iter=3"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    std::fs::write(&spec, "{").unwrap();
    assert_eq!(rmdp(&["solve-mdp", "--set", &arg], dir.path()).status.code(), Some(3));
}

#[test]
fn small_exante_round_trips_through_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmdp(
        &["exante", "--jobs", "2", "--set", "samples_per_point=2", "--set", "omega_grid=0,0.1,0.5"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["surface.csv", "criteria.csv", "criteria.json", "contrast.csv", "errors.csv", "exante_summary.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let again = dir.path().join("again");
    let surface = format!("surface={}", dir.path().join("surface.csv").display());
    assert!(rmdp(&["criteria", "--set", &surface], &again).status.success());
    assert_eq!(
        std::fs::read(dir.path().join("criteria.json")).unwrap(),
        std::fs::read(again.join("criteria.json")).unwrap()
    );
    assert_eq!(rmdp(&["criteria"], &again).status.code(), Some(2));
}

#[test]
fn small_expost_emits_declared_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmdp(
        &[
            "expost",
            "--set",
            "omega_primes=0,0.25,0.5,0.75,0.95",
            "--set",
            "n_buses=20",
            "--set",
            "n_months=200",
            "--set",
            "window=3",
            "--set",
            "poly_order=1",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "misspecification.csv",
        "fleet_paths.csv",
        "fleet_trajectories.csv",
        "expost_summary.json",
        "odometer.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let s = json(&dir.path().join("expost_summary.json"));
    assert!(s["crossings"][0].is_null());
    assert!(s["asif_degradation"].as_f64().unwrap() > 0.0);
    let m = rows(&dir.path().join("misspecification.csv"));
    assert_eq!(m.len(), 15);
    assert!(m.iter().all(|r| !r[4].is_empty()));
}
