//! Acceptance criteria 1–10, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use orlicz_core::config::RunConfig;
use orlicz_core::polytope::Polytope;
use orlicz_core::suites::{run_suite, SuiteReport};
use orlicz_core::valuation::{check_cphi, default_beta_grid, XiFunction};
use orlicz_core::young::YoungFunction;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn from_report(rep: &SuiteReport, extra: &str) -> Outcome {
    let first = rep.first_failure.as_ref().map(|v| format!("; first counterexample {v}")).unwrap_or_default();
    outcome(rep.pass, format!("max residual {:e}{extra}{first}", rep.max_residual))
}

fn cfg() -> RunConfig {
    RunConfig::default()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn moment_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    let tri = Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap().moment();
    worst = worst.max(tri.0.iter().map(|m| (m - 1.0 / 6.0).abs()).fold(0.0, f64::max));
    for n in 3..=5usize {
        let mut pts = vec![vec![0.0; n]];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            pts.push(e);
        }
        let m = Polytope::new(n, pts).unwrap().moment();
        let want = 1.0 / factorial(n as u32 + 1);
        worst = worst.max(m.0.iter().map(|x| (x - want).abs()).fold(0.0, f64::max));
    }
    outcome(worst <= 1e-12, format!("max |m − 1/(n+1)!| = {worst:e} over n = 2..5"))
}

/// `sup_s (st − φ(s))` by golden-section search on a bracket grown until the objective falls.
fn legendre(phi: &YoungFunction, t: f64) -> f64 {
    let g = |s: f64| s * t - phi.eval(s).unwrap();
    let mut hi = 1.0;
    while g(2.0 * hi) > g(hi) {
        hi *= 2.0;
    }
    hi *= 2.0;
    let (mut a, mut b) = (0.0f64, hi);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if g(c) >= g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    g(0.5 * (a + b))
}

fn conjugate_duality() -> Outcome {
    let grid: Vec<f64> = (0..100).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 99.0)).collect();
    let (mut legendre_err, mut equality_err): (f64, f64) = (0.0, 0.0);
    for p in [1.5, 2.0, 3.0, 5.0] {
        let phi = YoungFunction::power(p).unwrap();
        let star = phi.conjugate().unwrap().phi_star;
        for &t in &grid {
            let want = legendre(&phi, t);
            let got = star.eval(t).unwrap();
            legendre_err = legendre_err.max((got - want).abs() / want.abs().max(1.0));
        }
        for &s in &grid {
            let t = phi.density(s).unwrap();
            let lhs = s * t;
            let rhs = phi.eval(s).unwrap() + star.eval(t).unwrap();
            equality_err = equality_err.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    outcome(
        legendre_err <= 1e-8 && equality_err <= 1e-8,
        format!("Legendre oracle gap {legendre_err:e}, equality-case gap {equality_err:e}"),
    )
}

fn limits() -> Outcome {
    let grid: Vec<f64> = (-24..=80).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
    let families = [
        ("power 1.5", YoungFunction::power(1.5).unwrap()),
        ("power 2", YoungFunction::power(2.0).unwrap()),
        ("power 3", YoungFunction::power(3.0).unwrap()),
        ("power 5", YoungFunction::power(5.0).unwrap()),
        ("scaled power", YoungFunction::scaled_power(2.0, 3.0).unwrap()),
        ("exp", YoungFunction::exp()),
        ("scaled exp", YoungFunction::scaled_exp(0.5).unwrap()),
    ];
    let mut bad = Vec::new();
    for (name, phi) in &families {
        let r = phi.verify_limits(&grid).unwrap();
        let ok = r.phi_ratio_nondecreasing
            && r.inverse_ratio_nonincreasing
            && r.phi_ratio_exceeds(1e6)
            && r.inverse_ratio_below(1e-6);
        if !ok {
            bad.push(*name);
        }
    }
    outcome(bad.is_empty(), format!("{} families; failing: {bad:?}", families.len()))
}

fn divergence() -> Outcome {
    let phi = YoungFunction::power(2.0).unwrap();
    let xi = XiFunction::polynomial(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
    let cphi = check_cphi(&xi, &phi, &default_beta_grid()).unwrap();
    let rep = run_suite("lemma15", &RunConfig { truncation: 50, ..cfg() }).unwrap();
    let lower = rep.summary["lower_bound"].as_f64().unwrap_or(f64::NAN);
    let modular = rep.summary["modular"].as_f64().unwrap_or(f64::NAN);
    let ok = rep.pass && !cphi.certified_on_grid && lower > 40.0 && modular <= 1.0;
    outcome(ok, format!("ρ(h_50) = {modular}, Σ c/(c+r) = {lower}, C_φ divergence {:?}", cphi.divergence))
}

fn continuity() -> Outcome {
    let rep = run_suite("continuity", &RunConfig { depth: 12, ..cfg() }).unwrap();
    let last = rep.summary["final_norm_gap"].as_f64().unwrap_or(f64::NAN);
    let first = rep.first_failure.as_ref().map(|v| format!("; first counterexample {v}")).unwrap_or_default();
    outcome(rep.pass, format!("‖χ_C12 − χ_Q‖ = {last:e} (required < 1e-3){first}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_orlicz");
    let mut diffs = Vec::new();
    for suite in ["valuation", "covariance", "lemma3", "lemma8", "lemma15", "continuity", "young-limits"] {
        let mut outs = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("{suite}-{k}.csv"));
            let status = Command::new(bin)
                .args(["verify", suite, "--seed", "7", "--format", "csv", "--out"])
                .arg(&path)
                .env_remove("ORLICZ_CONFIG")
                .output()
                .unwrap();
            assert!(status.status.code().is_some());
            outs.push(std::fs::read(&path).unwrap_or_default());
        }
        if outs[0].is_empty() || outs[0] != outs[1] {
            diffs.push(suite);
        }
    }
    outcome(diffs.is_empty(), format!("byte-identical reruns; differing: {diffs:?}"))
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "moment exactness", Duration::from_secs(1), moment_exactness),
        (2, "indicator norm cross-validation", Duration::from_secs(30), || {
            from_report(&run_suite("lemma3", &RunConfig { cases: 50, ..cfg() }).unwrap(), "")
        }),
        (3, "conjugate duality", Duration::from_secs(10), conjugate_duality),
        (4, "growth limits", Duration::from_secs(5), limits),
        (5, "valuation identity", Duration::from_secs(60), || {
            from_report(&run_suite("valuation", &RunConfig { pairs: 200, ..cfg() }).unwrap(), " over 200 pairs per n ∈ {2,3}")
        }),
        (6, "SL(n) covariance", Duration::from_secs(60), || {
            from_report(&run_suite("covariance", &RunConfig { maps: 100, ..cfg() }).unwrap(), " over 100 maps per n ∈ {2,3} plus diagonals")
        }),
        (7, "planar coefficient reconstruction", Duration::from_secs(5), || {
            let rep = run_suite("lemma8", &cfg()).unwrap();
            from_report(&rep, &format!(", rank {}, solution {}", rep.summary["rank"], rep.summary["solution"]))
        }),
        (8, "divergence construction", Duration::from_secs(10), divergence),
        (9, "continuity probes", Duration::from_secs(30), continuity),
        (10, "determinism", Duration::from_secs(60), determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= budget;
        failed += !pass as u32;
        println!(
            "{} criterion {id:>2} {name}: {} [{:.2}s, budget {}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
