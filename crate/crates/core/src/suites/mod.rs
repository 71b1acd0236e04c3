//! Verification batteries behind `orlicz verify`.
//!
//! Every battery is a pure function of the [`RunConfig`]: random inputs come from
//! per-case ChaCha streams of the configured seed, so tables are reproducible bit for bit.

pub mod generate;
mod report;

use serde_json::json;

pub use report::{fmt_f64, to_json, Cell, SuiteReport};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::measure::{cube_cover_detailed, Region};
use crate::numeric::Cubature;
use crate::orlicz::{norm_distance, orlicz_norm_amemiya, SimpleFunction};
use crate::polytope::{lemma8_experiment, Polytope, UnimodularMap};
use crate::row;
use crate::valuation::{
    check_covariance, check_cphi, check_valuation_identity, continuity_probe, default_beta_grid, find_witnesses,
    lemma15_construct, psi, CounterexampleSpec, Tail, XiFunction,
};
use crate::young::YoungFunction;
use generate::{closed_form_phi, indicator_region, polytope_function, refinable_pair, rng, xi_family, PAIR_KINDS};
use rand::Rng;

pub const SUITES: [&str; 7] = ["valuation", "covariance", "lemma3", "lemma8", "lemma15", "continuity", "young-limits"];

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    match name {
        "valuation" => valuation(cfg),
        "covariance" => covariance(cfg),
        "lemma3" => indicator_norms(cfg),
        "lemma8" => planar_limits(cfg),
        "lemma15" => divergence(cfg),
        "continuity" => continuity(cfg),
        "young-limits" => young_limits(cfg),
        _ => Err(Error::Parse(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", ")))),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn stream(tag: u64, n: usize, i: usize) -> u64 {
    tag << 48 | (n as u64) << 32 | i as u64
}

/// `Ψ(f∨g) + Ψ(f∧g) = Ψ(f) + Ψ(g)` on random refinable pairs, plus the sign split and `Ψ(0) = 0`.
fn valuation(cfg: &RunConfig) -> Result<SuiteReport> {
    let tol = cfg.tol.residual_max;
    let mut rep = SuiteReport::new("valuation", cfg.seed, &["n", "case", "kind", "xi", "check", "residual"]);
    let xis = xi_family();
    for n in [2usize, 3] {
        for i in 0..cfg.pairs {
            let mut r = rng(cfg.seed, stream(1, n, i));
            let kind = i % PAIR_KINDS.len();
            let (f, g) = refinable_pair(&mut r, n, kind)?;
            let (xname, xi) = &xis[i % xis.len()];
            match check_valuation_identity(xi, &f, &g) {
                Ok(res) => {
                    let m = max_abs(&res.0);
                    rep.residual(m);
                    rep.push(row![n, i, PAIR_KINDS[kind], *xname, "lattice", m]);
                    rep.check(m <= tol, || json!({"n": n, "case": i, "xi": xi, "f": f, "g": g, "residual": m}));
                }
                Err(e) => rep.fail(json!({"n": n, "case": i, "f": f, "g": g, "error": e.to_string()})),
            }
            // Ψ(h) = Ψ(h∨0) + Ψ(h∧0)
            let mut split = psi(xi, &f.map_values(|v| v.max(0.0)));
            split.add_scaled(1.0, &psi(xi, &f.map_values(|v| v.min(0.0))));
            let m = split.max_abs_diff(&psi(xi, &f));
            rep.residual(m);
            rep.push(row![n, i, PAIR_KINDS[kind], *xname, "sign_split", m]);
            rep.check(m <= tol, || json!({"n": n, "case": i, "xi": xi, "h": f, "sign_split_residual": m}));
        }
        for (xname, xi) in &xis {
            let z = max_abs(&psi(xi, &SimpleFunction::zero(n)).0);
            rep.push(row![n, 0usize, "zero", *xname, "zero", z]);
            rep.check(z == 0.0, || json!({"n": n, "xi": xi, "psi_of_zero": z}));
        }
    }
    rep.note("pairs_per_dim", cfg.pairs);
    rep.note("tolerance", tol);
    Ok(rep)
}

/// `Ψ(h∘ϑ⁻¹) = ϑΨ(h)` for random shear products and the diagonal family.
fn covariance(cfg: &RunConfig) -> Result<SuiteReport> {
    let tol = cfg.tol.residual_max;
    let mut rep = SuiteReport::new("covariance", cfg.seed, &["n", "case", "family", "parameter", "det_defect", "xi", "residual"]);
    let xis = xi_family();
    let run = |rep: &mut SuiteReport, n: usize, i: usize, family: &str, param: f64, theta: UnimodularMap, h: SimpleFunction| {
        let (xname, xi) = &xis[i % xis.len()];
        match check_covariance(xi, &h, &theta) {
            Ok(res) => {
                let m = res.norm();
                rep.residual(m);
                rep.push(row![n, i, family, param, theta.determinant_defect(), *xname, m]);
                rep.check(m <= tol, || json!({"n": n, "case": i, "map": theta.matrix(), "trace": theta.trace(), "xi": xi, "h": h, "residual": m}));
            }
            Err(e) => rep.fail(json!({"n": n, "case": i, "map": theta.matrix(), "h": h, "error": e.to_string()})),
        }
    };
    const STEPS: usize = 4;
    for n in [2usize, 3] {
        for i in 0..cfg.maps {
            let mut r = rng(cfg.seed, stream(2, n, i));
            let theta = UnimodularMap::random(r.gen(), n, STEPS);
            let h = polytope_function(&mut r, n)?;
            run(&mut rep, n, i, "shear_product", STEPS as f64, theta, h);
        }
        for (j, k) in [2.0, 1.0 / 3.0].into_iter().enumerate() {
            for i in 0..5 {
                let mut r = rng(cfg.seed, stream(3, n, 8 * j + i));
                let h = polytope_function(&mut r, n)?;
                run(&mut rep, n, i, "diagonal", k, UnimodularMap::diagonal(n, k)?, h);
            }
        }
    }
    rep.note("maps_per_dim", cfg.maps);
    rep.note("tolerance", tol);
    Ok(rep)
}

/// The Amemiya-form norm of an indicator against `μₙ(M)·φ*⁻¹(1/μₙ(M))`.
fn indicator_norms(cfg: &RunConfig) -> Result<SuiteReport> {
    let tol = cfg.tol.indicator_rel;
    let cub = Cubature {
        abs_tol: cfg.tol.quadrature_abs,
        ..Cubature::default()
    };
    let mut rep = SuiteReport::new("lemma3", cfg.seed, &["case", "n", "phi", "region", "mu", "amemiya", "closed_form", "rel_error"]);
    for i in 0..cfg.cases {
        let mut r = rng(cfg.seed, stream(4, 0, i));
        let n = 2 + i % 2;
        let (fname, phi) = closed_form_phi(&mut r)?;
        let (rkind, region) = indicator_region(&mut r, n)?;
        let outcome = (|| -> Result<(f64, f64, f64)> {
            let mu = region.mu_n_with(&cub)?.value;
            let star = phi.conjugate()?.phi_star;
            let closed = mu * star.inverse_with_tol(1.0 / mu, cfg.tol.root_rel)?;
            let am = orlicz_norm_amemiya(&phi, &SimpleFunction::indicator(1.0, region.clone())?)?;
            Ok((mu, am, closed))
        })();
        match outcome {
            Ok((mu, am, closed)) => {
                let rel = (am - closed).abs() / closed.abs();
                rep.residual(rel);
                rep.push(row![i, n, fname.clone(), rkind, mu, am, closed, rel]);
                rep.check(rel <= tol, || json!({"case": i, "phi": phi, "region": region, "amemiya": am, "closed_form": closed, "rel_error": rel}));
            }
            Err(e) => rep.fail(json!({"case": i, "phi": phi, "region": region, "error": e.to_string()})),
        }
    }
    rep.note("cases", cfg.cases);
    rep.note("tolerance", tol);
    Ok(rep)
}

fn matches_up_to_sign(row: &[f64; 4], want: [f64; 4], tol: f64) -> bool {
    let d = |s: f64| row.iter().zip(want).map(|(a, b)| (a - s * b).abs()).fold(0.0, f64::max);
    d(1.0) <= tol || d(-1.0) <= tol
}

/// Constraints on the planar coefficients from the four degenerating sequences.
fn planar_limits(cfg: &RunConfig) -> Result<SuiteReport> {
    let tol = cfg.tol.residual_max;
    let report = lemma8_experiment()?;
    let mut rep = SuiteReport::new("lemma8", cfg.seed, &["sequence", "coordinate", "c2", "c2~", "c3", "c3~", "equation"]);
    for c in &report.constraints {
        let [a, b, d, e] = c.coefficients;
        rep.push(row![c.sequence.clone(), c.coordinate, a, b, d, e, c.equation.clone()]);
    }
    let sol = max_abs(&report.solution);
    rep.residual(sol);
    rep.check(report.rank == 4, || json!({"rank": report.rank, "constraints": report.constraints}));
    rep.check(sol <= tol, || json!({"solution": report.solution}));
    // c̃₂ + c₃ + c̃₃ = c₂ and c̃₂ − c₃ − c̃₃ = c₂
    for want in [[-1.0, 1.0, 1.0, 1.0], [-1.0, 1.0, -1.0, -1.0]] {
        let found = report.constraints.iter().any(|c| matches_up_to_sign(&c.coefficients, want, tol));
        rep.check(found, || json!({"missing_equation": want, "constraints": report.constraints}));
    }
    rep.note("rank", report.rank);
    rep.note("solution", report.solution);
    rep.note("affine_residual", report.affine_residual);
    rep.note("moment_mismatch", report.moment_mismatch);
    Ok(rep)
}

/// Table of the divergence construction for `ξ ∉ C_φ`, with its invariants checked.
pub fn counterexample(phi: &YoungFunction, xi: &XiFunction, truncation: usize, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "counterexample",
        seed,
        &["j", "index", "beta", "beta_prime", "c", "r", "volume", "ratio", "modular_cumulative", "moment_cumulative", "lower_bound_cumulative"],
    );
    let cphi = check_cphi(xi, phi, &default_beta_grid())?;
    rep.check(!cphi.certified_on_grid, || json!({"cphi_bound_on_grid": cphi.lambda_bound, "argmax": cphi.argmax}));
    let witnesses = find_witnesses(phi, xi, truncation as u32)?;
    let spec = CounterexampleSpec {
        phi: phi.clone(),
        xi: xi.clone(),
        witnesses,
        dim: 2,
    };
    let res = lemma15_construct(&spec, truncation)?;
    for w in &res.rows {
        rep.push(row![w.j, w.index, w.beta, w.beta_prime, w.c, w.r, w.volume, w.ratio, w.modular_cumulative, w.moment_cumulative, w.lower_bound_cumulative]);
        rep.check(w.modular_cumulative <= 1.0, || json!({"j": w.j, "modular_cumulative": w.modular_cumulative}));
        rep.check(w.r < 1.0 && w.c > w.r, || json!({"j": w.j, "c": w.c, "r": w.r}));
        rep.check(w.moment_cumulative >= w.lower_bound_cumulative, || json!({"j": w.j, "moment": w.moment_cumulative, "lower_bound": w.lower_bound_cumulative}));
    }
    let last = *res.rows.last().expect("truncation ≥ 1");
    let first_moment = psi(xi, &res.h).0[0];
    let mismatch = (first_moment - last.moment_cumulative).abs() / last.moment_cumulative.abs().max(1.0);
    rep.residual(mismatch);
    rep.check(res.modular <= 1.0, || json!({"modular": res.modular}));
    rep.check(mismatch <= 1e-9, || json!({"psi_first_coordinate": first_moment, "table": last.moment_cumulative}));
    rep.note("cphi_divergence", cphi.divergence);
    rep.note("cphi_violation", cphi.violation);
    rep.note("modular", res.modular);
    rep.note("first_moment", first_moment);
    rep.note("lower_bound", last.lower_bound_cumulative);
    rep.note("min_ratio", res.rows.iter().map(|w| w.ratio).fold(f64::INFINITY, f64::min));
    Ok(rep)
}

/// φ = t²/2, ξ(β) = β⁴: the modular stays below 1 while the first moment grows past 0.8·J.
fn divergence(cfg: &RunConfig) -> Result<SuiteReport> {
    let phi = YoungFunction::power(2.0)?;
    let xi = XiFunction::polynomial(vec![0.0, 0.0, 0.0, 1.0])?;
    let mut rep = counterexample(&phi, &xi, cfg.truncation, cfg.seed)?;
    rep.suite = "lemma15".into();
    let cphi = check_cphi(&xi, &phi, &default_beta_grid())?;
    rep.check(cphi.divergence == Some(Tail::Large), || json!({"cphi_divergence": cphi.divergence}));
    let rows = &rep.rows;
    let lower = match rows.last().map(|r| &r[10]) {
        Some(Cell::Num(x)) => *x,
        _ => f64::NAN,
    };
    let min_ratio = rows
        .iter()
        .filter_map(|r| match r[7] {
            Cell::Num(x) => Some(x),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min);
    let j = cfg.truncation as f64;
    rep.check(min_ratio > 0.8, || json!({"min_ratio": min_ratio}));
    rep.check(lower > 0.8 * j, || json!({"lower_bound": lower, "required": 0.8 * j}));
    Ok(rep)
}

/// Cube covers of the unit triangle and annular truncations of `χ_{A[1/8, 4)}`.
fn continuity(cfg: &RunConfig) -> Result<SuiteReport> {
    let phi = YoungFunction::power(2.0)?;
    let xi = XiFunction::identity();
    let mut rep = SuiteReport::new("continuity", cfg.seed, &["probe", "k", "lebesgue_gap", "mu_gap", "norm_gap", "psi_gap", "psi_bound"]);
    let q = Polytope::standard_simplex(2);
    let hq = SimpleFunction::indicator(1.0, Region::polytope(q.clone())?)?;
    let target = q.moment().scaled(xi.eval(1.0));
    // sup_{x∈Q} |x|
    let a = q.vertices().iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let mut norms = Vec::new();
    for d in 0..=cfg.depth {
        let cover = cube_cover_detailed(&q, d)?;
        let hd = SimpleFunction::indicator(1.0, cover.cover.clone())?;
        let norm = norm_distance(&phi, &hd, &hq)?;
        let mut diff = psi(&xi, &hd);
        diff.add_scaled(-1.0, &target);
        let psi_gap = diff.norm();
        let bound = xi.eval(1.0).abs() * a * cover.lebesgue_gap;
        rep.push(row!["cube_cover", d, cover.lebesgue_gap, cover.mu_gap.value, norm, psi_gap, bound]);
        rep.check(psi_gap <= bound * (1.0 + 1e-12) + 1e-15, || json!({"depth": d, "psi_gap": psi_gap, "bound": bound}));
        norms.push(norm);
    }
    for (d, w) in norms.windows(2).enumerate() {
        rep.check(w[1] < w[0], || json!({"depth": d + 1, "norm_gap": w[1], "previous": w[0], "reason": "not strictly decreasing"}));
    }
    let last = *norms.last().expect("depth ≥ 0");
    rep.residual(last);
    rep.check(last < 1e-3, || json!({"depth": cfg.depth, "norm_gap": last, "required_below": 1e-3}));

    let h = SimpleFunction::indicator(1.0, Region::annulus(2, 0.125, 4.0)?)?;
    let probe = continuity_probe(&xi, &phi, &h, cfg.probe_steps)?;
    for p in &probe {
        rep.push(row!["annular", p.k, f64::NAN, f64::NAN, p.norm_gap, p.psi_gap, f64::NAN]);
    }
    for w in probe.windows(2) {
        rep.check(w[1].norm_gap <= w[0].norm_gap, || json!({"k": w[1].k, "norm_gap": w[1].norm_gap, "previous": w[0].norm_gap}));
    }
    // A[2^{-(k+1)}, k+2) ⊇ A[1/8, 4) from k = 2 on
    for p in probe.iter().filter(|p| p.k >= 2) {
        rep.check(p.norm_gap == 0.0 && p.psi_gap == 0.0, || json!({"k": p.k, "norm_gap": p.norm_gap, "psi_gap": p.psi_gap}));
    }
    rep.note("final_norm_gap", last);
    rep.note("depth", cfg.depth);
    Ok(rep)
}

/// `φ(t)/t ↑ ∞` and `φ⁻¹(t)/t ↓ 0` along a geometric grid.
fn young_limits(cfg: &RunConfig) -> Result<SuiteReport> {
    let grid: Vec<f64> = (-24..=80).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
    let mut rep = SuiteReport::new("young-limits", cfg.seed, &["family", "t", "phi_over_t", "inverse_over_t"]);
    let mut families = Vec::new();
    for p in [1.5, 2.0, 3.0, 5.0] {
        families.push((format!("power(p={p})"), YoungFunction::power(p)?, true));
    }
    families.push(("power(p=2,scale=3)".into(), YoungFunction::scaled_power(2.0, 3.0)?, true));
    families.push(("exp".into(), YoungFunction::exp(), true));
    families.push(("exp(scale=0.5)".into(), YoungFunction::scaled_exp(0.5)?, true));
    // φ(t)/t grows like ln t here, so only the monotone trends are checkable in f64
    families.push(("exp_conjugate".into(), YoungFunction::exp_conjugate(1.0)?, false));
    for (name, phi, thresholds) in families {
        let lim = phi.verify_limits(&grid)?;
        for (k, &t) in grid.iter().enumerate() {
            rep.push(row![name.clone(), t, lim.phi_over_t.get(k).copied().unwrap_or(f64::NAN), lim.inverse_over_t[k]]);
        }
        rep.check(lim.phi_ratio_nondecreasing && lim.inverse_ratio_nonincreasing, || {
            json!({"family": name, "phi_ratio_nondecreasing": lim.phi_ratio_nondecreasing, "inverse_ratio_nonincreasing": lim.inverse_ratio_nonincreasing})
        });
        if thresholds {
            rep.check(lim.phi_ratio_exceeds(1e6), || json!({"family": name, "phi_over_t_max": lim.phi_over_t.last()}));
            rep.check(lim.inverse_ratio_below(1e-6), || json!({"family": name, "inverse_over_t_min": lim.inverse_over_t.last()}));
        }
    }
    rep.note("grid", [grid[0], grid[grid.len() - 1]]);
    Ok(rep)
}
