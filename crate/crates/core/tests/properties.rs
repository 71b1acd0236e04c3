use proptest::prelude::*;

use orlicz_core::measure::{cube_cover_detailed, Region};
use orlicz_core::orlicz::{luxemburg_norm, modular, orlicz_norm_amemiya, SimpleFunction, Term};
use orlicz_core::polytope::{Polytope, UnimodularMap};
use orlicz_core::suites::generate::{indicator_region, polytope_function, refinable_pair, rng, xi_family};
use orlicz_core::valuation::{
    check_covariance, check_valuation_identity, find_witnesses, lemma15_construct, psi, CounterexampleSpec, XiFunction,
};
use orlicz_core::young::YoungFunction;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn family() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.2f64..6.0).prop_map(|p| YoungFunction::power(p).unwrap()),
        (1.2f64..4.0, 0.2f64..5.0).prop_map(|(p, s)| YoungFunction::scaled_power(p, s).unwrap()),
        (0.2f64..3.0).prop_map(|s| YoungFunction::scaled_exp(s).unwrap()),
    ]
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

fn simplex(n: usize) -> impl Strategy<Value = Polytope> {
    prop::collection::vec(point(n), n + 1..n + 4)
        .prop_filter_map("degenerate", move |pts| Polytope::new(n, pts).ok().filter(|p| p.volume() > 1e-3))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn young_inequality(phi in family(), s in 1e-3f64..20.0, t in 1e-3f64..20.0) {
        let star = phi.conjugate().unwrap().phi_star;
        let lhs = s * t;
        let rhs = phi.eval(s).unwrap() + star.eval(t).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn conjugate_is_an_involution(p in 1.2f64..6.0, scale in 0.2f64..5.0, t in 1e-2f64..50.0) {
        let phi = YoungFunction::scaled_power(p, scale).unwrap();
        let back = phi.conjugate().unwrap().phi_star.conjugate().unwrap().phi_star;
        prop_assert!(rel(back.eval(t).unwrap(), phi.eval(t).unwrap()) < 1e-9);
    }

    #[test]
    fn inverse_round_trip(phi in family(), t in 1e-3f64..30.0) {
        let y = phi.eval(t).unwrap();
        prop_assume!(y.is_finite() && y > 0.0);
        prop_assert!(rel(phi.inverse(y).unwrap(), t) < 1e-10);
    }

    #[test]
    fn moment_translates(p in simplex(2), t in point(2)) {
        let moved = p.translate(&t).unwrap().moment();
        let (m, v) = (p.moment(), p.volume());
        for i in 0..2 {
            prop_assert!((moved.0[i] - (m.0[i] + v * t[i])).abs() < 1e-11);
        }
    }

    #[test]
    fn moment_maps_linearly(p in simplex(3), a in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 3), 3)) {
        let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        prop_assume!(det.abs() > 0.1);
        let img = p.linear_image(&a).unwrap().moment();
        let want = p.moment().transformed(&a).scaled(det.abs());
        prop_assert!(img.max_abs_diff(&want) < 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn unimodular_maps_preserve_volume(seed in any::<u64>(), p in simplex(3)) {
        let theta = UnimodularMap::random(seed, 3, 4);
        prop_assert!(theta.determinant_defect() < 1e-12);
        let img = p.linear_image(&theta.matrix()).unwrap();
        prop_assert!(rel(img.volume(), p.volume()) < 1e-9);
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn norms_are_equivalent(phi in family(), seed in any::<u64>(), n in 2usize..4) {
        let (_, region) = indicator_region(&mut rng(seed, 0), n).unwrap();
        let h = SimpleFunction::indicator(1.5, region).unwrap();
        let lux = luxemburg_norm(&phi, &h).unwrap();
        let orl = orlicz_norm_amemiya(&phi, &h).unwrap();
        prop_assert!(lux <= orl * (1.0 + 1e-8), "{lux} > {orl}");
        prop_assert!(orl <= 2.0 * lux * (1.0 + 1e-8), "{orl} > 2·{lux}");
    }

    #[test]
    fn norms_are_homogeneous(phi in family(), seed in any::<u64>(), c in -4.0f64..4.0) {
        prop_assume!(c.abs() > 1e-2);
        let h = polytope_function(&mut rng(seed, 1), 2).unwrap();
        let ch = h.scaled(c);
        prop_assert!(rel(luxemburg_norm(&phi, &ch).unwrap(), c.abs() * luxemburg_norm(&phi, &h).unwrap()) < 1e-8);
        prop_assert!(rel(orlicz_norm_amemiya(&phi, &ch).unwrap(), c.abs() * orlicz_norm_amemiya(&phi, &h).unwrap()) < 1e-7);
    }

    #[test]
    fn triangle_inequality(phi in family(), seed in any::<u64>(), kind in 0usize..3) {
        let (f, g) = refinable_pair(&mut rng(seed, 2), 2, kind).unwrap();
        let sum = f.refine(&g).unwrap().combine(|a, b| a + b);
        for norm in [luxemburg_norm, orlicz_norm_amemiya] {
            let lhs = norm(&phi, &sum).unwrap();
            let rhs = norm(&phi, &f).unwrap() + norm(&phi, &g).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-7), "{lhs} > {rhs}");
        }
    }

    #[test]
    fn modular_is_at_most_one_at_the_luxemburg_norm(phi in family(), seed in any::<u64>()) {
        let h = polytope_function(&mut rng(seed, 3), 2).unwrap();
        let lux = luxemburg_norm(&phi, &h).unwrap();
        let rho = modular(&phi, &h.scaled(1.0 / lux)).unwrap();
        prop_assert!((rho - 1.0).abs() < 1e-7, "{rho}");
    }

    #[test]
    fn psi_adds_over_disjoint_terms(seed in any::<u64>(), n in 2usize..4, x in 0usize..4) {
        let xi = &xi_family()[x].1;
        let h = polytope_function(&mut rng(seed, 4), n).unwrap();
        let whole = psi(xi, &h);
        let mut parts = psi(xi, &SimpleFunction::zero(n));
        for t in h.terms() {
            parts.add_scaled(1.0, &psi(xi, &SimpleFunction::indicator(t.value, t.region.clone()).unwrap()));
        }
        prop_assert!(whole.max_abs_diff(&parts) < 1e-12 * (1.0 + whole.norm()));
    }

    #[test]
    fn psi_splits_by_sign(seed in any::<u64>(), kind in 0usize..3, x in 0usize..4) {
        let xi = &xi_family()[x].1;
        let (f, _) = refinable_pair(&mut rng(seed, 5), 2, kind).unwrap();
        let mut split = psi(xi, &f.map_values(|v| v.max(0.0)));
        split.add_scaled(1.0, &psi(xi, &f.map_values(|v| v.min(0.0))));
        let whole = psi(xi, &f);
        prop_assert!(whole.max_abs_diff(&split) < 1e-12 * (1.0 + whole.norm()));
        prop_assert!(psi(xi, &SimpleFunction::zero(2)).norm() == 0.0);
    }

    #[test]
    fn valuation_identity(seed in any::<u64>(), n in 2usize..4, kind in 0usize..3, x in 0usize..4) {
        let xi = &xi_family()[x].1;
        let (f, g) = refinable_pair(&mut rng(seed, 6), n, kind).unwrap();
        let r = check_valuation_identity(xi, &f, &g).unwrap();
        prop_assert!(r.norm() < 1e-9, "residual {:e}", r.norm());
    }

    #[test]
    fn covariance(seed in any::<u64>(), n in 2usize..4, x in 0usize..4) {
        let xi = &xi_family()[x].1;
        let h = polytope_function(&mut rng(seed, 7), n).unwrap();
        let theta = UnimodularMap::random(seed, n, 4);
        let r = check_covariance(xi, &h, &theta).unwrap();
        prop_assert!(r.norm() < 1e-9 * (1.0 + psi(xi, &h).norm()), "residual {:e}", r.norm());
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn cube_cover_is_inner_and_tightens(p in simplex(2), probes in prop::collection::vec(point(2), 64)) {
        let mut prev = f64::INFINITY;
        for depth in 0..6 {
            let c = cube_cover_detailed(&p, depth).unwrap();
            prop_assert!(c.cover.lebesgue() <= p.volume() * (1.0 + 1e-12));
            prop_assert!(c.lebesgue_gap <= prev + 1e-12);
            for x in &probes {
                prop_assert!(!c.cover.contains(x) || p.contains(x));
            }
            prev = c.lebesgue_gap;
        }
    }

    #[test]
    fn divergence_truncations(p in 1.2f64..4.0, extra in 0.5f64..3.0, count in 1usize..25) {
        let phi = YoungFunction::power(p).unwrap();
        let mut coeffs = vec![0.0; (p + extra).ceil() as usize + 1];
        *coeffs.last_mut().unwrap() = 1.0;
        let xi = XiFunction::polynomial(coeffs).unwrap();
        let witnesses = find_witnesses(&phi, &xi, count as u32).unwrap();
        let spec = CounterexampleSpec { phi, xi, witnesses, dim: 2 };
        let res = lemma15_construct(&spec, count).unwrap();
        prop_assert!(res.modular <= 1.0 + 1e-12);
        let mut prev_c = f64::NEG_INFINITY;
        for row in &res.rows {
            prop_assert!(row.r < 1.0 && row.c > prev_c + 2.0);
            prop_assert!(rel((row.c + row.r) * row.volume, row.beta_prime) < 1e-10);
            prop_assert!(row.moment_cumulative >= row.lower_bound_cumulative * (1.0 - 1e-12));
            prev_c = row.c;
        }
        let h = &res.h;
        let term_sum: f64 = h.terms().iter().map(|t: &Term| t.region.lebesgue()).sum();
        prop_assert!(rel(h.support().lebesgue(), term_sum) < 1e-12);
    }
}

#[test]
fn empty_region_has_zero_norms() {
    let phi = YoungFunction::power(2.0).unwrap();
    let h = SimpleFunction::indicator(3.0, Region::empty(2)).unwrap();
    assert_eq!(luxemburg_norm(&phi, &h).unwrap(), 0.0);
    assert_eq!(orlicz_norm_amemiya(&phi, &h).unwrap(), 0.0);
}
