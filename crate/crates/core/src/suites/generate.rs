//! Seeded random inputs for the batteries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::measure::{Primitive, Region};
use crate::orlicz::{SimpleFunction, Term};
use crate::polytope::Polytope;
use crate::valuation::XiFunction;
use crate::young::YoungFunction;

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Nonzero half-integers in `[-3, 3]`, so that ties between `f` and `g` occur.
fn value(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let k: i32 = rng.gen_range(-6..=6);
        if k != 0 {
            return k as f64 / 2.0;
        }
    }
}

fn distinct_cells(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    while out.len() < count {
        let c: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// A random sub-box of the unit cell `cell` of the 3ⁿ grid on `[-1.5, 1.5]ⁿ`.
fn sub_box(rng: &mut ChaCha8Rng, cell: &[usize]) -> Primitive {
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for &k in cell {
        let a = -1.5 + k as f64;
        let u: f64 = rng.gen_range(0.0..0.45);
        let v: f64 = rng.gen_range(0.55..1.0);
        lo.push(a + u);
        hi.push(a + v);
    }
    Primitive::AxisBox { lo, hi }
}

fn sub_polygon(rng: &mut ChaCha8Rng, cell: &[usize]) -> Result<Primitive> {
    let pts: Vec<[f64; 2]> = (0..6)
        .map(|_| [-1.5 + cell[0] as f64 + rng.gen_range(0.0..1.0), -1.5 + cell[1] as f64 + rng.gen_range(0.0..1.0)])
        .collect();
    Ok(Primitive::Polytope(Polytope::polygon(&pts)?))
}

/// The kinds of refinable pairs drawn by the valuation battery.
pub const PAIR_KINDS: [&str; 3] = ["boxes", "radial", "polygons"];

/// Terms on 1–3 distinct grid cells (boxes, or polygons in the plane).
fn cellular(rng: &mut ChaCha8Rng, n: usize, polygons: bool) -> Result<SimpleFunction> {
    let count = rng.gen_range(1..=3);
    let terms = distinct_cells(rng, n, count)
        .into_iter()
        .map(|cell| {
            let part = if polygons { sub_polygon(rng, &cell)? } else { sub_box(rng, &cell) };
            Ok(Term {
                value: value(rng),
                region: Region::single(n, part)?,
            })
        })
        .collect::<Result<_>>()?;
    SimpleFunction::new(n, terms)
}

/// Two terms on origin-centred shells with disjoint radial ranges; the inner one is a ball half the time.
fn radial(rng: &mut ChaCha8Rng, n: usize) -> Result<SimpleFunction> {
    let mut r: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..2.0)).collect();
    r.sort_by(f64::total_cmp);
    if rng.gen_bool(0.5) {
        r[0] = 0.0;
    }
    let shell = |a: f64, b: f64| if a == 0.0 { Region::ball(n, b) } else { Region::annulus(n, a, b) };
    let terms = vec![
        Term {
            value: value(rng),
            region: shell(r[0], r[1])?,
        },
        Term {
            value: value(rng),
            region: shell(r[2], r[3])?,
        },
    ];
    SimpleFunction::new(n, terms)
}

/// A pair whose common refinement stays inside the exactly computable region algebra.
/// Polygons are planar only, so in higher dimension that kind falls back to boxes.
pub fn refinable_pair(rng: &mut ChaCha8Rng, n: usize, kind: usize) -> Result<(SimpleFunction, SimpleFunction)> {
    match kind {
        0 => Ok((cellular(rng, n, false)?, cellular(rng, n, false)?)),
        1 => Ok((radial(rng, n)?, radial(rng, n)?)),
        _ => Ok((cellular(rng, n, n == 2)?, cellular(rng, n, false)?)),
    }
}

/// Two polytope terms with separated bounding boxes, placed around the origin.
pub fn polytope_function(rng: &mut ChaCha8Rng, n: usize) -> Result<SimpleFunction> {
    let shift: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..0.0)).collect();
    let mut terms = Vec::new();
    for t in 0..2 {
        let pts: Vec<Vec<f64>> = (0..n + 3)
            .map(|_| {
                (0..n)
                    .map(|i| rng.gen_range(0.0..1.0) + shift[i] + if i == 0 { 1.5 * t as f64 } else { 0.0 })
                    .collect()
            })
            .collect();
        terms.push(Term {
            value: value(rng),
            region: Region::polytope(Polytope::new(n, pts)?)?,
        });
    }
    SimpleFunction::new(n, terms)
}

/// The ξ rotation used by the batteries.
pub fn xi_family() -> Vec<(&'static str, XiFunction)> {
    let phi = YoungFunction::power(2.0).expect("p > 1");
    vec![
        ("identity", XiFunction::identity()),
        ("cube", XiFunction::polynomial(vec![0.0, 0.0, 1.0]).expect("finite")),
        ("tanh", XiFunction::sigmoid(2.0, 1.0).expect("positive width")),
        ("signed_power2", XiFunction::signed_young(phi, 1.0).expect("positive scale")),
    ]
}

/// A Young function drawn from the closed-form families.
pub fn closed_form_phi(rng: &mut ChaCha8Rng) -> Result<(String, YoungFunction)> {
    Ok(match rng.gen_range(0..4) {
        0 | 1 => {
            let p = rng.gen_range(1.2..5.0);
            let s = rng.gen_range(0.5..2.0);
            (format!("power(p={p:.6},scale={s:.6})"), YoungFunction::scaled_power(p, s)?)
        }
        2 => {
            let s = rng.gen_range(0.5..2.0);
            (format!("exp(scale={s:.6})"), YoungFunction::scaled_exp(s)?)
        }
        _ => {
            let s = rng.gen_range(0.5..2.0);
            (format!("exp_conjugate(scale={s:.6})"), YoungFunction::exp_conjugate(s)?)
        }
    })
}

/// A ball, annulus or box in `R^n`; boxes straddle the origin half the time.
pub fn indicator_region(rng: &mut ChaCha8Rng, n: usize) -> Result<(&'static str, Region)> {
    Ok(match rng.gen_range(0..3) {
        0 => ("ball", Region::ball(n, rng.gen_range(0.2..2.0))?),
        1 => {
            let a = rng.gen_range(0.1..1.5);
            ("annulus", Region::annulus(n, a, a + rng.gen_range(0.1..1.5))?)
        }
        _ => {
            let straddle = rng.gen_bool(0.5);
            let lo: Vec<f64> = (0..n).map(|_| if straddle { rng.gen_range(-1.0..-0.1) } else { rng.gen_range(0.1..1.0) }).collect();
            let hi: Vec<f64> = lo.iter().map(|a| a + rng.gen_range(0.2..1.5)).collect();
            ("box", Region::cuboid(lo, hi)?)
        }
    })
}
