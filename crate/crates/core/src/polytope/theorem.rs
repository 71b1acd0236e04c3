//! The planar operators `e`, `h`, visibility, and the valuation families built from them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::planar::{cross2, P2};
use super::{OriginClass, Polytope};
use crate::error::{Error, Result};
use crate::measure::MomentVector;

/// Coefficients of the valuation families. In dimension ≥ 3 only `c1` and `c2`
/// are used, `c2` multiplying `m([0,Q])`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ValuationCoefficients {
    pub c1: f64,
    pub c1_tilde: f64,
    pub c2: f64,
    pub c2_tilde: f64,
    pub c3: f64,
    pub c3_tilde: f64,
}

fn require_planar(q: &Polytope) -> Result<()> {
    if q.dim() != 2 {
        return Err(Error::Domain(format!("planar operator applied in dimension {}", q.dim())));
    }
    Ok(())
}

fn add(a: P2, b: P2) -> P2 {
    [a[0] + b[0], a[1] + b[1]]
}

fn is_zero(p: P2, tol: f64) -> bool {
    p[0].abs() <= tol && p[1].abs() <= tol
}

fn tol_of(poly: &[P2]) -> f64 {
    1e-12 * poly.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE)
}

/// Vertices visible from the origin, in counterclockwise angular order.
///
/// An edge whose line passes through the origin counts as visible, so both of
/// its endpoints are listed. The origin itself is never listed.
pub fn visible_vertices(q: &Polytope) -> Result<Vec<[f64; 2]>> {
    require_planar(q)?;
    let poly = q.planar_vertices();
    let tol = tol_of(&poly);
    match q.affine_dim() {
        0 => Ok(poly.into_iter().filter(|p| !is_zero(*p, tol)).collect()),
        1 => {
            let (a, b) = (poly[0], poly[1]);
            let c = cross2(a, b);
            if c.abs() <= 1e-12 * (tol / 1e-12).powi(2) {
                // collinear with the origin
                if q.contains_origin() {
                    return Ok([a, b].into_iter().filter(|p| !is_zero(*p, tol)).collect());
                }
                let na = a[0].hypot(a[1]);
                let nb = b[0].hypot(b[1]);
                return Ok(vec![if na <= nb { a } else { b }]);
            }
            Ok(if c > 0.0 { vec![a, b] } else { vec![b, a] })
        }
        _ => {
            if q.origin_class() == OriginClass::Interior {
                return Err(Error::Domain("origin lies in the interior; visibility is undefined".into()));
            }
            let n = poly.len();
            let scale2 = (tol / 1e-12).powi(2);
            let facing: Vec<bool> = (0..n)
                .map(|i| {
                    let (v, w) = (poly[i], poly[(i + 1) % n]);
                    cross2([w[0] - v[0], w[1] - v[1]], [-v[0], -v[1]]) <= 1e-12 * scale2
                })
                .collect();
            let start = (0..n)
                .find(|&i| facing[i] && !facing[(i + n - 1) % n])
                .ok_or_else(|| Error::Geometry("no contiguous visible chain".into()))?;
            let mut chain = vec![poly[start]];
            let mut i = start;
            while facing[i] {
                i = (i + 1) % n;
                chain.push(poly[i]);
                if i == start {
                    break;
                }
            }
            chain.reverse();
            Ok(chain.into_iter().filter(|p| !is_zero(*p, tol)).collect())
        }
    }
}

/// Neighbors of the origin along the counterclockwise boundary: `(before, after)`.
fn origin_neighbors(poly: &[P2], tol: f64) -> Option<(P2, P2)> {
    let n = poly.len();
    if let Some(i) = poly.iter().position(|p| is_zero(*p, tol)) {
        return Some((poly[(i + n - 1) % n], poly[(i + 1) % n]));
    }
    let scale2 = (tol / 1e-12).powi(2);
    (0..n).find_map(|i| {
        let (v, w) = (poly[i], poly[(i + 1) % n]);
        let on_line = cross2(v, w).abs() <= 1e-12 * scale2;
        let between = v[0] * w[0] + v[1] * w[1] < 0.0;
        (on_line && between).then_some((v, w))
    })
}

fn require_origin(q: &Polytope) -> Result<()> {
    require_planar(q)?;
    if !q.contains_origin() {
        return Err(Error::Domain("the origin is not in the polytope".into()));
    }
    Ok(())
}

/// The operator `e` on planar polytopes containing the origin.
///
/// `u+v` when 0 is a vertex with adjacent vertices `u`, `v`; `2(u+v)` for a
/// segment `[u,v]` through 0; `0` otherwise (including 0 in the interior).
pub fn e_op(q: &Polytope) -> Result<[f64; 2]> {
    require_origin(q)?;
    let poly = q.planar_vertices();
    Ok(match q.affine_dim() {
        0 => [0.0, 0.0],
        1 => {
            let s = add(poly[0], poly[1]);
            [2.0 * s[0], 2.0 * s[1]]
        }
        _ => {
            if q.origin_class() == OriginClass::Vertex {
                let (u, v) = origin_neighbors(&poly, tol_of(&poly)).expect("origin is a vertex");
                add(u, v)
            } else {
                [0.0, 0.0]
            }
        }
    })
}

/// The operator `h`: `u₁ − u_r` for the boundary neighbors of 0 (in counterclockwise
/// order) when 0 lies on the boundary of a two-dimensional polytope, else `0`.
pub fn h_op(q: &Polytope) -> Result<[f64; 2]> {
    require_origin(q)?;
    if q.affine_dim() < 2 || q.origin_class() == OriginClass::Interior {
        return Ok([0.0, 0.0]);
    }
    let poly = q.planar_vertices();
    let (before, after) = origin_neighbors(&poly, tol_of(&poly))
        .ok_or_else(|| Error::Geometry("origin on the boundary but no edge found".into()))?;
    Ok([after[0] - before[0], after[1] - before[1]])
}

fn axpy(acc: &mut [f64; 2], c: f64, v: [f64; 2]) {
    if c != 0.0 {
        acc[0] += c * v[0];
        acc[1] += c * v[1];
    }
}

/// The planar family
/// `c₁m(Q) + c̃₁m([0,Q]) + c₂e([0,Q]) + c₃h([0,Q]) + c̃₂e([0,u₁,…,u_r]) + c̃₃h([0,u₁,…,u_r])`.
///
/// The visible-vertex terms are taken as zero when 0 ∈ Q, where no vertex is visible
/// from a point of Q.
pub fn theorem1_valuation(q: &Polytope, c: &ValuationCoefficients) -> Result<[f64; 2]> {
    require_planar(q)?;
    let mut y = [0.0, 0.0];
    let m = q.moment();
    axpy(&mut y, c.c1, [m.0[0], m.0[1]]);
    let cone = q.cone_hull();
    let mc = cone.moment();
    axpy(&mut y, c.c1_tilde, [mc.0[0], mc.0[1]]);
    if c.c2 != 0.0 {
        axpy(&mut y, c.c2, e_op(&cone)?);
    }
    if c.c3 != 0.0 {
        axpy(&mut y, c.c3, h_op(&cone)?);
    }
    if (c.c2_tilde != 0.0 || c.c3_tilde != 0.0) && !q.contains_origin() {
        let mut pts = vec![vec![0.0, 0.0]];
        pts.extend(visible_vertices(q)?.iter().map(|p| p.to_vec()));
        let vis = Polytope::new(2, pts)?;
        axpy(&mut y, c.c2_tilde, e_op(&vis)?);
        axpy(&mut y, c.c3_tilde, h_op(&vis)?);
    }
    Ok(y)
}

/// `c₁m(Q) + c₂m([0,Q])`.
pub fn theorem2_valuation(q: &Polytope, c: &ValuationCoefficients) -> MomentVector {
    let m = q.moment();
    let mc = q.cone_hull().moment();
    MomentVector(m.0.iter().zip(&mc.0).map(|(a, b)| c.c1 * a + c.c2 * b).collect())
}

/// One linear constraint on `(c₂, c̃₂, c₃, c̃₃)` extracted from a limit mismatch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub sequence: String,
    pub coordinate: usize,
    /// Mismatch `lim Y(Q_ε) − Y(lim Q_ε)` for each unit coefficient.
    pub coefficients: [f64; 4],
    pub equation: String,
}

/// Value of one unit-coefficient valuation at one ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub sequence: String,
    pub epsilon: f64,
    pub coefficient: String,
    pub value: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma8Report {
    pub schedule: Vec<f64>,
    pub table: Vec<EpsilonRow>,
    pub constraints: Vec<LimitRow>,
    pub rank: usize,
    pub solution: [f64; 4],
    /// Largest departure of the e/h values from an affine function of ε.
    pub affine_residual: f64,
    /// Largest `|Y(Q_ε) − Y(lim Q_ε)|` at the smallest ε for the moment terms (continuous).
    pub moment_mismatch: f64,
}

pub(crate) const COEFFICIENT_NAMES: [&str; 4] = ["c2", "c2~", "c3", "c3~"];

fn unit(k: usize) -> ValuationCoefficients {
    let mut c = ValuationCoefficients::default();
    match k {
        0 => c.c2 = 1.0,
        1 => c.c2_tilde = 1.0,
        2 => c.c3 = 1.0,
        3 => c.c3_tilde = 1.0,
        4 => c.c1 = 1.0,
        _ => c.c1_tilde = 1.0,
    }
    c
}

type Family = (&'static str, fn(f64) -> Vec<[f64; 2]>, Vec<[f64; 2]>);

fn families() -> Vec<Family> {
    vec![
        ("Q_eps", |e| vec![[1.0, 0.0], [0.0, e]], vec![[0.0, 0.0], [1.0, 0.0]]),
        ("Q'_eps", |e| vec![[e, 0.0], [0.0, 1.0]], vec![[0.0, 0.0], [0.0, 1.0]]),
        (
            "Q''_eps",
            |e| vec![[1.0, 0.0], [0.0, 1.0], [-e, 0.0]],
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        ),
        (
            "Q'''_eps",
            |e| vec![[e, 0.0], [0.0, 1.0], [-1.0, 0.0]],
            vec![[0.0, 0.0], [0.0, 1.0], [-1.0, 0.0]],
        ),
    ]
}

fn render_equation(c: &[f64; 4]) -> String {
    let terms: Vec<String> = c
        .iter()
        .zip(COEFFICIENT_NAMES)
        .filter(|(v, _)| v.abs() > 1e-9)
        .map(|(v, name)| format!("{:+}*{name}", (v * 1e6).round() / 1e6))
        .collect();
    if terms.is_empty() {
        "0 = 0".into()
    } else {
        format!("{} = 0", terms.join(" "))
    }
}

/// Evaluate the planar family on the four approximating sequences and extract the
/// linear constraints that continuity forces on `(c₂, c̃₂, c₃, c̃₃)`.
pub fn lemma8_experiment() -> Result<Lemma8Report> {
    let schedule: Vec<f64> = (1..=20).map(|k| 0.5f64.powi(k)).collect();
    let mut table = Vec::new();
    let mut constraints = Vec::new();
    let mut affine_residual: f64 = 0.0;
    let mut moment_mismatch: f64 = 0.0;
    for (name, seq, limit) in families() {
        let limit = Polytope::polygon(&limit)?;
        let mut mismatch = [[0.0; 4]; 2];
        for k in 0..6 {
            let c = unit(k);
            let values: Vec<[f64; 2]> = schedule
                .iter()
                .map(|&e| theorem1_valuation(&Polytope::polygon(&seq(e))?, &c))
                .collect::<Result<_>>()?;
            let at_limit = theorem1_valuation(&limit, &c)?;
            let label = if k < 4 { COEFFICIENT_NAMES[k] } else if k == 4 { "c1" } else { "c1~" };
            for (e, v) in schedule.iter().zip(&values) {
                table.push(EpsilonRow {
                    sequence: name.into(),
                    epsilon: *e,
                    coefficient: label.into(),
                    value: *v,
                });
            }
            let last = values.len() - 1;
            if k >= 4 {
                for d in 0..2 {
                    moment_mismatch = moment_mismatch.max((values[last][d] - at_limit[d]).abs());
                }
                continue;
            }
            let (ea, eb) = (schedule[last], schedule[last - 1]);
            for d in 0..2 {
                let (ya, yb) = (values[last][d], values[last - 1][d]);
                let slope = (yb - ya) / (eb - ea);
                let lim = ya - slope * ea;
                for (e, v) in schedule.iter().zip(&values) {
                    affine_residual = affine_residual.max((v[d] - (lim + slope * e)).abs());
                }
                mismatch[d][k] = lim - at_limit[d];
            }
        }
        for (d, row) in mismatch.iter().enumerate() {
            let clean = row.map(|v| if v.abs() < 1e-9 { 0.0 } else { v });
            constraints.push(LimitRow {
                sequence: name.into(),
                coordinate: d + 1,
                coefficients: clean,
                equation: render_equation(&clean),
            });
        }
    }
    let a = DMatrix::from_fn(constraints.len(), 4, |i, j| constraints[i].coefficients[j]);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-9 * smax.max(1.0)).count();
    if rank < 4 {
        return Err(Error::Experiment(format!(
            "extracted constraint system has rank {rank} < 4; the e/h operators are inconsistent"
        )));
    }
    let b = nalgebra::DVector::zeros(constraints.len());
    let x = svd.solve(&b, 1e-12).map_err(|e| Error::Experiment(e.to_string()))?;
    Ok(Lemma8Report {
        schedule,
        table,
        constraints,
        rank,
        solution: [x[0], x[1], x[2], x[3]],
        affine_residual,
        moment_mismatch,
    })
}
