//! The operator `Ψ_ξ(h) = m(ξ∘h)` and its checks.

mod cphi;
mod construction;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MomentVector;
use crate::orlicz::{GridFunction, SimpleFunction, Term};
use crate::polytope::UnimodularMap;
use crate::young::YoungFunction;

pub use cphi::{check_cphi, check_cphi_delta, default_beta_grid, CphiReport, Tail};
pub use construction::{
    continuity_probe, find_witnesses, lemma15_construct, ContinuityRow, CounterexampleSpec, Lemma15Result, Lemma15Row,
    Witness,
};

/// Representation of a continuous `ξ` with `ξ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum XiRepr {
    /// `Σ_k coeffs[k]·t^{k+1}`.
    Polynomial { coeffs: Vec<f64> },
    /// `sign(t)·scale·φ(|t|)`.
    SignedYoung { phi: YoungFunction, scale: f64 },
    /// `amplitude·tanh(t/width)`.
    Sigmoid { amplitude: f64, width: f64 },
    /// Piecewise linear through `points` (which contain `(0, 0)`), constant beyond the ends.
    Tabulated { points: Vec<(f64, f64)> },
}

/// A bound `|ξ(β)| ≤ lambda·φ(|β|)` certified on the default grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CphiWitness {
    pub lambda: f64,
    pub phi: YoungFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiFunction {
    #[serde(flatten)]
    pub repr: XiRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<CphiWitness>,
}

impl XiFunction {
    fn new(repr: XiRepr) -> Result<Self> {
        let xi = XiFunction { repr, witness: None };
        xi.validate()?;
        Ok(xi)
    }

    pub fn identity() -> Self {
        XiFunction::polynomial(vec![1.0]).expect("identity")
    }

    /// `Σ_k coeffs[k]·t^{k+1}`; `polynomial(vec![0.0, 0.0, 0.0, 1.0])` is `t⁴`.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        XiFunction::new(XiRepr::Polynomial { coeffs })
    }

    pub fn signed_young(phi: YoungFunction, scale: f64) -> Result<Self> {
        XiFunction::new(XiRepr::SignedYoung { phi, scale })
    }

    pub fn sigmoid(amplitude: f64, width: f64) -> Result<Self> {
        XiFunction::new(XiRepr::Sigmoid { amplitude, width })
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        XiFunction::new(XiRepr::Tabulated { points })
    }

    /// Attach a `C_φ` bound after certifying it on the default grid.
    pub fn with_witness(mut self, lambda: f64, phi: YoungFunction) -> Result<Self> {
        let report = check_cphi(&self, &phi, &default_beta_grid())?;
        if report.sup_ratio > lambda * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "|ξ(β)| ≤ {lambda}·φ(|β|) fails on the grid (sup ratio {:e})",
                report.sup_ratio
            )));
        }
        self.witness = Some(CphiWitness { lambda, phi });
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        match &self.repr {
            XiRepr::Polynomial { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Domain("polynomial coefficients must be finite".into()));
                }
            }
            XiRepr::SignedYoung { scale, .. } => {
                if !scale.is_finite() {
                    return Err(Error::Domain("scale must be finite".into()));
                }
            }
            XiRepr::Sigmoid { amplitude, width } => {
                if !amplitude.is_finite() || !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::Domain("sigmoid needs finite amplitude and positive width".into()));
                }
            }
            XiRepr::Tabulated { points } => {
                if points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                    return Err(Error::Domain("tabulated points must be finite".into()));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Domain("tabulated abscissae must increase strictly".into()));
                }
                if !points.contains(&(0.0, 0.0)) {
                    return Err(Error::Domain("tabulated ξ must pass through (0, 0)".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.repr {
            XiRepr::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * t),
            XiRepr::SignedYoung { phi, scale } => {
                let v = phi.eval(t.abs()).unwrap_or(f64::INFINITY);
                scale * v * t.signum()
            }
            XiRepr::Sigmoid { amplitude, width } => amplitude * (t / width).tanh(),
            XiRepr::Tabulated { points } => {
                let i = points.partition_point(|p| p.0 <= t);
                if i == 0 {
                    points[0].1
                } else if i == points.len() {
                    points[i - 1].1
                } else {
                    let (t0, v0) = points[i - 1];
                    let (t1, v1) = points[i];
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
        }
    }

    /// Largest `|ξ|` sampled on `[−m, m]`.
    fn sampled_sup(&self, m: f64) -> f64 {
        (-64..=64).map(|k| self.eval(m * k as f64 / 64.0).abs()).fold(0.0, f64::max)
    }
}

/// Shorthand: `identity`, `poly:c1,c2,…`, `pow:k` (t^k), `signed:FAMILY…`, `tanh:a,b`, or inline JSON.
impl FromStr for XiFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let xi: XiFunction = serde_json::from_str(s)?;
            xi.validate()?;
            return Ok(xi);
        }
        let nums = |x: &str| -> Result<Vec<f64>> {
            x.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number `{v}`: {e}"))))
                .collect()
        };
        if s == "identity" {
            return Ok(XiFunction::identity());
        }
        let (head, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("unknown ξ `{s}`")))?;
        match head {
            "poly" => XiFunction::polynomial(nums(rest)?),
            "pow" => {
                let k: usize = rest.parse().map_err(|_| Error::Parse(format!("bad exponent `{rest}`")))?;
                if k == 0 {
                    return Err(Error::Domain("ξ(t) = t⁰ is not zero at 0".into()));
                }
                let mut c = vec![0.0; k];
                c[k - 1] = 1.0;
                XiFunction::polynomial(c)
            }
            "signed" => XiFunction::signed_young(rest.parse()?, 1.0),
            "tanh" => match nums(rest)?.as_slice() {
                [a, b] => XiFunction::sigmoid(*a, *b),
                _ => Err(Error::Parse("tanh needs `a,b`".into())),
            },
            _ => Err(Error::Parse(format!("unknown ξ `{s}`"))),
        }
    }
}

/// `Ψ_ξ(h) = Σᵢ ξ(αᵢ)·m(Mᵢ)`.
pub fn psi(xi: &XiFunction, h: &SimpleFunction) -> MomentVector {
    let mut m = MomentVector::zeros(h.dim());
    for Term { value, region } in h.terms() {
        m.add_scaled(xi.eval(*value), &region.moment());
    }
    m
}

/// `Ψ_ξ` of a grid function, with a bound from cells where the source was not constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiEstimate {
    pub value: MomentVector,
    pub error: f64,
}

pub fn psi_quadrature(xi: &XiFunction, h: &GridFunction) -> Result<PsiEstimate> {
    let mut m = MomentVector::zeros(h.dim());
    let mut error = 0.0;
    for c in 0..h.cell_count() {
        let v = h.values[c];
        if v != 0.0 {
            m.add_scaled(xi.eval(v), &h.cell_moment(c));
        }
        if h.mixed[c] > 0.0 {
            // |∫_cell (ξ(h) − ξ(v)) x dx| ≤ 2 sup|ξ| μₙ(cell)
            error += 2.0 * xi.sampled_sup(h.mixed[c]) * h.cell_mu(c)?;
        }
    }
    Ok(PsiEstimate { value: m, error })
}

/// `(f', g')` on a shared disjoint partition.
pub fn refine(f: &SimpleFunction, g: &SimpleFunction) -> Result<(SimpleFunction, SimpleFunction)> {
    let r = f.refine(g)?;
    Ok((r.first(), r.second()))
}

/// `(f ∨ g, f ∧ g)`.
pub fn lattice_max_min(f: &SimpleFunction, g: &SimpleFunction) -> Result<(SimpleFunction, SimpleFunction)> {
    let r = f.refine(g)?;
    Ok((r.max(), r.min()))
}

/// `Ψ(f∨g) + Ψ(f∧g) − Ψ(f) − Ψ(g)`.
pub fn check_valuation_identity(xi: &XiFunction, f: &SimpleFunction, g: &SimpleFunction) -> Result<MomentVector> {
    let (mx, mn) = lattice_max_min(f, g)?;
    let mut r = psi(xi, &mx);
    r.add_scaled(1.0, &psi(xi, &mn));
    r.add_scaled(-1.0, &psi(xi, f));
    r.add_scaled(-1.0, &psi(xi, g));
    Ok(r)
}

/// `h∘ϑ⁻¹`, whose term regions are `ϑMᵢ`.
pub fn push_forward(h: &SimpleFunction, theta: &UnimodularMap) -> Result<SimpleFunction> {
    if theta.dim() != h.dim() {
        return Err(Error::Geometry("map and function dimensions differ".into()));
    }
    let rows = theta.matrix();
    let terms = h
        .terms()
        .iter()
        .map(|t| {
            Ok(Term {
                value: t.value,
                region: t.region.linear_image(&rows)?,
            })
        })
        .collect::<Result<_>>()?;
    SimpleFunction::new(h.dim(), terms)
}

/// `Ψ(h∘ϑ⁻¹) − ϑΨ(h)`.
pub fn check_covariance(xi: &XiFunction, h: &SimpleFunction, theta: &UnimodularMap) -> Result<MomentVector> {
    let lhs = psi(xi, &push_forward(h, theta)?);
    let rhs = psi(xi, h).transformed(&theta.matrix());
    let mut r = lhs;
    r.add_scaled(-1.0, &rhs);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Region;
    use crate::polytope::Polytope;

    fn tri() -> Region {
        Region::polytope(Polytope::standard_simplex(2)).unwrap()
    }

    #[test]
    fn psi_examples() {
        let h = SimpleFunction::indicator(1.0, tri()).unwrap();
        assert_eq!(psi(&XiFunction::identity(), &h).0, vec![1.0 / 6.0, 1.0 / 6.0]);
        let xi: XiFunction = "pow:3".parse().unwrap();
        let h = SimpleFunction::indicator(2.0, tri()).unwrap();
        assert_eq!(psi(&xi, &h).0, vec![8.0 / 6.0, 8.0 / 6.0]);
        assert_eq!(psi(&xi, &SimpleFunction::zero(2)).0, vec![0.0, 0.0]);
    }

    #[test]
    fn xi_families() {
        let t: XiFunction = "tanh:2,0.5".parse().unwrap();
        assert_eq!(t.eval(0.0), 0.0);
        assert!((t.eval(10.0) - 2.0).abs() < 1e-12);
        let s: XiFunction = "signed:power:2".parse().unwrap();
        assert_eq!(s.eval(-2.0), -2.0);
        assert_eq!(s.eval(0.0), 0.0);
        let tab = XiFunction::tabulated(vec![(-1.0, -2.0), (0.0, 0.0), (1.0, 3.0)]).unwrap();
        assert_eq!(tab.eval(0.5), 1.5);
        assert_eq!(tab.eval(5.0), 3.0);
        assert!(XiFunction::tabulated(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json.parse::<XiFunction>().unwrap(), t);
    }

    #[test]
    fn witness_is_certified() {
        let phi = YoungFunction::power(2.0).unwrap();
        let xi = XiFunction::signed_young(phi.clone(), 1.0).unwrap();
        assert!(xi.clone().with_witness(1.0, phi.clone()).is_ok());
        assert!(XiFunction::polynomial(vec![0.0, 0.0, 0.0, 1.0]).unwrap().with_witness(1e6, phi).is_err());
    }

    #[test]
    fn covariance_single_shear() {
        let h = SimpleFunction::indicator(0.7, tri()).unwrap();
        let theta = UnimodularMap::shear(2, 0, 1, 1.0).unwrap();
        let r = check_covariance(&"pow:2".parse().unwrap(), &h, &theta).unwrap();
        assert!(r.norm() < 1e-12);
        let ball = SimpleFunction::indicator(1.0, Region::ball(2, 1.0).unwrap()).unwrap();
        assert!(matches!(check_covariance(&XiFunction::identity(), &ball, &theta), Err(Error::Capability { .. })));
    }

    #[test]
    fn valuation_identity_on_boxes() {
        let f = SimpleFunction::indicator(1.0, Region::cuboid(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap()).unwrap();
        let g = SimpleFunction::indicator(-3.0, Region::cuboid(vec![1.0, -1.0], vec![3.0, 1.5]).unwrap()).unwrap();
        let xi: XiFunction = "tanh:1,1".parse().unwrap();
        assert!(check_valuation_identity(&xi, &f, &g).unwrap().norm() < 1e-12);
    }

    #[test]
    fn grid_psi_matches_exact_on_aligned_box() {
        let b = Region::cuboid(vec![0.5, 0.25], vec![1.0, 1.0]).unwrap();
        let h = SimpleFunction::indicator(2.0, b).unwrap();
        let g = GridFunction::rasterize(&h, vec![0.0, 0.0], vec![2.0, 2.0], vec![8, 8]).unwrap();
        let xi: XiFunction = "pow:2".parse().unwrap();
        let est = psi_quadrature(&xi, &g).unwrap();
        assert!(est.value.max_abs_diff(&psi(&xi, &h)) < 1e-14);
        assert_eq!(est.error, 0.0);
    }
}
