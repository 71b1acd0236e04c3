//! Regions of ℝⁿ with Lebesgue measure λ, weighted measure μₙ(M)=∫_M|x|dx, and moment ∫_M x dx.

mod algebra;
mod cover;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{integrate_box, unit_ball_volume, Cubature, Measured};
use crate::polytope::Polytope;

pub use algebra::{monte_carlo_symmetric_difference, MonteCarloMeasure};
pub use cover::{cube_cover, cube_cover_detailed, CubeCover};

/// An n-vector `∫ h(x) x dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MomentVector(pub Vec<f64>);

impl MomentVector {
    pub fn zeros(n: usize) -> Self {
        MomentVector(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        MomentVector(self.0.iter().map(|x| s * x).collect())
    }

    pub fn add_scaled(&mut self, s: f64, other: &MomentVector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    /// Largest coordinate difference.
    pub fn max_abs_diff(&self, other: &MomentVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Apply a matrix given by rows.
    pub fn transformed(&self, rows: &[Vec<f64>]) -> Self {
        MomentVector(rows.iter().map(|r| r.iter().zip(&self.0).map(|(a, b)| a * b).sum()).collect())
    }
}

impl fmt::Display for MomentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// A bounded measurable building block.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Polytope(Polytope),
    /// `{|x| ≤ r}`.
    OriginBall { radius: f64 },
    /// `A[r,R) = {r ≤ |x| < R}`.
    Annulus { inner: f64, outer: f64 },
    /// `∏[lo_i, hi_i)`.
    AxisBox { lo: Vec<f64>, hi: Vec<f64> },
    /// `{|x − c e₁| ≤ r}`.
    ShiftedBall { radius: f64, center: f64 },
}

impl Primitive {
    fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::Geometry(m));
        match self {
            Primitive::Polytope(p) if p.dim() != n => bad(format!("polytope in R^{} inside a region in R^{n}", p.dim())),
            Primitive::OriginBall { radius } if !(*radius >= 0.0 && radius.is_finite()) => {
                bad(format!("ball radius {radius} must be finite and non-negative"))
            }
            Primitive::Annulus { inner, outer } if !(*inner >= 0.0 && inner < outer && outer.is_finite()) => {
                bad(format!("annulus needs 0 ≤ r < R < ∞, got r={inner}, R={outer}"))
            }
            Primitive::AxisBox { lo, hi } => {
                if lo.len() != n || hi.len() != n {
                    return bad(format!("box corners must lie in R^{n}"));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
                    return bad(format!("box needs finite lo ≤ hi, got {lo:?}, {hi:?}"));
                }
                Ok(())
            }
            Primitive::ShiftedBall { radius, center } if !(*radius >= 0.0 && radius.is_finite() && center.is_finite()) => {
                bad(format!("shifted ball needs finite r ≥ 0, got r={radius}, c={center}"))
            }
            _ => Ok(()),
        }
    }

    pub fn lebesgue(&self, n: usize) -> f64 {
        let w = unit_ball_volume(n);
        match self {
            Primitive::Polytope(p) => p.volume(),
            Primitive::OriginBall { radius } => w * radius.powi(n as i32),
            Primitive::Annulus { inner, outer } => w * (outer.powi(n as i32) - inner.powi(n as i32)),
            Primitive::AxisBox { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Primitive::ShiftedBall { radius, .. } => w * radius.powi(n as i32),
        }
    }

    pub fn mu_n(&self, n: usize, opts: &Cubature) -> Result<Measured> {
        let nw = n as f64 * unit_ball_volume(n) / (n + 1) as f64;
        let e = n as i32 + 1;
        match self {
            Primitive::Polytope(p) => p.mu_n_with(opts),
            Primitive::OriginBall { radius } => Ok(Measured::exact(nw * radius.powi(e))),
            Primitive::Annulus { inner, outer } => Ok(Measured::exact(nw * (outer.powi(e) - inner.powi(e)))),
            Primitive::AxisBox { lo, hi } => {
                if lo.iter().zip(hi).any(|(a, b)| a == b) {
                    return Ok(Measured::exact(0.0));
                }
                if n == 2 {
                    return Ok(Measured::exact(planar_box_mu(lo, hi)));
                }
                Polytope::cuboid(lo, hi)?.mu_n_with(opts)
            }
            Primitive::ShiftedBall { radius, center } => shifted_ball_mu(n, *radius, *center, opts),
        }
    }

    pub fn moment(&self, n: usize) -> MomentVector {
        match self {
            Primitive::Polytope(p) => p.moment(),
            Primitive::OriginBall { .. } | Primitive::Annulus { .. } => MomentVector::zeros(n),
            Primitive::AxisBox { lo, hi } => {
                let vol = self.lebesgue(n);
                MomentVector(lo.iter().zip(hi).map(|(a, b)| vol * (a + b) / 2.0).collect())
            }
            Primitive::ShiftedBall { center, .. } => {
                let mut m = MomentVector::zeros(n);
                m.0[0] = self.lebesgue(n) * center;
                m
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        match self {
            Primitive::Polytope(p) => p.contains(x),
            Primitive::OriginBall { radius } => r <= *radius,
            Primitive::Annulus { inner, outer } => *inner <= r && r < *outer,
            Primitive::AxisBox { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v < b),
            Primitive::ShiftedBall { radius, center } => {
                let d2: f64 = x.iter().enumerate().map(|(i, v)| if i == 0 { (v - center).powi(2) } else { v * v }).sum();
                d2.sqrt() <= *radius
            }
        }
    }

    pub fn bounding_box(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            Primitive::Polytope(p) => p.bounding_box(),
            Primitive::OriginBall { radius: r } | Primitive::Annulus { outer: r, .. } => (vec![-r; n], vec![*r; n]),
            Primitive::AxisBox { lo, hi } => (lo.clone(), hi.clone()),
            Primitive::ShiftedBall { radius, center } => {
                let mut lo = vec![-radius; n];
                let mut hi = vec![*radius; n];
                lo[0] += center;
                hi[0] += center;
                (lo, hi)
            }
        }
    }

    /// Bounds `[a, b]` with `a ≤ |x| ≤ b` on the primitive (`a` may be conservative).
    pub fn radial_range(&self) -> (f64, f64) {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        match self {
            Primitive::OriginBall { radius } => (0.0, *radius),
            Primitive::Annulus { inner, outer } => (*inner, *outer),
            Primitive::ShiftedBall { radius, center } => ((center.abs() - radius).max(0.0), center.abs() + radius),
            Primitive::AxisBox { lo, hi } => {
                let near: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| if *a > 0.0 { *a } else if *b < 0.0 { *b } else { 0.0 }).collect();
                let far: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs())).collect();
                (norm(&near), norm(&far))
            }
            Primitive::Polytope(p) => {
                let far = p.vertices().iter().map(|v| norm(v)).fold(0.0, f64::max);
                let (lo, hi) = p.bounding_box();
                let near = if p.contains_origin() {
                    0.0
                } else {
                    Primitive::AxisBox { lo, hi }.radial_range().0
                };
                (near, far)
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Primitive::Polytope(_) => "polytope",
            Primitive::OriginBall { .. } => "ball",
            Primitive::Annulus { .. } => "annulus",
            Primitive::AxisBox { .. } => "box",
            Primitive::ShiftedBall { .. } => "shifted_ball",
        }
    }
}

/// Divergence-theorem closed form for a rectangle.
fn planar_box_mu(lo: &[f64], hi: &[f64]) -> f64 {
    use crate::polytope::planar::segment_abs_integral as seg;
    let (x0, y0, x1, y1) = (lo[0], lo[1], hi[0], hi[1]);
    (x1 * seg([x1, y0], [x1, y1]) - x0 * seg([x0, y0], [x0, y1]) + y1 * seg([x0, y1], [x1, y1])
        - y0 * seg([x0, y0], [x1, y0]))
        / 3.0
}

/// `∫_{|y|≤r} |c e₁ + y| dy` in polar coordinates around the center.
fn shifted_ball_mu(n: usize, r: f64, c: f64, opts: &Cubature) -> Result<Measured> {
    if r == 0.0 {
        return Ok(Measured::exact(0.0));
    }
    if c == 0.0 {
        let nw = n as f64 * unit_ball_volume(n) / (n + 1) as f64;
        return Ok(Measured::exact(nw * r.powi(n as i32 + 1)));
    }
    // area of S^{n-2}
    let sigma = (n - 1) as f64 * unit_ball_volume(n - 1);
    let f = |x: &[f64]| {
        let (rho, theta) = (x[0], x[1]);
        let d2 = (c * c + 2.0 * c * rho * theta.cos() + rho * rho).max(0.0);
        rho.powi(n as i32 - 1) * d2.sqrt() * theta.sin().powi(n as i32 - 2)
    };
    let m = integrate_box(&f, &[0.0, 0.0], &[r, std::f64::consts::PI], opts)?;
    Ok(Measured {
        value: sigma * m.value,
        error: sigma * m.error,
    })
}

/// A finite disjoint union of primitives in ℝⁿ.
///
/// Disjointness is asserted by the constructor; [`Region::check_disjoint`] verifies it.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    dim: usize,
    parts: Vec<Primitive>,
}

impl Region {
    pub fn new(dim: usize, parts: Vec<Primitive>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Geometry(format!("regions live in R^n with n ≥ 2, got n={dim}")));
        }
        for p in &parts {
            p.validate(dim)?;
        }
        Ok(Region { dim, parts })
    }

    /// Construct and verify pairwise disjointness.
    pub fn new_checked(dim: usize, parts: Vec<Primitive>, samples: usize, seed: u64) -> Result<Self> {
        let r = Region::new(dim, parts)?;
        r.check_disjoint(samples, seed)?;
        Ok(r)
    }

    pub fn empty(dim: usize) -> Self {
        Region { dim, parts: Vec::new() }
    }

    pub fn single(dim: usize, part: Primitive) -> Result<Self> {
        Region::new(dim, vec![part])
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Region::single(dim, Primitive::OriginBall { radius })
    }

    pub fn annulus(dim: usize, inner: f64, outer: f64) -> Result<Self> {
        Region::single(dim, Primitive::Annulus { inner, outer })
    }

    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Region::single(lo.len(), Primitive::AxisBox { lo, hi })
    }

    pub fn shifted_ball(dim: usize, radius: f64, center: f64) -> Result<Self> {
        Region::single(dim, Primitive::ShiftedBall { radius, center })
    }

    pub fn polytope(p: Polytope) -> Result<Self> {
        Region::single(p.dim(), Primitive::Polytope(p))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[Primitive] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn lebesgue(&self) -> f64 {
        self.parts.iter().map(|p| p.lebesgue(self.dim)).sum()
    }

    pub fn mu_n(&self) -> Result<Measured> {
        self.mu_n_with(&Cubature::default())
    }

    pub fn mu_n_with(&self, opts: &Cubature) -> Result<Measured> {
        self.parts.iter().map(|p| p.mu_n(self.dim, opts)).sum()
    }

    pub fn moment(&self) -> MomentVector {
        let mut m = MomentVector::zeros(self.dim);
        for p in &self.parts {
            m.add_scaled(1.0, &p.moment(self.dim));
        }
        m
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    /// Bounding box of all parts; `None` for the empty region.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut it = self.parts.iter().map(|p| p.bounding_box(self.dim));
        let (mut lo, mut hi) = it.next()?;
        for (l, h) in it {
            for i in 0..self.dim {
                lo[i] = lo[i].min(l[i]);
                hi[i] = hi[i].max(h[i]);
            }
        }
        Some((lo, hi))
    }

    /// Image under a linear map. Only polytopes and boxes are closed under general
    /// linear maps; rounded primitives raise a capability error.
    pub fn linear_image(&self, rows: &[Vec<f64>]) -> Result<Region> {
        let parts = self
            .parts
            .iter()
            .map(|p| match p {
                Primitive::Polytope(q) => Ok(Primitive::Polytope(q.linear_image(rows)?)),
                Primitive::AxisBox { lo, hi } => Ok(Primitive::Polytope(Polytope::cuboid(lo, hi)?.linear_image(rows)?)),
                other => Err(Error::capability(
                    format!("linear image of a {}", other.kind()),
                    "approximate the part by a polytope or rasterize it as a grid function",
                )),
            })
            .collect::<Result<_>>()?;
        Region::new(self.dim, parts)
    }

    /// Concatenate the parts of two regions known to be disjoint.
    pub fn disjoint_union(&self, other: &Region) -> Result<Region> {
        if self.dim != other.dim {
            return Err(Error::Geometry("regions of different dimension".into()));
        }
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Region::new(self.dim, parts)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PrimitiveJson {
    Polytope { vertices: Vec<Vec<f64>> },
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    ShiftedBall { radius: f64, center: f64 },
}

#[derive(Serialize, Deserialize)]
struct RegionJson {
    dim: usize,
    parts: Vec<PrimitiveJson>,
}

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts = self
            .parts
            .iter()
            .map(|p| match p {
                Primitive::Polytope(q) => PrimitiveJson::Polytope {
                    vertices: q.vertices().to_vec(),
                },
                Primitive::OriginBall { radius } => PrimitiveJson::Ball { radius: *radius },
                Primitive::Annulus { inner, outer } => PrimitiveJson::Annulus {
                    inner: *inner,
                    outer: *outer,
                },
                Primitive::AxisBox { lo, hi } => PrimitiveJson::Box {
                    lo: lo.clone(),
                    hi: hi.clone(),
                },
                Primitive::ShiftedBall { radius, center } => PrimitiveJson::ShiftedBall {
                    radius: *radius,
                    center: *center,
                },
            })
            .collect();
        RegionJson { dim: self.dim, parts }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RegionJson::deserialize(d)?;
        let parts = raw
            .parts
            .into_iter()
            .map(|p| {
                Ok(match p {
                    PrimitiveJson::Polytope { vertices } => Primitive::Polytope(Polytope::new(raw.dim, vertices)?),
                    PrimitiveJson::Ball { radius } => Primitive::OriginBall { radius },
                    PrimitiveJson::Annulus { inner, outer } => Primitive::Annulus { inner, outer },
                    PrimitiveJson::Box { lo, hi } => Primitive::AxisBox { lo, hi },
                    PrimitiveJson::ShiftedBall { radius, center } => Primitive::ShiftedBall { radius, center },
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Region::new(raw.dim, parts).map_err(D::Error::custom)
    }
}
