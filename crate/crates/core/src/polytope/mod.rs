//! Convex polytopes, their moment vectors, and the planar valuation families.

pub(crate) mod hull;
pub(crate) mod planar;
mod theorem;
mod unimodular;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MomentVector;
use crate::numeric::{self, det, dot, factorial, sub, Cubature, Measured};
use hull::Triangulation;

pub use theorem::{
    e_op, h_op, lemma8_experiment, theorem1_valuation, theorem2_valuation, visible_vertices, Lemma8Report,
    LimitRow, ValuationCoefficients,
};
pub use unimodular::{ElementaryStep, UnimodularMap};

/// Position of the origin relative to a polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OriginClass {
    Vertex,
    BoundaryNonVertex,
    Interior,
    Outside,
}

/// A compact convex polytope stored by its irredundant vertices.
///
/// Planar polytopes keep their vertices in counterclockwise boundary order.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    tri: Triangulation,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl Serialize for Polytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeJson {
            dim: self.dim,
            vertices: self.vertices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolytopeJson::deserialize(d)?;
        Polytope::new(raw.dim, raw.vertices).map_err(serde::de::Error::custom)
    }
}

impl Polytope {
    /// Convex hull of a finite point set in ℝ^dim.
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Geometry("dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::Geometry("empty vertex list".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::Geometry(format!("point {p:?} is not in R^{dim}")));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Geometry(format!("non-finite coordinate in {p:?}")));
            }
        }
        let vertices = if dim == 2 {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            planar::convex_hull(&pts).into_iter().map(|p| p.to_vec()).collect()
        } else {
            irredundant(points)
        };
        let tri = Triangulation::new(&vertices);
        Ok(Polytope { dim, vertices, tri })
    }

    /// Planar polygon from counterclockwise points (re-hulled, so order is advisory).
    pub fn polygon(points: &[[f64; 2]]) -> Result<Self> {
        Polytope::new(2, points.iter().map(|p| p.to_vec()).collect())
    }

    /// Axis-aligned box `∏[lo_i, hi_i]`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n {
            return Err(Error::Geometry("box corners differ in dimension".into()));
        }
        let pts = (0..1usize << n)
            .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { hi[i] } else { lo[i] }).collect())
            .collect();
        Polytope::new(n, pts)
    }

    /// The simplex `[0, e₁, …, eₙ]`.
    pub fn standard_simplex(n: usize) -> Self {
        let mut pts = vec![vec![0.0; n]];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            pts.push(e);
        }
        Polytope::new(n, pts).expect("standard simplex")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn affine_dim(&self) -> usize {
        self.tri.affine_dim()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == self.dim
    }

    pub(crate) fn planar_vertices(&self) -> Vec<[f64; 2]> {
        self.vertices.iter().map(|v| [v[0], v[1]]).collect()
    }

    /// Full-dimensional simplices of the triangulation (empty for flat polytopes).
    pub fn simplices(&self) -> Vec<Vec<Vec<f64>>> {
        if !self.is_full_dimensional() {
            return Vec::new();
        }
        self.tri
            .simplices
            .iter()
            .map(|s| s.iter().map(|&i| self.vertices[i].clone()).collect())
            .collect()
    }

    /// Lebesgue measure λ in ℝⁿ.
    pub fn volume(&self) -> f64 {
        self.simplices().iter().map(|s| simplex_volume(s)).sum()
    }

    /// `∫_Q x dx`; zero for lower-dimensional polytopes.
    pub fn moment(&self) -> MomentVector {
        let mut m = vec![0.0; self.dim];
        for s in self.simplices() {
            let w = simplex_volume(&s) / s.len() as f64;
            for v in &s {
                for (mi, vi) in m.iter_mut().zip(v) {
                    *mi += w * vi;
                }
            }
        }
        MomentVector(m)
    }

    /// `μₙ(Q) = ∫_Q |x| dx` by the divergence theorem over the facets.
    pub fn mu_n(&self) -> Result<Measured> {
        self.mu_n_with(&Cubature::default())
    }

    pub fn mu_n_with(&self, opts: &Cubature) -> Result<Measured> {
        if !self.is_full_dimensional() {
            return Ok(Measured::exact(0.0));
        }
        let n = self.dim;
        let mut total = Measured::exact(0.0);
        if n == 1 {
            let (a, b) = (self.vertices[0][0].min(self.vertices[1][0]), self.vertices[0][0].max(self.vertices[1][0]));
            let f = |x: f64| 0.5 * x * x.abs();
            return Ok(Measured::exact(f(b) - f(a)));
        }
        if n == 2 {
            let poly = self.planar_vertices();
            for i in 0..poly.len() {
                let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
                // outward normal of a CCW edge is the edge direction turned clockwise
                let offset = planar::cross2(a, b) / ((b[0] - a[0]).hypot(b[1] - a[1]));
                if offset != 0.0 {
                    total.value += offset * planar::segment_abs_integral(a, b);
                }
            }
            total.value /= 3.0;
            total.error = total.value.abs() * 1e-14;
            return Ok(total);
        }
        for (verts, offset) in self.facet_planes() {
            if offset.abs() <= 1e-14 * self.extent() {
                continue;
            }
            let m = numeric::integrate_simplex(&|x: &[f64]| dot(x, x).sqrt(), &verts, opts)?;
            total.value += offset * m.value;
            total.error += offset.abs() * m.error;
        }
        total.value /= (n + 1) as f64;
        total.error /= (n + 1) as f64;
        Ok(total)
    }

    /// Boundary facet simplices with their signed plane offsets `b = ν·x` (ν outward).
    pub(crate) fn facet_planes(&self) -> Vec<(Vec<Vec<f64>>, f64)> {
        self.tri
            .facets
            .iter()
            .map(|f| {
                let verts: Vec<Vec<f64>> = f.verts.iter().map(|&i| self.vertices[i].clone()).collect();
                let mut normal = hull::hyperplane_normal(&verts);
                if dot(&normal, &sub(&self.vertices[f.inner], &verts[0])) > 0.0 {
                    normal.iter_mut().for_each(|x| *x = -*x);
                }
                let offset = dot(&normal, &verts[0]);
                (verts, offset)
            })
            .collect()
    }

    /// Outward facet inequalities `ν·x ≤ b` (full-dimensional only).
    pub(crate) fn inequalities(&self) -> Vec<(Vec<f64>, f64)> {
        self.tri
            .facets
            .iter()
            .map(|f| {
                let verts: Vec<Vec<f64>> = f.verts.iter().map(|&i| self.vertices[i].clone()).collect();
                let mut normal = hull::hyperplane_normal(&verts);
                if dot(&normal, &sub(&self.vertices[f.inner], &verts[0])) > 0.0 {
                    normal.iter_mut().for_each(|x| *x = -*x);
                }
                let b = dot(&normal, &verts[0]);
                (normal, b)
            })
            .collect()
    }

    fn extent(&self) -> f64 {
        self.vertices.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.tri.contains(x)
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    pub fn origin_class(&self) -> OriginClass {
        let zero = vec![0.0; self.dim];
        let tol = 1e-12 * self.extent();
        if self.vertices.iter().any(|v| v.iter().all(|x| x.abs() <= tol)) {
            OriginClass::Vertex
        } else if !self.tri.contains(&zero) {
            OriginClass::Outside
        } else if self.is_full_dimensional() && self.tri.contains_strictly(&zero) {
            OriginClass::Interior
        } else {
            OriginClass::BoundaryNonVertex
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.origin_class() != OriginClass::Outside
    }

    /// `[0, Q]`, the convex hull of `Q ∪ {0}`.
    pub fn cone_hull(&self) -> Polytope {
        if self.contains_origin() {
            return self.clone();
        }
        let mut pts = self.vertices.clone();
        pts.push(vec![0.0; self.dim]);
        Polytope::new(self.dim, pts).expect("hull of valid points")
    }

    /// Image under a linear map given by rows.
    pub fn linear_image(&self, rows: &[Vec<f64>]) -> Result<Polytope> {
        if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
            return Err(Error::Geometry("matrix does not match polytope dimension".into()));
        }
        let pts = self.vertices.iter().map(|v| rows.iter().map(|r| dot(r, v)).collect()).collect();
        Polytope::new(self.dim, pts)
    }

    pub fn translate(&self, t: &[f64]) -> Result<Polytope> {
        if t.len() != self.dim {
            return Err(Error::Geometry("translation does not match polytope dimension".into()));
        }
        let pts = self.vertices.iter().map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect()).collect();
        Polytope::new(self.dim, pts)
    }

    /// Pointwise scaling `sQ`.
    pub fn scale(&self, s: f64) -> Result<Polytope> {
        let pts = self.vertices.iter().map(|v| v.iter().map(|x| s * x).collect()).collect();
        Polytope::new(self.dim, pts)
    }
}

fn simplex_volume(s: &[Vec<f64>]) -> f64 {
    let rows: Vec<Vec<f64>> = s[1..].iter().map(|v| sub(v, &s[0])).collect();
    det(&rows).abs() / factorial(rows.len())
}

/// Drop duplicates and points lying in the hull of the remaining ones.
fn irredundant(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let scale = points.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= tol)) {
            pts.push(p);
        }
    }
    if pts.len() <= 1 {
        return pts;
    }
    let tri = Triangulation::new(&pts);
    let on_boundary: Vec<bool> = (0..pts.len())
        .map(|i| {
            if tri.affine_dim() == 0 {
                i == 0
            } else {
                tri.facets.iter().any(|f| f.verts.contains(&i))
            }
        })
        .collect();
    let mut kept: Vec<Vec<f64>> = pts.iter().zip(&on_boundary).filter(|(_, &b)| b).map(|(p, _)| p.clone()).collect();
    let mut i = 0;
    while i < kept.len() && kept.len() > 1 {
        let others: Vec<Vec<f64>> =
            kept.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
        if Triangulation::new(&others).contains(&kept[i]) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_moment_and_volume() {
        let t = Polytope::standard_simplex(2);
        assert_eq!(t.moment().0, vec![1.0 / 6.0, 1.0 / 6.0]);
        assert!((t.volume() - 0.5).abs() < 1e-16);
        assert_eq!(t.origin_class(), OriginClass::Vertex);
    }

    #[test]
    fn higher_simplices() {
        for n in 3..=5 {
            let m = Polytope::standard_simplex(n).moment();
            let want = 1.0 / factorial(n + 1);
            assert!(m.0.iter().all(|x| (x - want).abs() < 1e-15), "{n}: {m:?}");
        }
    }

    #[test]
    fn segment_is_simple() {
        let s = Polytope::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(s.affine_dim(), 1);
        assert_eq!(s.moment().0, vec![0.0, 0.0]);
        assert_eq!(s.volume(), 0.0);
    }

    #[test]
    fn redundant_points_removed_in_space() {
        let mut pts = Vec::new();
        for m in 0..8 {
            pts.push(vec![(m & 1) as f64, ((m >> 1) & 1) as f64, ((m >> 2) & 1) as f64]);
        }
        pts.push(vec![0.5, 0.5, 0.5]);
        pts.push(vec![0.5, 0.5, 1.0]);
        pts.push(vec![1.0, 1.0, 1.0]);
        let q = Polytope::new(3, pts).unwrap();
        assert_eq!(q.vertices().len(), 8);
        assert!((q.volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn square_mu_n_closed_form() {
        // ∫_{[0,1]²}|x|dx = (√2 + asinh 1)/3
        let sq = Polytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let want = (2f64.sqrt() + 1f64.asinh()) / 3.0;
        assert!((sq.mu_n().unwrap().value - want).abs() < 1e-14);
    }

    #[test]
    fn cube_mu_n_against_box_cubature() {
        let lo = [0.5, -1.0, 0.25];
        let hi = [2.0, 0.5, 1.0];
        let q = Polytope::cuboid(&lo, &hi).unwrap();
        let got = q.mu_n().unwrap();
        let want = numeric::integrate_box(&|x: &[f64]| dot(x, x).sqrt(), &lo, &hi, &Cubature::default()).unwrap();
        assert!((got.value - want.value).abs() < 1e-9, "{got:?} vs {want:?}");
    }

    #[test]
    fn origin_classes() {
        let sq = Polytope::cuboid(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(sq.origin_class(), OriginClass::Interior);
        let e = Polytope::polygon(&[[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(e.origin_class(), OriginClass::BoundaryNonVertex);
        let far = Polytope::cuboid(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert_eq!(far.origin_class(), OriginClass::Outside);
        assert_eq!(far.cone_hull().vertices().len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let q: Polytope = serde_json::from_str(r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1],[0.2,0.2]]}"#).unwrap();
        assert_eq!(q.vertices().len(), 3);
        let back: Polytope = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(back, q);
    }
}
