//! Placing triangulations of finite point sets in any dimension.
//!
//! Points are first expressed in an orthonormal frame of their affine hull,
//! so lower-dimensional sets (segments in ℝ³, facets, …) are triangulated
//! in their own dimension. A point is placed by coning it to every boundary
//! facet that sees it strictly; points on or inside the current hull are
//! skipped, so no zero-volume simplices are produced.

use std::collections::HashMap;

use crate::numeric::{det, dot, norm, sub};

const REL_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Frame {
    pub origin: Vec<f64>,
    /// Orthonormal basis of the affine hull's direction space.
    pub basis: Vec<Vec<f64>>,
    /// Extent used to scale tolerances.
    pub scale: f64,
}

impl Frame {
    pub fn of(points: &[Vec<f64>]) -> Frame {
        let origin = points[0].clone();
        let scale = points
            .iter()
            .map(|p| norm(&sub(p, &origin)))
            .fold(0.0, f64::max)
            .max(points.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())) * 1e-3)
            .max(f64::MIN_POSITIVE);
        let tol = REL_EPS * scale;
        let mut basis: Vec<Vec<f64>> = Vec::new();
        loop {
            // pick the point farthest from the current span
            let mut best: Option<(f64, Vec<f64>)> = None;
            for p in points {
                let r = residual(&sub(p, &origin), &basis);
                let d = norm(&r);
                if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                    best = Some((d, r));
                }
            }
            match best {
                Some((d, r)) if d > tol && basis.len() < origin.len() => {
                    basis.push(r.iter().map(|x| x / d).collect());
                }
                _ => break,
            }
        }
        Frame { origin, basis, scale }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let d = sub(x, &self.origin);
        self.basis.iter().map(|b| dot(b, &d)).collect()
    }

    /// Distance from `x` to the affine hull.
    pub fn offset(&self, x: &[f64]) -> f64 {
        norm(&residual(&sub(x, &self.origin), &self.basis))
    }

    pub fn tol(&self) -> f64 {
        REL_EPS * self.scale
    }
}

fn residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    // two passes of modified Gram–Schmidt
    for _ in 0..2 {
        for b in basis {
            let c = dot(&r, b);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
    }
    r
}

/// A boundary facet of a triangulation: `k` point indices plus the index of a
/// point known to lie strictly on the inner side.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BoundaryFacet {
    pub verts: Vec<usize>,
    pub inner: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Triangulation {
    pub frame: Frame,
    /// Projected coordinates of the input points.
    pub coords: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
    pub facets: Vec<BoundaryFacet>,
}

impl Triangulation {
    pub fn new(points: &[Vec<f64>]) -> Triangulation {
        let frame = Frame::of(points);
        let k = frame.dim();
        let coords: Vec<Vec<f64>> = points.iter().map(|p| frame.project(p)).collect();
        if k == 0 {
            return Triangulation {
                frame,
                coords,
                simplices: vec![vec![0]],
                facets: Vec::new(),
            };
        }
        let vol_tol = REL_EPS * frame.scale.powi(k as i32);

        // initial simplex: greedy farthest-from-span selection
        let mut chosen = vec![0usize];
        let mut span: Vec<Vec<f64>> = Vec::new();
        while chosen.len() <= k {
            let mut best = (0.0, 0usize, Vec::new());
            for (i, y) in coords.iter().enumerate() {
                if chosen.contains(&i) {
                    continue;
                }
                let r = residual(&sub(y, &coords[chosen[0]]), &span);
                let d = norm(&r);
                if d > best.0 {
                    best = (d, i, r);
                }
            }
            let (d, i, r) = best;
            span.push(r.iter().map(|x| x / d).collect());
            chosen.push(i);
        }

        let mut simplices = vec![chosen.clone()];
        let mut facets: Vec<BoundaryFacet> = (0..=k)
            .map(|j| BoundaryFacet {
                verts: chosen.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v).collect(),
                inner: chosen[j],
            })
            .collect();

        for p in 0..coords.len() {
            if chosen.contains(&p) {
                continue;
            }
            let visible: Vec<usize> = facets
                .iter()
                .enumerate()
                .filter(|(_, f)| sees(&coords, f, &coords[p], vol_tol))
                .map(|(i, _)| i)
                .collect();
            if visible.is_empty() {
                continue;
            }
            let mut ridge_count: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
            for &fi in &visible {
                let f = &facets[fi];
                for skip in 0..f.verts.len() {
                    let mut ridge: Vec<usize> =
                        f.verts.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    ridge.sort_unstable();
                    let e = ridge_count.entry(ridge).or_insert((0, f.verts[skip]));
                    e.0 += 1;
                }
                let mut s = f.verts.clone();
                s.push(p);
                simplices.push(s);
            }
            let mut new_facets: Vec<BoundaryFacet> = facets
                .iter()
                .enumerate()
                .filter(|(i, _)| !visible.contains(i))
                .map(|(_, f)| f.clone())
                .collect();
            let mut horizon: Vec<(Vec<usize>, usize)> =
                ridge_count.into_iter().filter(|(_, (c, _))| *c == 1).map(|(r, (_, w))| (r, w)).collect();
            horizon.sort();
            for (mut ridge, inner) in horizon {
                ridge.push(p);
                new_facets.push(BoundaryFacet { verts: ridge, inner });
            }
            facets = new_facets;
        }

        Triangulation {
            frame,
            coords,
            simplices,
            facets,
        }
    }

    pub fn affine_dim(&self) -> usize {
        self.frame.dim()
    }

    /// Signed orientation of `q` against a facet (sign relative to the facet's inner point).
    pub fn facet_side(&self, f: &BoundaryFacet, q: &[f64]) -> f64 {
        let o = orient(&self.coords, &f.verts, q);
        let inner = orient(&self.coords, &f.verts, &self.coords[f.inner]);
        o * inner.signum()
    }

    /// Whether the point (ambient coordinates) lies in the hull, up to tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        if self.frame.offset(x) > self.frame.tol() {
            return false;
        }
        let y = self.frame.project(x);
        let k = self.affine_dim();
        if k == 0 {
            return true;
        }
        let vol_tol = REL_EPS * self.frame.scale.powi(k as i32);
        self.facets.iter().all(|f| self.facet_side(f, &y) >= -vol_tol)
    }

    /// Whether the point lies strictly inside the relative interior.
    pub fn contains_strictly(&self, x: &[f64]) -> bool {
        if self.frame.offset(x) > self.frame.tol() {
            return false;
        }
        let y = self.frame.project(x);
        let k = self.affine_dim();
        if k == 0 {
            return false;
        }
        let vol_tol = REL_EPS * self.frame.scale.powi(k as i32);
        self.facets.iter().all(|f| self.facet_side(f, &y) > vol_tol)
    }
}

fn orient(coords: &[Vec<f64>], verts: &[usize], q: &[f64]) -> f64 {
    let rows: Vec<Vec<f64>> = verts.iter().map(|&v| sub(&coords[v], q)).collect();
    det(&rows)
}

fn sees(coords: &[Vec<f64>], f: &BoundaryFacet, q: &[f64], tol: f64) -> bool {
    let o = orient(coords, &f.verts, q);
    let inner = orient(coords, &f.verts, &coords[f.inner]);
    o.abs() > tol && o.signum() != inner.signum()
}

/// Unit normal of the hyperplane through `n` points in ℝⁿ (generalized cross product).
pub(crate) fn hyperplane_normal(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points[0].len();
    let rows: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    let mut normal = vec![0.0; n];
    for (j, nj) in normal.iter_mut().enumerate() {
        let minor: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *nj = sign * det(&minor);
    }
    let len = norm(&normal);
    normal.iter().map(|x| x / len).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn volume(t: &Triangulation) -> f64 {
        let k = t.affine_dim();
        t.simplices
            .iter()
            .map(|s| {
                let rows: Vec<Vec<f64>> = s[1..].iter().map(|&v| sub(&t.coords[v], &t.coords[s[0]])).collect();
                det(&rows).abs()
            })
            .sum::<f64>()
            / crate::numeric::factorial(k)
    }

    #[test]
    fn cube_with_interior_and_face_points() {
        let mut pts = Vec::new();
        for m in 0..8 {
            pts.push(vec![(m & 1) as f64, ((m >> 1) & 1) as f64, ((m >> 2) & 1) as f64]);
        }
        pts.insert(0, vec![0.5, 0.5, 0.5]);
        pts.push(vec![0.5, 0.5, 0.0]);
        let t = Triangulation::new(&pts);
        assert_eq!(t.affine_dim(), 3);
        assert!((volume(&t) - 1.0).abs() < 1e-14);
        assert!(t.contains(&[0.2, 0.9, 0.1]));
        assert!(!t.contains(&[1.2, 0.5, 0.5]));
        assert!(t.contains_strictly(&[0.5, 0.5, 0.5]));
        assert!(!t.contains_strictly(&[0.5, 0.5, 0.0]));
    }

    #[test]
    fn planar_set_in_space_is_two_dimensional() {
        let pts = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0 / 3.0; 3]];
        let t = Triangulation::new(&pts);
        assert_eq!(t.affine_dim(), 2);
        assert!((volume(&t) - 3f64.sqrt() / 2.0).abs() < 1e-14);
        assert!(t.contains(&[0.5, 0.5, 0.0]));
        assert!(!t.contains(&[0.0, 0.0, 0.0]));
    }

    #[test]
    fn normal_is_orthogonal() {
        let n = hyperplane_normal(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let s = 1.0 / 3f64.sqrt();
        assert!(n.iter().all(|x| (x.abs() - s).abs() < 1e-15));
    }
}
