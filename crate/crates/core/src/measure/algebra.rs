//! Set algebra on regions, exact on a small subalgebra.
//!
//! Exact pairings: radial parts with radial parts (interval arithmetic on radii),
//! boxes with boxes, planar polytopes and boxes with each other (convex clipping),
//! identical parts, and pairs that are provably disjoint or nested.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Primitive, Region};
use crate::error::{Error, Result};
use crate::numeric::Measured;
use crate::polytope::planar::{self, P2};
use crate::polytope::Polytope;

const FALLBACK: &str = "rasterize both sides as grid functions, or use monte_carlo_symmetric_difference";

/// `[r, R)` as a radial interval when the primitive is origin-centered.
fn radial(p: &Primitive) -> Option<(f64, f64)> {
    match p {
        Primitive::OriginBall { radius } => Some((0.0, *radius)),
        Primitive::Annulus { inner, outer } => Some((*inner, *outer)),
        _ => None,
    }
}

fn from_radial(a: f64, b: f64) -> Option<Primitive> {
    if b <= a {
        None
    } else if a == 0.0 {
        Some(Primitive::OriginBall { radius: b })
    } else {
        Some(Primitive::Annulus { inner: a, outer: b })
    }
}

fn as_box(p: &Primitive) -> Option<(&[f64], &[f64])> {
    match p {
        Primitive::AxisBox { lo, hi } => Some((lo, hi)),
        _ => None,
    }
}

fn as_polygon(p: &Primitive, n: usize) -> Option<Vec<P2>> {
    if n != 2 {
        return None;
    }
    match p {
        Primitive::Polytope(q) if q.is_full_dimensional() => Some(q.planar_vertices()),
        Primitive::AxisBox { lo, hi } => Some(vec![[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]),
        _ => None,
    }
}

fn polygon_part(poly: Vec<P2>) -> Result<Primitive> {
    Ok(Primitive::Polytope(Polytope::polygon(&poly)?))
}

fn is_null(p: &Primitive, n: usize) -> bool {
    match p {
        Primitive::Polytope(q) => !q.is_full_dimensional(),
        other => other.lebesgue(n) == 0.0,
    }
}

/// Provably disjoint up to a null set.
pub(super) fn provably_disjoint(a: &Primitive, b: &Primitive, n: usize) -> bool {
    if is_null(a, n) || is_null(b, n) {
        return true;
    }
    let (alo, ahi) = a.bounding_box(n);
    let (blo, bhi) = b.bounding_box(n);
    if (0..n).any(|i| ahi[i] <= blo[i] || bhi[i] <= alo[i]) {
        return true;
    }
    let (ra, rb) = (a.radial_range(), b.radial_range());
    if radial(a).is_some() || radial(b).is_some() {
        if ra.1 <= rb.0 || rb.1 <= ra.0 {
            return true;
        }
    }
    if let (
        Primitive::ShiftedBall { radius: r1, center: c1 },
        Primitive::ShiftedBall { radius: r2, center: c2 },
    ) = (a, b)
    {
        return (c1 - c2).abs() >= r1 + r2;
    }
    if let (Some(p), Some(q)) = (as_polygon(a, n), as_polygon(b, n)) {
        return planar::intersect(&p, &q).is_none();
    }
    false
}

/// `a ⊆ b` up to a null set, when provable.
fn provably_inside(a: &Primitive, b: &Primitive, n: usize) -> bool {
    if a == b || is_null(a, n) {
        return true;
    }
    if let Some((r, big_r)) = radial(b) {
        let (lo, hi) = a.radial_range();
        return r <= lo && hi <= big_r;
    }
    if let Some((blo, bhi)) = as_box(b) {
        let (alo, ahi) = a.bounding_box(n);
        return (0..n).all(|i| blo[i] <= alo[i] && ahi[i] <= bhi[i]);
    }
    false
}

fn box_difference(alo: &[f64], ahi: &[f64], blo: &[f64], bhi: &[f64]) -> Vec<Primitive> {
    let n = alo.len();
    let mut out = Vec::new();
    let mut lo = alo.to_vec();
    let mut hi = ahi.to_vec();
    for i in 0..n {
        if blo[i] > lo[i] {
            let mut h = hi.clone();
            h[i] = blo[i].min(hi[i]);
            out.push(Primitive::AxisBox { lo: lo.clone(), hi: h });
            lo[i] = blo[i].min(hi[i]);
        }
        if bhi[i] < hi[i] {
            let mut l = lo.clone();
            l[i] = bhi[i].max(lo[i]);
            out.push(Primitive::AxisBox { lo: l, hi: hi.clone() });
            hi[i] = bhi[i].max(lo[i]);
        }
    }
    out.retain(|p| p.lebesgue(n) > 0.0);
    out
}

fn primitive_difference(a: &Primitive, b: &Primitive, n: usize) -> Result<Vec<Primitive>> {
    if provably_disjoint(a, b, n) {
        return Ok(vec![a.clone()]);
    }
    if provably_inside(a, b, n) {
        return Ok(Vec::new());
    }
    if let (Some((r1, s1)), Some((r2, s2))) = (radial(a), radial(b)) {
        return Ok([from_radial(r1, s1.min(r2)), from_radial(r1.max(s2), s1)].into_iter().flatten().collect());
    }
    if let (Some((alo, ahi)), Some((blo, bhi))) = (as_box(a), as_box(b)) {
        return Ok(box_difference(alo, ahi, blo, bhi));
    }
    if let (Some(p), Some(q)) = (as_polygon(a, n), as_polygon(b, n)) {
        return planar::subtract(&p, &q).into_iter().map(polygon_part).collect();
    }
    Err(Error::capability(format!("exact difference {} ∖ {} in R^{n}", a.kind(), b.kind()), FALLBACK))
}

fn primitive_intersection(a: &Primitive, b: &Primitive, n: usize) -> Result<Option<Primitive>> {
    if provably_disjoint(a, b, n) {
        return Ok(None);
    }
    if provably_inside(a, b, n) {
        return Ok(Some(a.clone()));
    }
    if provably_inside(b, a, n) {
        return Ok(Some(b.clone()));
    }
    if let (Some((r1, s1)), Some((r2, s2))) = (radial(a), radial(b)) {
        return Ok(from_radial(r1.max(r2), s1.min(s2)));
    }
    if let (Some((alo, ahi)), Some((blo, bhi))) = (as_box(a), as_box(b)) {
        let lo: Vec<f64> = alo.iter().zip(blo).map(|(x, y)| x.max(*y)).collect();
        let hi: Vec<f64> = ahi.iter().zip(bhi).map(|(x, y)| x.min(*y)).collect();
        return Ok(lo.iter().zip(&hi).all(|(l, h)| l < h).then_some(Primitive::AxisBox { lo, hi }));
    }
    if let (Some(p), Some(q)) = (as_polygon(a, n), as_polygon(b, n)) {
        return planar::intersect(&p, &q).map(polygon_part).transpose();
    }
    Err(Error::capability(format!("exact intersection {} ∩ {} in R^{n}", a.kind(), b.kind()), FALLBACK))
}

fn same_dim(a: &Region, b: &Region) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::Geometry(format!("regions in R^{} and R^{}", a.dim, b.dim)));
    }
    Ok(())
}

impl Region {
    /// `self ∖ other`.
    pub fn difference(&self, other: &Region) -> Result<Region> {
        same_dim(self, other)?;
        let n = self.dim;
        let boxed = |p: Primitive| {
            let (lo, hi) = p.bounding_box(n);
            (p, lo, hi)
        };
        let apart = |alo: &[f64], ahi: &[f64], blo: &[f64], bhi: &[f64]| (0..n).any(|i| ahi[i] <= blo[i] || bhi[i] <= alo[i]);
        let others: Vec<_> = other.parts.iter().cloned().map(boxed).collect();
        let mut out = Vec::new();
        for a in &self.parts {
            let mut pieces = vec![boxed(a.clone())];
            for (b, blo, bhi) in &others {
                let mut next = Vec::with_capacity(pieces.len());
                for piece in pieces {
                    // most pairs are separated by their bounding boxes
                    if apart(&piece.1, &piece.2, blo, bhi) {
                        next.push(piece);
                    } else {
                        next.extend(primitive_difference(&piece.0, b, n)?.into_iter().map(boxed));
                    }
                }
                pieces = next;
            }
            out.extend(pieces.into_iter().map(|p| p.0));
        }
        Region::new(n, out)
    }

    pub fn intersection(&self, other: &Region) -> Result<Region> {
        same_dim(self, other)?;
        let n = self.dim;
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                out.extend(primitive_intersection(a, b, n)?);
            }
        }
        Region::new(n, out)
    }

    /// `self △ other = (self ∖ other) ∪ (other ∖ self)`.
    pub fn symmetric_difference(&self, other: &Region) -> Result<Region> {
        let a = self.difference(other)?;
        let b = other.difference(self)?;
        a.disjoint_union(&b)
    }

    /// Verify pairwise disjointness: exactly where provable, otherwise by sampling the
    /// overlap of bounding boxes for points lying in both parts.
    pub fn check_disjoint(&self, samples: usize, seed: u64) -> Result<()> {
        let n = self.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..self.parts.len() {
            for j in i + 1..self.parts.len() {
                let (a, b) = (&self.parts[i], &self.parts[j]);
                if provably_disjoint(a, b, n) {
                    continue;
                }
                if radial(a).is_some() && radial(b).is_some()
                    || as_box(a).is_some() && as_box(b).is_some()
                    || a == b
                {
                    return Err(Error::Geometry(format!("parts {i} and {j} overlap")));
                }
                let (alo, ahi) = a.bounding_box(n);
                let (blo, bhi) = b.bounding_box(n);
                let lo: Vec<f64> = alo.iter().zip(&blo).map(|(x, y)| x.max(*y)).collect();
                let hi: Vec<f64> = ahi.iter().zip(&bhi).map(|(x, y)| x.min(*y)).collect();
                let mut x = vec![0.0; n];
                for _ in 0..samples {
                    for k in 0..n {
                        x[k] = rng.gen_range(lo[k]..hi[k]);
                    }
                    if a.contains(&x) && b.contains(&x) {
                        return Err(Error::Geometry(format!("parts {i} and {j} overlap near {x:?}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sampled measures of a symmetric difference, with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloMeasure {
    pub lebesgue: Measured,
    pub mu_n: Measured,
    pub samples: usize,
}

/// Stratified Monte Carlo estimate of `λ(A△B)` and `μₙ(A△B)` for any pair of regions.
pub fn monte_carlo_symmetric_difference(a: &Region, b: &Region, samples: usize, seed: u64) -> Result<MonteCarloMeasure> {
    same_dim(a, b)?;
    let n = a.dim;
    let Some((lo, hi)) = a.disjoint_union(b)?.bounding_box() else {
        return Ok(MonteCarloMeasure {
            lebesgue: Measured::exact(0.0),
            mu_n: Measured::exact(0.0),
            samples: 0,
        });
    };
    let per_axis = ((samples as f64 / 8.0).powf(1.0 / n as f64).floor() as usize).max(1);
    let strata = per_axis.pow(n as u32);
    let per_cell = (samples / strata).max(2);
    let cell_vol: f64 = lo.iter().zip(&hi).map(|(l, h)| (h - l) / per_axis as f64).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lam, mut lam_var, mut mu, mut mu_var) = (0.0, 0.0, 0.0, 0.0);
    let mut x = vec![0.0; n];
    for cell in 0..strata {
        let mut idx = cell;
        let mut clo = vec![0.0; n];
        for k in 0..n {
            let w = (hi[k] - lo[k]) / per_axis as f64;
            clo[k] = lo[k] + (idx % per_axis) as f64 * w;
            idx /= per_axis;
        }
        let (mut s1, mut s2, mut m1, mut m2) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..per_cell {
            for k in 0..n {
                let w = (hi[k] - lo[k]) / per_axis as f64;
                x[k] = clo[k] + rng.gen::<f64>() * w;
            }
            if a.contains(&x) != b.contains(&x) {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                s1 += 1.0;
                s2 += 1.0;
                m1 += r;
                m2 += r * r;
            }
        }
        let k = per_cell as f64;
        let (mean_s, mean_m) = (s1 / k, m1 / k);
        lam += cell_vol * mean_s;
        mu += cell_vol * mean_m;
        lam_var += cell_vol.powi(2) * (s2 / k - mean_s * mean_s).max(0.0) / (k - 1.0);
        mu_var += cell_vol.powi(2) * (m2 / k - mean_m * mean_m).max(0.0) / (k - 1.0);
    }
    Ok(MonteCarloMeasure {
        lebesgue: Measured {
            value: lam,
            error: lam_var.sqrt(),
        },
        mu_n: Measured {
            value: mu,
            error: mu_var.sqrt(),
        },
        samples: strata * per_cell,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn annuli_interval_algebra() {
        let a = Region::ball(2, 2.0).unwrap();
        let b = Region::annulus(2, 1.0, 3.0).unwrap();
        let d = a.symmetric_difference(&b).unwrap();
        assert_eq!(
            d.parts(),
            &[Primitive::OriginBall { radius: 1.0 }, Primitive::Annulus { inner: 2.0, outer: 3.0 }]
        );
        assert!((d.lebesgue() - (PI + 5.0 * PI)).abs() < 1e-13);
    }

    #[test]
    fn self_difference_is_empty() {
        let t = Region::polytope(Polytope::standard_simplex(2)).unwrap();
        let d = t.symmetric_difference(&t).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.mu_n().unwrap().value, 0.0);
    }

    #[test]
    fn shifted_unit_squares() {
        let a = Region::cuboid(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let b = Region::cuboid(vec![0.5, 0.0], vec![1.5, 1.0]).unwrap();
        let d = a.symmetric_difference(&b).unwrap();
        assert!((d.lebesgue() - 1.0).abs() < 1e-15);
        d.check_disjoint(2000, 1).unwrap();
    }

    #[test]
    fn triangle_minus_box_by_clipping() {
        let t = Region::polytope(Polytope::standard_simplex(2)).unwrap();
        let b = Region::cuboid(vec![0.0, 0.0], vec![0.5, 0.5]).unwrap();
        let d = t.difference(&b).unwrap();
        assert!((d.lebesgue() - 0.25).abs() < 1e-15);
        let i = t.intersection(&b).unwrap();
        assert!((i.lebesgue() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn unsupported_pairing_names_fallback() {
        let a = Region::ball(2, 1.0).unwrap();
        let b = Region::cuboid(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
        match a.symmetric_difference(&b) {
            Err(Error::Capability { fallback, .. }) => assert!(fallback.contains("monte_carlo")),
            other => panic!("expected capability error, got {other:?}"),
        }
        let mc = monte_carlo_symmetric_difference(&a, &b, 200_000, 3).unwrap();
        // λ(ball △ box) = π + 4 − 2·(π/4)
        let want = PI + 4.0 - PI / 2.0;
        assert!((mc.lebesgue.value - want).abs() < 5.0 * mc.lebesgue.error + 1e-3, "{mc:?}");
    }

    #[test]
    fn overlap_is_detected() {
        let r = Region::new(2, vec![Primitive::OriginBall { radius: 1.0 }, Primitive::ShiftedBall { radius: 1.0, center: 1.0 }])
            .unwrap();
        assert!(r.check_disjoint(1000, 0).is_err());
        let ok = Region::new(2, vec![Primitive::OriginBall { radius: 1.0 }, Primitive::ShiftedBall { radius: 1.0, center: 3.0 }])
            .unwrap();
        ok.check_disjoint(1000, 0).unwrap();
    }
}
