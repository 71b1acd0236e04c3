//! Planar polygon routines: hulls, half-plane clipping, and convex set algebra.

pub(crate) type P2 = [f64; 2];

const REL_EPS: f64 = 1e-12;

pub(crate) fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

pub(crate) fn cross2(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn scale_of(points: &[P2]) -> f64 {
    points.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE)
}

/// Counterclockwise hull vertices (collinear points dropped), Andrew's monotone chain.
/// Degenerate inputs return one or two points.
pub(crate) fn convex_hull(points: &[P2]) -> Vec<P2> {
    let mut pts: Vec<P2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let tol = REL_EPS * scale_of(&pts).powi(2);
    let len_tol = 1e-10 * scale_of(&pts);
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= len_tol && (a[1] - b[1]).abs() <= len_tol);
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<P2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &P2>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

pub(crate) fn signed_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross2(poly[i], poly[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Keep the part of a convex polygon with `a·x ≤ c`.
pub(crate) fn clip(poly: &[P2], a: P2, c: f64) -> Vec<P2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    let side = |p: P2| a[0] * p[0] + a[1] * p[1] - c;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let (sp, sq) = (side(p), side(q));
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Outward half-planes `a·x ≤ c` of a counterclockwise convex polygon.
pub(crate) fn half_planes(poly: &[P2]) -> Vec<(P2, f64)> {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            let a = [q[1] - p[1], p[0] - q[0]];
            (a, a[0] * p[0] + a[1] * p[1])
        })
        .collect()
}

fn is_solid(poly: &[P2], reference: f64) -> bool {
    poly.len() >= 3 && signed_area(poly) > REL_EPS * reference
}

/// Intersection of two counterclockwise convex polygons; `None` when it has no area.
pub(crate) fn intersect(p: &[P2], q: &[P2]) -> Option<Vec<P2>> {
    let reference = signed_area(p).abs().max(signed_area(q).abs());
    let mut cur = p.to_vec();
    for (a, c) in half_planes(q) {
        cur = clip(&cur, a, c);
        if cur.len() < 3 {
            return None;
        }
    }
    let cur = convex_hull(&cur);
    is_solid(&cur, reference).then_some(cur)
}

/// `p ∖ q` as disjoint convex pieces (the boundary shared with `q` has no area).
pub(crate) fn subtract(p: &[P2], q: &[P2]) -> Vec<Vec<P2>> {
    let reference = signed_area(p).abs();
    if q.len() < 3 {
        return vec![p.to_vec()];
    }
    let mut pieces = Vec::new();
    let mut rest = p.to_vec();
    for (a, c) in half_planes(q) {
        let outside = clip(&rest, [-a[0], -a[1]], -c);
        let outside = convex_hull(&outside);
        if is_solid(&outside, reference) {
            pieces.push(outside);
        }
        rest = clip(&rest, a, c);
        if rest.len() < 3 {
            break;
        }
    }
    pieces
}

/// `∫ |y| ds` along the segment from `a` to `b`.
pub(crate) fn segment_abs_integral(a: P2, b: P2) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
    if len == 0.0 {
        return 0.0;
    }
    let dir = [d[0] / len, d[1] / len];
    let u0 = a[0] * dir[0] + a[1] * dir[1];
    let u1 = u0 + len;
    let q = cross2(dir, a).abs();
    if u0 * u1 > 0.0 && len < 0.5 * u0.abs().min(u1.abs()) {
        // short and far away: the closed form cancels, the integrand is smooth
        let (x, w) = crate::numeric::gauss_legendre(16);
        let half = len / 2.0;
        let mid = (u0 + u1) / 2.0;
        return x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| wi * ((mid + half * xi).powi(2) + q * q).sqrt())
            .sum::<f64>()
            * half;
    }
    let prim = |u: f64| {
        let r = (u * u + q * q).sqrt();
        if q == 0.0 {
            0.5 * u * r
        } else {
            0.5 * (u * r + q * q * (u / q).asinh())
        }
    };
    prim(u1) - prim(u0)
}
