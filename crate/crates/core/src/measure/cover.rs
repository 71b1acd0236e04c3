//! Inner covers of polytopes by half-open dyadic cubes.

use serde::{Deserialize, Serialize};

use super::{Primitive, Region};
use crate::error::{Error, Result};
use crate::numeric::Measured;
use crate::polytope::Polytope;

const MAX_ROWS: usize = 1 << 23;

/// A dyadic inner cover `C ⊆ Q`, with the measures of `Q ∖ C = Q △ C`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeCover {
    pub depth: u32,
    /// Cells of one row that fit are merged into a single box.
    pub cover: Region,
    pub cells: usize,
    pub lebesgue_gap: f64,
    pub mu_gap: Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubeCoverSummary {
    pub depth: u32,
    pub cells: usize,
    pub lebesgue_gap: f64,
    pub mu_gap: f64,
}

impl CubeCover {
    pub fn summary(&self) -> CubeCoverSummary {
        CubeCoverSummary {
            depth: self.depth,
            cells: self.cells,
            lebesgue_gap: self.lebesgue_gap,
            mu_gap: self.mu_gap.value,
        }
    }
}

/// Union of the dyadic cubes of side `2^{-depth}` contained in `poly`.
pub fn cube_cover(poly: &Polytope, depth: u32) -> Result<Region> {
    Ok(cube_cover_detailed(poly, depth)?.cover)
}

pub fn cube_cover_detailed(poly: &Polytope, depth: u32) -> Result<CubeCover> {
    let n = poly.dim();
    if n < 2 {
        return Err(Error::Geometry("cube covers need n ≥ 2".into()));
    }
    if !poly.is_full_dimensional() {
        return Ok(CubeCover {
            depth,
            cover: Region::empty(n),
            cells: 0,
            lebesgue_gap: 0.0,
            mu_gap: Measured::exact(0.0),
        });
    }
    let s = 0.5f64.powi(depth as i32);
    let (lo, hi) = poly.bounding_box();
    let kmin: Vec<i64> = lo.iter().map(|x| (x / s).floor() as i64).collect();
    let kmax: Vec<i64> = hi.iter().map(|x| (x / s).ceil() as i64 - 1).collect();
    let rows: usize = (1..n).map(|i| (kmax[i] - kmin[i] + 1).max(0) as usize).product();
    if rows > MAX_ROWS {
        return Err(Error::Domain(format!("depth {depth} needs {rows} rows in R^{n}; reduce the depth")));
    }
    let scale = lo.iter().chain(&hi).fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-12 * scale;
    // a cube [a, a+s]^n fits iff ν·a + s·Σ max(ν_i, 0) ≤ b for every facet
    let facets: Vec<(Vec<f64>, f64, f64)> = poly
        .inequalities()
        .into_iter()
        .map(|(nu, b)| {
            let pos: f64 = nu.iter().map(|v| v.max(0.0)).sum();
            (nu, b, pos)
        })
        .collect();

    let mut parts = Vec::new();
    let mut cells = 0usize;
    let mut idx: Vec<i64> = kmin.clone();
    for _ in 0..rows {
        let (mut first, mut last) = (kmin[0], kmax[0]);
        for (nu, b, pos) in &facets {
            let rest: f64 = (1..n).map(|i| nu[i] * idx[i] as f64 * s).sum();
            let rhs = b - s * pos - rest + tol;
            if nu[0].abs() <= 1e-14 {
                if rhs < 0.0 {
                    first = 1;
                    last = 0;
                }
            } else if nu[0] > 0.0 {
                last = last.min((rhs / (nu[0] * s)).floor() as i64);
            } else {
                first = first.max((rhs / (nu[0] * s)).ceil() as i64);
            }
        }
        if first <= last {
            let mut blo: Vec<f64> = idx.iter().map(|&k| k as f64 * s).collect();
            let mut bhi: Vec<f64> = idx.iter().map(|&k| (k + 1) as f64 * s).collect();
            blo[0] = first as f64 * s;
            bhi[0] = (last + 1) as f64 * s;
            parts.push(Primitive::AxisBox { lo: blo, hi: bhi });
            cells += (last - first + 1) as usize;
        }
        // advance the odometer over axes 1..n
        for i in 1..n {
            idx[i] += 1;
            if idx[i] <= kmax[i] {
                break;
            }
            idx[i] = kmin[i];
        }
    }
    let cover = Region::new(n, parts)?;
    let mu_q = poly.mu_n()?;
    let mu_c = cover.mu_n()?;
    Ok(CubeCover {
        depth,
        lebesgue_gap: (poly.volume() - cover.lebesgue()).max(0.0),
        mu_gap: Measured {
            value: (mu_q.value - mu_c.value).max(0.0),
            error: mu_q.error + mu_c.error,
        },
        cover,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_is_tiled() {
        let sq = Polytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        for d in 0..5 {
            let c = cube_cover_detailed(&sq, d).unwrap();
            assert_eq!(c.cells, 1 << (2 * d));
            assert!(c.lebesgue_gap < 1e-14);
        }
    }

    #[test]
    fn triangle_depth_one_and_monotone() {
        let t = Polytope::standard_simplex(2);
        let c1 = cube_cover_detailed(&t, 1).unwrap();
        assert_eq!(c1.cells, 1);
        assert!(c1.lebesgue_gap <= 0.5);
        let mut prev = f64::INFINITY;
        for d in 0..10 {
            let g = cube_cover_detailed(&t, d).unwrap().lebesgue_gap;
            assert!(g <= prev);
            // boundary cells along the hypotenuse: exactly 2^-(d+1)
            assert!((g - 0.5f64.powi(d as i32 + 1)).abs() < 1e-14, "{d}: {g}");
            prev = g;
        }
    }

    #[test]
    fn cover_is_inside_in_space() {
        let t = Polytope::standard_simplex(3);
        let c = cube_cover_detailed(&t, 3).unwrap();
        assert!(c.cells > 0);
        for p in c.cover.parts() {
            if let Primitive::AxisBox { lo, hi } = p {
                assert!(t.contains(lo) && t.contains(hi));
            }
        }
    }
}
