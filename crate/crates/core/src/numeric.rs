//! Scalar root finding, unimodal minimization, Gauss–Legendre rules and
//! adaptive cubature over boxes and simplices.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for bracketing bisection.
pub const ROOT_REL_TOL: f64 = 1e-12;

const MAX_EXPANSIONS: usize = 2100;
const MAX_BISECTIONS: usize = 400;

/// A value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub error: f64,
}

impl Measured {
    pub fn exact(value: f64) -> Self {
        Measured { value, error: 0.0 }
    }
}

impl std::ops::Add for Measured {
    type Output = Measured;
    fn add(self, rhs: Measured) -> Measured {
        Measured {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

impl std::iter::Sum for Measured {
    fn sum<I: Iterator<Item = Measured>>(iter: I) -> Measured {
        iter.fold(Measured::exact(0.0), |a, b| a + b)
    }
}

/// Solves `f(x) = target` for a nondecreasing `f` on `[0, ∞)` with `f(0) <= target`.
///
/// The bracket is grown (or shrunk toward zero) geometrically with factor 2
/// starting from `guess`, then bisected until its width is below
/// `rel_tol * hi`.
pub fn solve_increasing<F: Fn(f64) -> f64>(f: F, target: f64, guess: f64, rel_tol: f64) -> Result<f64> {
    if !target.is_finite() {
        return Err(Error::Domain(format!("cannot invert at non-finite target {target}")));
    }
    let guess = if guess.is_finite() && guess > 0.0 { guess } else { 1.0 };
    let (mut lo, mut hi);
    if f(guess) >= target {
        hi = guess;
        lo = guess * 0.5;
        let mut n = 0;
        while f(lo) >= target {
            hi = lo;
            lo *= 0.5;
            n += 1;
            if lo == 0.0 || n > MAX_EXPANSIONS {
                return Ok(0.0);
            }
        }
    } else {
        lo = guess;
        hi = guess * 2.0;
        let mut n = 0;
        while f(hi) < target {
            lo = hi;
            hi *= 2.0;
            n += 1;
            if !hi.is_finite() || n > MAX_EXPANSIONS {
                return Err(Error::Optimization(format!(
                    "no bracket for target {target:e} below {lo:e}"
                )));
            }
        }
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= rel_tol * hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the minimum of a unimodal function on `[a, b]`.
///
/// Stops when the bracket is narrower than `rel_tol` times its midpoint.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a) <= rel_tol * 0.5 * (a.abs() + b.abs()) {
            let x = 0.5 * (a + b);
            return Ok((x, f(x).min(fc).min(fd)));
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if !(fc.is_finite() && fd.is_finite()) {
            return Err(Error::Optimization(format!(
                "objective not finite inside bracket [{a:e}, {b:e}]"
            )));
        }
    }
    // Bracket no longer shrinks at this precision: report rather than guess.
    if (b - a) <= 1e-6 * 0.5 * (a.abs() + b.abs()) {
        let x = 0.5 * (a + b);
        return Ok((x, f(x).min(fc).min(fd)));
    }
    Err(Error::Optimization(format!(
        "golden-section bracket [{a:e}, {b:e}] failed to shrink"
    )))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Options for adaptive cubature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cubature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subregions before giving up.
    pub max_regions: usize,
}

impl Default for Cubature {
    fn default() -> Self {
        Cubature {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_regions: 20_000,
        }
    }
}

struct TensorRule {
    low: (Vec<f64>, Vec<f64>),
    high: (Vec<f64>, Vec<f64>),
}

impl TensorRule {
    fn new() -> Self {
        TensorRule {
            low: gauss_legendre(5),
            high: gauss_legendre(8),
        }
    }

    fn apply<F: Fn(&[f64]) -> f64>(rule: &(Vec<f64>, Vec<f64>), f: &F, lo: &[f64], hi: &[f64]) -> f64 {
        let d = lo.len();
        let m = rule.0.len();
        let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let jac: f64 = half.iter().product();
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        let mut sum = 0.0;
        loop {
            let mut w = 1.0;
            for k in 0..d {
                x[k] = mid[k] + half[k] * rule.0[idx[k]];
                w *= rule.1[idx[k]];
            }
            sum += w * f(&x);
            let mut k = 0;
            loop {
                if k == d {
                    return sum * jac;
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    fn estimate<F: Fn(&[f64]) -> f64>(&self, f: &F, lo: &[f64], hi: &[f64]) -> (f64, f64) {
        let h = Self::apply(&self.high, f, lo, hi);
        let l = Self::apply(&self.low, f, lo, hi);
        (h, (h - l).abs())
    }
}

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    value: f64,
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive tensor Gauss–Legendre cubature over an axis box.
///
/// Each cell is estimated with 5- and 8-point tensor rules; the cell with
/// the largest error is bisected along its longest side.
pub fn integrate_box<F: Fn(&[f64]) -> f64>(f: &F, lo: &[f64], hi: &[f64], opts: &Cubature) -> Result<Measured> {
    assert_eq!(lo.len(), hi.len());
    if lo.is_empty() {
        return Ok(Measured::exact(f(&[])));
    }
    if lo.iter().zip(hi).any(|(a, b)| b <= a) {
        return Ok(Measured::exact(0.0));
    }
    let rule = TensorRule::new();
    let (v, e) = rule.estimate(f, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        value: v,
        error: e,
    });
    let mut total = v;
    let mut total_err = e;
    let mut regions = 1;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if regions >= opts.max_regions {
            return Err(Error::Accuracy {
                requested: target,
                achieved: total_err,
            });
        }
        let cell = heap.pop().expect("heap holds at least one cell");
        let axis = (0..cell.lo.len())
            .max_by(|&a, &b| (cell.hi[a] - cell.lo[a]).total_cmp(&(cell.hi[b] - cell.lo[b])))
            .unwrap_or(0);
        let split = 0.5 * (cell.lo[axis] + cell.hi[axis]);
        let mut hi_a = cell.hi.clone();
        hi_a[axis] = split;
        let mut lo_b = cell.lo.clone();
        lo_b[axis] = split;
        let (va, ea) = rule.estimate(f, &cell.lo, &hi_a);
        let (vb, eb) = rule.estimate(f, &lo_b, &cell.hi);
        total += va + vb - cell.value;
        total_err += ea + eb - cell.error;
        heap.push(Cell {
            lo: cell.lo,
            hi: hi_a,
            value: va,
            error: ea,
        });
        heap.push(Cell {
            lo: lo_b,
            hi: cell.hi,
            value: vb,
            error: eb,
        });
        regions += 1;
    }
    // Recompute the sums from the cells to shed accumulated drift.
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), c| (v + c.value, e + c.error));
    Ok(Measured { value, error })
}

/// Integrates `f` over the k-simplex with the given vertices (embedded in ℝⁿ, k ≤ n)
/// using the collapsed-coordinate map from the unit cube.
pub fn integrate_simplex<F: Fn(&[f64]) -> f64>(f: &F, vertices: &[Vec<f64>], opts: &Cubature) -> Result<Measured> {
    let k = vertices.len() - 1;
    if k == 0 {
        return Ok(Measured::exact(f(&vertices[0])));
    }
    let n = vertices[0].len();
    let edges: Vec<Vec<f64>> = vertices[1..].iter().map(|v| sub(v, &vertices[0])).collect();
    let gram = DMatrix::from_fn(k, k, |i, j| dot(&edges[i], &edges[j]));
    let g = gram.determinant().max(0.0).sqrt();
    if g == 0.0 {
        return Ok(Measured::exact(0.0));
    }
    let mapped = |u: &[f64]| {
        let mut w = vertices[k].clone();
        for j in (0..k).rev() {
            let t = u[j];
            for c in 0..n {
                w[c] = (1.0 - t) * vertices[j][c] + t * w[c];
            }
        }
        let mut jac = g;
        for (j, &t) in u.iter().enumerate().take(k - 1) {
            jac *= t.powi((k - 1 - j) as i32);
        }
        f(&w) * jac
    };
    integrate_box(&mapped, &vec![0.0; k], &vec![1.0; k], opts)
}

/// Volume of the unit ball in ℝⁿ via ωₙ = 2π ωₙ₋₂ / n with ω₀ = 1, ω₁ = 2.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI * unit_ball_volume(n - 2) / n as f64,
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Determinant of a square matrix given by rows.
pub(crate) fn det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_recovers_square_root() {
        let r = solve_increasing(|x| x * x, 2.0, 1.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let tiny = solve_increasing(|x| x * x, 1e-40, 1.0, 1e-13).unwrap();
        assert!((tiny - 1e-20).abs() < 1e-32);
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, fx) = golden_section(|x| (x - 3.0).powi(2) + 1.0, 0.0, 10.0, 1e-10).unwrap();
        assert!((x - 3.0).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for order in 1..=12 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "order {order} degree {deg}");
            }
        }
    }

    #[test]
    fn box_cubature_handles_kink() {
        let opts = Cubature::default();
        let m = integrate_box(&|x: &[f64]| (x[0] * x[0] + x[1] * x[1]).sqrt(), &[0.0, 0.0], &[1.0, 1.0], &opts).unwrap();
        // ∫∫_[0,1]² |x| = (√2 + asinh 1)/3
        let exact = (2f64.sqrt() + 1f64.asinh()) / 3.0;
        assert!((m.value - exact).abs() < 1e-10, "{} vs {exact}", m.value);
    }

    #[test]
    fn simplex_map_gives_volume_and_centroid() {
        let opts = Cubature::default();
        let v = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let vol = integrate_simplex(&|_: &[f64]| 1.0, &v, &opts).unwrap().value;
        assert!((vol - 1.0 / 6.0).abs() < 1e-14);
        let mx = integrate_simplex(&|x: &[f64]| x[0], &v, &opts).unwrap().value;
        assert!((mx - 1.0 / 24.0).abs() < 1e-14);
        // embedded triangle in ℝ³
        let tri = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let area = integrate_simplex(&|_: &[f64]| 1.0, &tri, &opts).unwrap().value;
        assert!((area - 3f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
    }
}
