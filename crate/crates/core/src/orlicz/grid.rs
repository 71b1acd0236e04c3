use serde::{Deserialize, Serialize};

use super::SimpleFunction;
use crate::error::{Error, Result};
use crate::measure::{MomentVector, Primitive};
use crate::numeric::{Cubature, Measured};
use crate::young::YoungFunction;

/// A piecewise-constant function on a uniform grid over a box, zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Cells per axis; axis 0 varies fastest in `values`.
    pub counts: Vec<usize>,
    pub values: Vec<f64>,
    /// Per cell, a bound on `|h|` where the source was not constant on the cell (0 if it was).
    #[serde(default)]
    pub mixed: Vec<f64>,
}

impl GridFunction {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let n = lo.len();
        if n < 2 || hi.len() != n || counts.len() != n {
            return Err(Error::Geometry("grid box and counts must share a dimension n ≥ 2".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Geometry(format!("grid support needs finite lo < hi, got {lo:?}, {hi:?}")));
        }
        let cells: usize = counts.iter().product();
        if cells == 0 || values.len() != cells {
            return Err(Error::Geometry(format!("expected {cells} values, got {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid values must be finite".into()));
        }
        Ok(GridFunction {
            lo,
            hi,
            counts,
            mixed: vec![0.0; values.len()],
            values,
        })
    }

    /// Sample `f` at cell centers.
    pub fn from_fn(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let cells: usize = counts.iter().product();
        let mut g = GridFunction::new(lo, hi, counts, vec![0.0; cells.max(1)])?;
        for c in 0..cells {
            let (a, b) = g.cell_box(c);
            let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x + y) / 2.0).collect();
            g.values[c] = f(&mid);
        }
        if g.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled values must be finite".into()));
        }
        Ok(g)
    }

    /// Rasterize a simple function: center values, with cells flagged where the
    /// center and corners disagree.
    pub fn rasterize(h: &SimpleFunction, lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        if lo.len() != h.dim() {
            return Err(Error::Geometry("grid and function dimensions differ".into()));
        }
        let mut g = GridFunction::from_fn(lo, hi, counts, |x| h.eval(x))?;
        let n = g.dim();
        for c in 0..g.values.len() {
            let (a, b) = g.cell_box(c);
            let mut worst = g.values[c].abs();
            let mut mixed = false;
            for m in 0..1usize << n {
                let corner: Vec<f64> = (0..n)
                    .map(|i| {
                        let w = b[i] - a[i];
                        if m >> i & 1 == 1 {
                            b[i] - 1e-9 * w
                        } else {
                            a[i] + 1e-9 * w
                        }
                    })
                    .collect();
                let v = h.eval(&corner);
                if v != g.values[c] {
                    mixed = true;
                    worst = worst.max(v.abs());
                }
            }
            if mixed {
                g.mixed[c] = worst;
            }
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    pub fn cell_box(&self, c: usize) -> (Vec<f64>, Vec<f64>) {
        let mut idx = c;
        let mut a = Vec::with_capacity(self.dim());
        let mut b = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let k = idx % self.counts[i];
            idx /= self.counts[i];
            let w = (self.hi[i] - self.lo[i]) / self.counts[i] as f64;
            a.push(self.lo[i] + k as f64 * w);
            b.push(self.lo[i] + (k + 1) as f64 * w);
        }
        (a, b)
    }

    fn cell_primitive(&self, c: usize) -> Primitive {
        let (lo, hi) = self.cell_box(c);
        Primitive::AxisBox { lo, hi }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut c = 0;
        let mut stride = 1;
        for i in 0..self.dim() {
            if !(self.lo[i] <= x[i] && x[i] < self.hi[i]) {
                return 0.0;
            }
            let w = (self.hi[i] - self.lo[i]) / self.counts[i] as f64;
            let k = (((x[i] - self.lo[i]) / w) as usize).min(self.counts[i] - 1);
            c += k * stride;
            stride *= self.counts[i];
        }
        self.values[c]
    }

    pub fn cell_mu(&self, c: usize) -> Result<f64> {
        Ok(self.cell_primitive(c).mu_n(self.dim(), &Cubature::default())?.value)
    }

    pub fn cell_moment(&self, c: usize) -> MomentVector {
        self.cell_primitive(c).moment(self.dim())
    }

    /// `Σ_cells φ(|v|)·μₙ(cell)`, with the contribution of mixed cells as the error.
    pub fn modular(&self, phi: &YoungFunction) -> Result<Measured> {
        let mut out = Measured::exact(0.0);
        for c in 0..self.cell_count() {
            let v = self.values[c];
            if v == 0.0 && self.mixed[c] == 0.0 {
                continue;
            }
            let mu = self.cell_mu(c)?;
            out.value += phi.eval(v.abs())? * mu;
            if self.mixed[c] > 0.0 {
                out.error += phi.eval(self.mixed[c])? * mu;
            }
        }
        Ok(out)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        let mut g = self.clone();
        g.values.iter_mut().for_each(|v| *v = f(*v));
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Region;

    #[test]
    fn rasterized_box_modular_matches_exact() {
        let b = Region::cuboid(vec![0.25, 0.5], vec![1.0, 1.5]).unwrap();
        let h = SimpleFunction::indicator(3.0, b).unwrap();
        let g = GridFunction::rasterize(&h, vec![0.0, 0.0], vec![2.0, 2.0], vec![8, 8]).unwrap();
        assert!(g.mixed.iter().all(|m| *m == 0.0));
        let phi = YoungFunction::power(2.0).unwrap();
        let exact = super::super::modular(&phi, &h).unwrap();
        assert!((g.modular(&phi).unwrap().value - exact).abs() < 1e-13);
    }

    #[test]
    fn eval_matches_cells() {
        let g = GridFunction::from_fn(vec![-1.0, -1.0], vec![1.0, 1.0], vec![4, 2], |x| x[0] + 10.0 * x[1]).unwrap();
        assert_eq!(g.eval(&[-0.9, -0.9]), -0.75 - 5.0);
        assert_eq!(g.eval(&[1.5, 0.0]), 0.0);
    }
}
