//! Simple functions over regions, the modular `ρ_φ(h)=∫φ(|h|)|x|dx`, and the Orlicz norms.

mod grid;
mod norms;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Primitive, Region};

pub use grid::GridFunction;
pub use norms::{
    indicator_norm_from_mu, luxemburg_norm, modular, norm_distance, orlicz_norm_amemiya, orlicz_norm_indicator,
    NormReport,
};

/// One term `α·χ_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub value: f64,
    pub region: Region,
}

/// `s = Σ αᵢ χ_{Mᵢ}` with pairwise disjoint `Mᵢ`, zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimpleFunction {
    dim: usize,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct SimpleJson {
    dim: usize,
    terms: Vec<Term>,
}

impl<'de> Deserialize<'de> for SimpleFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SimpleJson::deserialize(d)?;
        SimpleFunction::new(raw.dim, raw.terms).map_err(serde::de::Error::custom)
    }
}

impl SimpleFunction {
    /// Build from terms, dropping zero values and null regions. Disjointness is asserted.
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.region.dim() != dim {
                return Err(Error::Geometry(format!(
                    "term region in R^{} inside a function on R^{dim}",
                    t.region.dim()
                )));
            }
            if !t.value.is_finite() {
                return Err(Error::Domain(format!("term value {} is not finite", t.value)));
            }
        }
        let terms = terms
            .into_iter()
            .filter(|t| t.value != 0.0 && t.region.lebesgue() > 0.0)
            .collect();
        Ok(SimpleFunction { dim, terms })
    }

    /// Build and verify that the term regions are pairwise disjoint.
    pub fn new_checked(dim: usize, terms: Vec<Term>, samples: usize, seed: u64) -> Result<Self> {
        let f = SimpleFunction::new(dim, terms)?;
        f.support().check_disjoint(samples, seed)?;
        Ok(f)
    }

    pub fn zero(dim: usize) -> Self {
        SimpleFunction { dim, terms: Vec::new() }
    }

    /// `α·χ_M`.
    pub fn indicator(value: f64, region: Region) -> Result<Self> {
        SimpleFunction::new(region.dim(), vec![Term { value, region }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Union of all term regions.
    pub fn support(&self) -> Region {
        let parts: Vec<Primitive> = self.terms.iter().flat_map(|t| t.region.parts().iter().cloned()).collect();
        Region::new(self.dim, parts).expect("parts already validated")
    }

    pub fn scaled(&self, c: f64) -> SimpleFunction {
        SimpleFunction::new(
            self.dim,
            self.terms
                .iter()
                .map(|t| Term {
                    value: c * t.value,
                    region: t.region.clone(),
                })
                .collect(),
        )
        .expect("scaling keeps validity")
    }

    /// Apply `f` to every value (`f(0)` must be 0).
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> SimpleFunction {
        SimpleFunction::new(
            self.dim,
            self.terms
                .iter()
                .map(|t| Term {
                    value: f(t.value),
                    region: t.region.clone(),
                })
                .collect(),
        )
        .expect("mapped values stay finite")
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().find(|t| t.region.contains(x)).map_or(0.0, |t| t.value)
    }

    /// Pairs `(|αᵢ|, μₙ(Mᵢ))`.
    pub fn weights(&self) -> Result<Vec<(f64, f64)>> {
        self.terms.iter().map(|t| Ok((t.value.abs(), t.region.mu_n()?.value))).collect()
    }

    /// Restriction to the parts of the support that lie in `region` (exact subalgebra only).
    pub fn restrict(&self, region: &Region) -> Result<SimpleFunction> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(Term {
                    value: t.value,
                    region: t.region.intersection(region)?,
                })
            })
            .collect::<Result<_>>()?;
        SimpleFunction::new(self.dim, terms)
    }

    /// Common partition of the supports of `self` and `other`.
    pub fn refine(&self, other: &SimpleFunction) -> Result<Refinement> {
        if self.dim != other.dim {
            return Err(Error::Geometry("functions on different spaces".into()));
        }
        let mut cells = Vec::new();
        let f_support = self.support();
        let g_support = other.support();
        for a in &self.terms {
            for b in &other.terms {
                let r = a.region.intersection(&b.region)?;
                if r.lebesgue() > 0.0 {
                    cells.push(Cell {
                        region: r,
                        f: a.value,
                        g: b.value,
                    });
                }
            }
            let r = a.region.difference(&g_support)?;
            if r.lebesgue() > 0.0 {
                cells.push(Cell {
                    region: r,
                    f: a.value,
                    g: 0.0,
                });
            }
        }
        for b in &other.terms {
            let r = b.region.difference(&f_support)?;
            if r.lebesgue() > 0.0 {
                cells.push(Cell {
                    region: r,
                    f: 0.0,
                    g: b.value,
                });
            }
        }
        Ok(Refinement { dim: self.dim, cells })
    }
}

/// A cell of a common partition with the values of both functions on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub region: Region,
    pub f: f64,
    pub g: f64,
}

/// Two simple functions on a shared disjoint partition; the complement carries `0` for both.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub dim: usize,
    pub cells: Vec<Cell>,
}

impl Refinement {
    pub fn combine(&self, op: impl Fn(f64, f64) -> f64) -> SimpleFunction {
        let terms = self
            .cells
            .iter()
            .map(|c| Term {
                value: op(c.f, c.g),
                region: c.region.clone(),
            })
            .collect();
        SimpleFunction::new(self.dim, terms).expect("cells are valid regions")
    }

    pub fn first(&self) -> SimpleFunction {
        self.combine(|f, _| f)
    }

    pub fn second(&self) -> SimpleFunction {
        self.combine(|_, g| g)
    }

    pub fn max(&self) -> SimpleFunction {
        self.combine(f64::max)
    }

    pub fn min(&self) -> SimpleFunction {
        self.combine(f64::min)
    }

    pub fn difference(&self) -> SimpleFunction {
        self.combine(|f, g| f - g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus(a: f64, b: f64) -> Region {
        if a == 0.0 {
            Region::ball(2, b).unwrap()
        } else {
            Region::annulus(2, a, b).unwrap()
        }
    }

    #[test]
    fn zero_terms_dropped_and_json() {
        let f = SimpleFunction::new(
            2,
            vec![
                Term {
                    value: 0.0,
                    region: annulus(0.0, 1.0),
                },
                Term {
                    value: 2.0,
                    region: annulus(1.0, 2.0),
                },
            ],
        )
        .unwrap();
        assert_eq!(f.terms().len(), 1);
        let s = serde_json::to_string(&f).unwrap();
        let back: SimpleFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(f.eval(&[1.5, 0.0]), 2.0);
        assert_eq!(f.eval(&[0.5, 0.0]), 0.0);
    }

    #[test]
    fn lattice_on_overlapping_annuli() {
        let f = SimpleFunction::indicator(1.0, annulus(0.0, 2.0)).unwrap();
        let g = SimpleFunction::indicator(2.0, annulus(1.0, 3.0)).unwrap();
        let r = f.refine(&g).unwrap();
        let (mx, mn) = (r.max(), r.min());
        for rad in [0.5, 1.5, 2.5, 3.5] {
            let x = [rad, 0.0];
            assert_eq!(mx.eval(&x), f.eval(&x).max(g.eval(&x)), "{rad}");
            assert_eq!(mn.eval(&x), f.eval(&x).min(g.eval(&x)), "{rad}");
        }
    }

    #[test]
    fn overlapping_boxes_refine_to_few_cells() {
        let f = SimpleFunction::indicator(1.0, Region::cuboid(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap()).unwrap();
        let g = SimpleFunction::indicator(-1.0, Region::cuboid(vec![1.0, 1.0], vec![3.0, 3.0]).unwrap()).unwrap();
        let r = f.refine(&g).unwrap();
        let parts: usize = r.cells.iter().map(|c| c.region.parts().len()).sum();
        assert!(parts <= 9);
        let total: f64 = r.cells.iter().map(|c| c.region.lebesgue()).sum();
        assert!((total - 7.0).abs() < 1e-14);
    }
}
