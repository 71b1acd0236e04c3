use num::{BigRational, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One factor of a unimodular map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementaryStep {
    /// `I + λ E_{row,col}`.
    Shear { row: usize, col: usize, lambda: f64 },
    /// `diag(k, …, k, k^{1−n})`.
    Diagonal { k: f64 },
}

/// A linear map of determinant one, kept both as floats and as exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct UnimodularMap {
    n: usize,
    exact: Vec<Vec<BigRational>>,
    trace: Vec<ElementaryStep>,
}

fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("{x} is not a finite number")))
}

fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn identity_matrix(n: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

impl UnimodularMap {
    pub fn identity(n: usize) -> Self {
        UnimodularMap {
            n,
            exact: identity_matrix(n),
            trace: Vec::new(),
        }
    }

    pub fn shear(n: usize, row: usize, col: usize, lambda: f64) -> Result<Self> {
        if row == col || row >= n || col >= n {
            return Err(Error::Domain(format!("no shear E_{{{row},{col}}} in dimension {n}")));
        }
        let mut exact = identity_matrix(n);
        exact[row][col] = rational(lambda)?;
        Ok(UnimodularMap {
            n,
            exact,
            trace: vec![ElementaryStep::Shear { row, col, lambda }],
        })
    }

    /// `diag(k, …, k, k^{1−n})`.
    pub fn diagonal(n: usize, k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() || n < 1 {
            return Err(Error::Domain(format!("diagonal family needs k > 0, got {k}")));
        }
        let kr = rational(k)?;
        let mut exact = identity_matrix(n);
        for (i, row) in exact.iter_mut().enumerate().take(n - 1) {
            row[i] = kr.clone();
        }
        exact[n - 1][n - 1] = num::pow(kr.recip(), n - 1);
        Ok(UnimodularMap {
            n,
            exact,
            trace: vec![ElementaryStep::Diagonal { k }],
        })
    }

    /// Product of `count` random shears with dyadic factors in `[−2, 2]`.
    pub fn random(seed: u64, n: usize, count: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut map = UnimodularMap::identity(n);
        if n < 2 {
            return map;
        }
        for _ in 0..count {
            let row = rng.gen_range(0..n);
            let mut col = rng.gen_range(0..n - 1);
            if col >= row {
                col += 1;
            }
            let mut a: i32 = rng.gen_range(-8..8);
            if a >= 0 {
                a += 1;
            }
            let step = UnimodularMap::shear(n, row, col, a as f64 / 4.0).expect("valid shear");
            map = map.compose(&step);
        }
        map
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &UnimodularMap) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut trace = self.trace.clone();
        trace.extend(other.trace.iter().cloned());
        UnimodularMap {
            n: self.n,
            exact: mat_mul(&self.exact, &other.exact),
            trace,
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = UnimodularMap::identity(self.n);
        for step in &self.trace {
            let s = match *step {
                ElementaryStep::Shear { row, col, lambda } => {
                    UnimodularMap::shear(self.n, row, col, -lambda).expect("valid shear")
                }
                ElementaryStep::Diagonal { k } => {
                    let mut m = UnimodularMap::diagonal(self.n, k).expect("valid diagonal");
                    for i in 0..self.n {
                        m.exact[i][i] = m.exact[i][i].recip();
                    }
                    m.trace = vec![ElementaryStep::Diagonal { k: 1.0 / k }];
                    m
                }
            };
            inv = s.compose(&inv);
        }
        inv
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> &[ElementaryStep] {
        &self.trace
    }

    /// Matrix rows as floats.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.exact
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix().iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Exact determinant by fraction-exact Gaussian elimination.
    pub fn determinant_exact(&self) -> BigRational {
        let mut a = self.exact.clone();
        let n = self.n;
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return BigRational::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= &a[c][c];
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
        det
    }

    pub fn determinant(&self) -> f64 {
        crate::numeric::det(&self.matrix())
    }

    /// `|det − 1|` computed exactly.
    pub fn determinant_defect(&self) -> f64 {
        (self.determinant_exact() - BigRational::one()).abs().to_f64().unwrap_or(f64::INFINITY)
    }
}
