//! The divergence construction for ξ outside `C_φ`, and annular truncation probes.

use serde::{Deserialize, Serialize};

use super::{psi, XiFunction};
use crate::error::{Error, Result};
use crate::measure::{Primitive, Region};
use crate::numeric::{solve_increasing, unit_ball_volume, ROOT_REL_TOL};
use crate::orlicz::{modular, orlicz_norm_amemiya, SimpleFunction, Term};
use crate::young::YoungFunction;

/// `β` with `|ξ(β)| > 2^index·φ(|β|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub index: u32,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub phi: YoungFunction,
    pub xi: XiFunction,
    pub witnesses: Vec<Witness>,
    /// Ambient dimension of the balls.
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_dim() -> usize {
    2
}

impl CounterexampleSpec {
    pub fn validate(&self) -> Result<()> {
        let mut prev: Option<u32> = None;
        for w in &self.witnesses {
            if prev.is_some_and(|p| w.index <= p) {
                return Err(Error::Construction("witness indices must increase".into()));
            }
            prev = Some(w.index);
            let lhs = self.xi.eval(w.beta).abs();
            let rhs = 2f64.powi(w.index as i32) * self.phi.eval(w.beta.abs())?;
            if !(lhs > rhs) {
                return Err(Error::Construction(format!(
                    "witness β={} fails |ξ(β)| > 2^{}·φ(|β|) ({lhs:e} ≤ {rhs:e})",
                    w.beta, w.index
                )));
            }
        }
        if self.dim < 2 {
            return Err(Error::Construction("balls need n ≥ 2".into()));
        }
        Ok(())
    }
}

/// For `i = 1..=count`, the smallest `β = 2^{k/8}` (k ≥ −400) on which
/// `|ξ(β)| > 2^i·φ(β)` holds, searching upward to `2^{400/8}`.
pub fn find_witnesses(phi: &YoungFunction, xi: &XiFunction, count: u32) -> Result<Vec<Witness>> {
    let mut out = Vec::new();
    for i in 1..=count {
        let bound = 2f64.powi(i as i32);
        let mut found = None;
        for k in -400..=400 {
            for beta in [2f64.powf(k as f64 / 8.0), -2f64.powf(k as f64 / 8.0)] {
                let lhs = xi.eval(beta).abs();
                if lhs.is_finite() && lhs > bound * phi.eval(beta.abs())? {
                    found = Some(beta);
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        let beta = found.ok_or_else(|| {
            Error::Construction(format!("no β on the search grid with |ξ(β)| > 2^{i}·φ(|β|); ξ may lie in C_φ"))
        })?;
        out.push(Witness { index: i, beta });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma15Row {
    pub j: usize,
    pub index: u32,
    pub beta: f64,
    pub beta_prime: f64,
    pub c: f64,
    pub r: f64,
    /// λ(M_j).
    pub volume: f64,
    pub ratio: f64,
    pub modular_cumulative: f64,
    pub moment_cumulative: f64,
    pub lower_bound_cumulative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma15Result {
    pub h: SimpleFunction,
    /// `ρ_φ(h_J)` computed from the function itself.
    pub modular: f64,
    pub rows: Vec<Lemma15Row>,
}

const RETRIES: usize = 60;

/// Truncation `h_J = Σ_{j≤J} β_{i_j} χ_{M_j}` with `M_j = r_j B_n + c_j e₁` and
/// `(c_j + r_j) λ(M_j) = β'_j = 1/(2^{i_j} φ(|β_{i_j}|))`.
pub fn lemma15_construct(spec: &CounterexampleSpec, count: usize) -> Result<Lemma15Result> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::Construction("J must be at least 1".into()));
    }
    if spec.witnesses.len() < count {
        return Err(Error::Construction(format!("{} witnesses for J={count}", spec.witnesses.len())));
    }
    let n = spec.dim;
    let omega = unit_ball_volume(n);
    let mut rows = Vec::with_capacity(count);
    let mut terms = Vec::with_capacity(count);
    let mut prev_c = f64::NEG_INFINITY;
    let (mut modular_cum, mut moment_cum, mut lower_cum) = (0.0, 0.0, 0.0);
    for (j0, w) in spec.witnesses[..count].iter().enumerate() {
        let j = j0 + 1;
        let phi_beta = spec.phi.eval(w.beta.abs())?;
        let beta_prime = 1.0 / (2f64.powi(w.index as i32) * phi_beta);
        let mut c = (3.0 * j as f64).max(prev_c + 3.0);
        let mut r = f64::INFINITY;
        for _ in 0..RETRIES {
            r = solve_increasing(|r| (c + r) * omega * r.powi(n as i32), beta_prime, 0.5, ROOT_REL_TOL)?;
            if r < 1.0 {
                break;
            }
            c *= 2.0;
        }
        if !(r < 1.0) {
            return Err(Error::Construction(format!("no radius below 1 for ball {j} within {RETRIES} retries")));
        }
        let volume = omega * r.powi(n as i32);
        let ball = Region::new(n, vec![Primitive::ShiftedBall { radius: r, center: c }])?;
        let mu = ball.mu_n()?.value;
        modular_cum += phi_beta * mu;
        moment_cum += spec.xi.eval(w.beta) * c * volume;
        let ratio = c / (c + r);
        lower_cum += ratio;
        rows.push(Lemma15Row {
            j,
            index: w.index,
            beta: w.beta,
            beta_prime,
            c,
            r,
            volume,
            ratio,
            modular_cumulative: modular_cum,
            moment_cumulative: moment_cum,
            lower_bound_cumulative: lower_cum,
        });
        terms.push(Term {
            value: w.beta,
            region: ball,
        });
        prev_c = c;
    }
    let h = SimpleFunction::new(n, terms)?;
    let modular = modular(&spec.phi, &h)?;
    Ok(Lemma15Result { h, modular, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    pub k: usize,
    pub norm_gap: f64,
    pub psi_gap: f64,
}

/// `U_k = ⋃_{j≤k} (A[2^{-(j+1)}, 2^{-j}) ∪ A[j+1, j+2)) = A[2^{-(k+1)}, k+2)`.
fn truncation_annulus(n: usize, k: usize) -> Result<Region> {
    Region::annulus(n, 0.5f64.powi(k as i32 + 1), (k + 2) as f64)
}

/// Norm and Ψ gaps between `h` and its annular truncations `h_k = χ_{U_k}·h`, `k = 0..K`.
/// `h` must have one sign; mixed signs are handled by splitting into `h∨0` and `h∧0`.
pub fn continuity_probe(xi: &XiFunction, phi: &YoungFunction, h: &SimpleFunction, count: usize) -> Result<Vec<ContinuityRow>> {
    let pos = h.terms().iter().any(|t| t.value > 0.0);
    let neg = h.terms().iter().any(|t| t.value < 0.0);
    if pos && neg {
        return Err(Error::Domain("continuity probe needs h of one sign; split into h∨0 and h∧0".into()));
    }
    let full = psi(xi, h);
    (0..count)
        .map(|k| {
            let hk = h.restrict(&truncation_annulus(h.dim(), k)?)?;
            let gap = h.refine(&hk)?.difference();
            let mut d = psi(xi, &hk);
            d.add_scaled(-1.0, &full);
            Ok(ContinuityRow {
                k,
                norm_gap: orlicz_norm_amemiya(phi, &gap)?,
                psi_gap: d.norm(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(count: u32) -> CounterexampleSpec {
        let phi = YoungFunction::power(2.0).unwrap();
        let xi: XiFunction = "pow:4".parse().unwrap();
        let witnesses = find_witnesses(&phi, &xi, count).unwrap();
        CounterexampleSpec {
            phi,
            xi,
            witnesses,
            dim: 2,
        }
    }

    #[test]
    fn single_ball_moment() {
        let s = spec(1);
        let res = lemma15_construct(&s, 1).unwrap();
        let row = res.rows[0];
        let want = s.xi.eval(row.beta) * row.c * row.volume;
        assert!((psi(&s.xi, &res.h).0[0] - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn invariants_hold_on_prefix() {
        let res = lemma15_construct(&spec(20), 20).unwrap();
        assert!(res.modular <= 1.0);
        let mut prev_c = f64::NEG_INFINITY;
        for row in &res.rows {
            assert!(row.c > row.r && row.r < 1.0 && row.c > prev_c + 2.0);
            assert!(((row.c + row.r) * row.volume - row.beta_prime).abs() <= 1e-10 * row.beta_prime);
            assert!(row.moment_cumulative >= row.lower_bound_cumulative);
            prev_c = row.c;
        }
    }

    #[test]
    fn truncations_on_bounded_annulus() {
        let phi = YoungFunction::power(2.0).unwrap();
        let h = SimpleFunction::indicator(1.0, Region::annulus(2, 0.125, 4.0).unwrap()).unwrap();
        let rows = continuity_probe(&XiFunction::identity(), &phi, &h, 5).unwrap();
        assert!(rows[0].norm_gap > rows[1].norm_gap);
        assert!(rows[2..].iter().all(|r| r.norm_gap == 0.0 && r.psi_gap == 0.0));
        let h = SimpleFunction::indicator(1.0, Region::annulus(2, 1.0, 2.0).unwrap()).unwrap();
        let rows = continuity_probe(&XiFunction::identity(), &phi, &h, 3).unwrap();
        assert!(rows.iter().all(|r| r.norm_gap == 0.0));
    }
}
