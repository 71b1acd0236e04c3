//! Grid certificates for `|ξ(β)| ≤ λ·φ(|β|)`.

use serde::{Deserialize, Serialize};

use super::XiFunction;
use crate::error::{Error, Result};
use crate::young::YoungFunction;

/// Which end of the grid a divergence was seen at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Small,
    Large,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CphiReport {
    /// No divergence detected: `lambda_bound` bounds the ratio on the grid.
    pub certified_on_grid: bool,
    pub lambda_bound: Option<f64>,
    pub sup_ratio: f64,
    /// The `|β|` attaining the largest ratio.
    pub argmax: f64,
    /// A grid point in the diverging tail, when one was found.
    pub violation: Option<f64>,
    pub divergence: Option<Tail>,
    /// `(|β|, max(|ξ(β)|, |ξ(−β)|)/φ(δ|β|))` on the grid.
    pub ratios: Vec<(f64, f64)>,
}

/// 241 log-spaced points on `[1e-6, 1e6]`.
pub fn default_beta_grid() -> Vec<f64> {
    (0..=240).map(|k| 10f64.powf(-6.0 + k as f64 / 20.0)).collect()
}

pub fn check_cphi(xi: &XiFunction, phi: &YoungFunction, grid: &[f64]) -> Result<CphiReport> {
    check_cphi_delta(xi, phi, 1.0, grid)
}

/// The per-δ variant with ratios `|ξ(β)|/φ(δ|β|)`.
pub fn check_cphi_delta(xi: &XiFunction, phi: &YoungFunction, delta: f64, grid: &[f64]) -> Result<CphiReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("δ must be positive, got {delta}")));
    }
    let mut betas: Vec<f64> = grid.iter().map(|b| b.abs()).filter(|b| *b > 0.0).collect();
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    if betas.is_empty() {
        return Err(Error::Domain("β grid has no nonzero points".into()));
    }
    let mut ratios = Vec::with_capacity(betas.len());
    for &b in &betas {
        let num = xi.eval(b).abs().max(xi.eval(-b).abs());
        let den = phi.eval(delta * b)?;
        let r = if num == 0.0 {
            0.0
        } else if den == 0.0 || num.is_infinite() {
            f64::INFINITY
        } else {
            num / den
        };
        if !r.is_nan() {
            ratios.push((b, r));
        }
    }
    let (argmax, sup_ratio) = ratios.iter().copied().fold((betas[0], 0.0), |acc, (b, r)| if r > acc.1 { (b, r) } else { acc });

    let m = (ratios.len() / 10).max(5).min(ratios.len());
    let grows = |tail: &[(f64, f64)]| {
        // ratios increase toward the grid end and by more than a factor of 2
        tail.windows(2).all(|w| w[1].1 >= w[0].1) && tail.last().unwrap().1 > 2.0 * tail[0].1
    };
    let large = &ratios[ratios.len() - m..];
    let small_rev: Vec<(f64, f64)> = ratios[..m].iter().rev().copied().collect();
    let divergence = if grows(large) {
        Some(Tail::Large)
    } else if grows(&small_rev) {
        Some(Tail::Small)
    } else {
        None
    };
    let violation = divergence.map(|t| match t {
        Tail::Large => large.last().unwrap().0,
        Tail::Small => ratios[0].0,
    });
    let certified = divergence.is_none() && sup_ratio.is_finite();
    Ok(CphiReport {
        certified_on_grid: certified,
        lambda_bound: certified.then_some(sup_ratio),
        sup_ratio,
        argmax,
        violation,
        divergence,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_phi_has_unit_bound() {
        let phi = YoungFunction::power(2.0).unwrap();
        let xi = XiFunction::signed_young(phi.clone(), 1.0).unwrap();
        let r = check_cphi(&xi, &phi, &default_beta_grid()).unwrap();
        assert!(r.certified_on_grid);
        assert!((r.lambda_bound.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_fails_near_zero_for_quadratic_phi() {
        let phi = YoungFunction::power(2.0).unwrap();
        let r = check_cphi(&XiFunction::identity(), &phi, &default_beta_grid()).unwrap();
        assert_eq!(r.divergence, Some(Tail::Small));
        assert_eq!(r.violation, Some(1e-6));
    }

    #[test]
    fn beta_times_phi_fails_at_large_beta() {
        let phi = YoungFunction::power(2.0).unwrap();
        // ξ(β) = β·φ(|β|) = β³/2
        let xi = XiFunction::polynomial(vec![0.0, 0.0, 0.5]).unwrap();
        let r = check_cphi(&xi, &phi, &default_beta_grid()).unwrap();
        assert_eq!(r.divergence, Some(Tail::Large));
        assert!(!r.certified_on_grid);
    }

    #[test]
    fn delta_variant_rescales() {
        let phi = YoungFunction::power(2.0).unwrap();
        let xi = XiFunction::signed_young(phi.clone(), 1.0).unwrap();
        let r = check_cphi_delta(&xi, &phi, 0.5, &default_beta_grid()).unwrap();
        assert!((r.lambda_bound.unwrap() - 4.0).abs() < 1e-12);
    }
}
