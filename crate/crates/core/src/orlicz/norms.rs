use serde::{Deserialize, Serialize};

use super::SimpleFunction;
use crate::error::{Error, Result};
use crate::measure::Region;
use crate::numeric::{golden_section, solve_increasing, ROOT_REL_TOL};
use crate::young::YoungFunction;

/// `ρ_φ(h) = Σ φ(|αᵢ|)·μₙ(Mᵢ)`.
pub fn modular(phi: &YoungFunction, h: &SimpleFunction) -> Result<f64> {
    modular_of(phi, &h.weights()?, 1.0)
}

fn modular_of(phi: &YoungFunction, weights: &[(f64, f64)], scale: f64) -> Result<f64> {
    let mut total = 0.0;
    for &(a, mu) in weights {
        total += phi.eval(scale * a)? * mu;
    }
    Ok(total)
}

/// `inf{k > 0 : ρ_φ(h/k) ≤ 1}`.
pub fn luxemburg_norm(phi: &YoungFunction, h: &SimpleFunction) -> Result<f64> {
    let w = h.weights()?;
    if w.is_empty() {
        return Ok(0.0);
    }
    let amax = w.iter().map(|p| p.0).fold(0.0, f64::max);
    // u = 1/k; ρ(u·h) is increasing in u
    let u = solve_increasing(|u| modular_of(phi, &w, u).unwrap_or(f64::INFINITY), 1.0, 1.0 / amax, ROOT_REL_TOL)?;
    Ok(1.0 / u)
}

/// `inf_{k>0} (1 + ρ_φ(k·h))/k`, minimized in `u = 1/k` where the objective
/// `u·(1 + ρ_φ(h/u))` is convex.
pub fn orlicz_norm_amemiya(phi: &YoungFunction, h: &SimpleFunction) -> Result<f64> {
    let w = h.weights()?;
    if w.is_empty() {
        return Ok(0.0);
    }
    amemiya_of(phi, &w)
}

fn amemiya_of(phi: &YoungFunction, w: &[(f64, f64)]) -> Result<f64> {
    let objective = |u: f64| u * (1.0 + modular_of(phi, w, 1.0 / u).unwrap_or(f64::INFINITY));
    let amax = w.iter().map(|p| p.0).fold(0.0, f64::max);
    let u0 = amax * w.iter().map(|p| p.1).sum::<f64>().max(1e-300).sqrt();
    // coarse geometric scan; convexity puts the minimizer between the neighbors of the best node
    let nodes: Vec<f64> = (-80..=80).map(|j| u0 * 2f64.powi(j)).collect();
    let values: Vec<f64> = nodes.iter().map(|&u| objective(u)).collect();
    let (best, _) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Optimization("objective is infinite on the whole scan".into()))?;
    if best == 0 || best == nodes.len() - 1 {
        return Err(Error::Optimization(format!(
            "minimizer not bracketed: best scan node at the boundary u={:e}",
            nodes[best]
        )));
    }
    let (_, fx) = golden_section(objective, nodes[best - 1], nodes[best + 1], 1e-11)?;
    Ok(fx)
}

/// `‖χ_M‖_φ = μₙ(M)·φ*⁻¹(1/μₙ(M))`, and 0 when `μₙ(M) = 0`.
pub fn orlicz_norm_indicator(phi: &YoungFunction, region: &Region) -> Result<f64> {
    indicator_norm_from_mu(phi, region.mu_n()?.value)
}

pub fn indicator_norm_from_mu(phi: &YoungFunction, mu: f64) -> Result<f64> {
    if mu == 0.0 {
        return Ok(0.0);
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("μₙ(M) must be finite and non-negative, got {mu}")));
    }
    let star = phi.conjugate()?.phi_star;
    Ok(mu * star.inverse(1.0 / mu)?)
}

/// `‖f − g‖_φ` (Orlicz norm) on the common refinement of `f` and `g`.
pub fn norm_distance(phi: &YoungFunction, f: &SimpleFunction, g: &SimpleFunction) -> Result<f64> {
    orlicz_norm_amemiya(phi, &f.refine(g)?.difference())
}

/// The three quantities printed by the `norm` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub modular: f64,
    pub luxemburg: f64,
    pub orlicz: f64,
}

impl NormReport {
    pub fn compute(phi: &YoungFunction, h: &SimpleFunction) -> Result<Self> {
        Ok(NormReport {
            modular: modular(phi, h)?,
            luxemburg: luxemburg_norm(phi, h)?,
            orlicz: orlicz_norm_amemiya(phi, h)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disk() -> Region {
        Region::ball(2, 1.0).unwrap()
    }

    #[test]
    fn modular_of_unit_disk() {
        let phi = YoungFunction::power(2.0).unwrap();
        let h = SimpleFunction::indicator(1.0, disk()).unwrap();
        assert!((modular(&phi, &h).unwrap() - PI / 3.0).abs() < 1e-15);
        assert_eq!(modular(&phi, &SimpleFunction::zero(2)).unwrap(), 0.0);
    }

    #[test]
    fn indicator_norm_of_unit_disk() {
        let phi = YoungFunction::power(2.0).unwrap();
        let want = (4.0 * PI / 3.0).sqrt();
        assert!((orlicz_norm_indicator(&phi, &disk()).unwrap() - want).abs() < 1e-12);
        let h = SimpleFunction::indicator(1.0, disk()).unwrap();
        let am = orlicz_norm_amemiya(&phi, &h).unwrap();
        assert!((am - want).abs() < 1e-10 * want, "{am} vs {want}");
    }

    #[test]
    fn luxemburg_single_term_root() {
        let phi = YoungFunction::power(3.0).unwrap();
        let h = SimpleFunction::indicator(2.5, disk()).unwrap();
        let k = luxemburg_norm(&phi, &h).unwrap();
        let mu = 2.0 * PI / 3.0;
        assert!((phi.eval(2.5 / k).unwrap() * mu - 1.0).abs() < 1e-10);
    }

    #[test]
    fn indicator_zero_measure() {
        let phi = YoungFunction::exp();
        assert_eq!(orlicz_norm_indicator(&phi, &Region::ball(2, 0.0).unwrap()).unwrap(), 0.0);
    }
}
