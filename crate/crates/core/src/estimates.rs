//! Hölder seminorms and empirical constants of the Jost-function bounds.

use crate::error::{invalid, Error, Result};
use crate::grid::{jb, neg, pos, FrequencyGrid, SpatialGrid};
use crate::jost::{JostSolver, Side, SolverOptions};
use crate::potential::Potential;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest pair separation entering the seminorm.
pub const HOLDER_MAX_SEPARATION: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub id: String,
    /// `sup LHS / shape` over the sampled region.
    pub constant: f64,
    /// `|C(h/2) - C(h)| / C(h)`, when a refined run was made.
    pub drift: Option<f64>,
    pub gamma: f64,
    pub sigma: f64,
    pub k: Option<u32>,
}

impl EstimateReport {
    pub fn new(id: &str, constant: f64, gamma: f64, sigma: f64, k: Option<u32>) -> Self {
        Self { id: id.to_string(), constant, drift: None, gamma, sigma, k }
    }
}

pub fn relative_drift(coarse: f64, fine: f64) -> f64 {
    if coarse == 0.0 && fine == 0.0 {
        0.0
    } else {
        (fine - coarse).abs() / coarse.abs().max(fine.abs() * 1e-300).max(f64::MIN_POSITIVE)
    }
}

/// `max |g(τa) - g(τb)| / |τa - τb|^σ` over pairs with `h_τ <= |τa - τb| <= 1`,
/// where `h_τ` is the smallest sample spacing. `taus` must be increasing.
pub fn holder_seminorm(taus: &[f64], samples: &[C64], sigma: f64) -> Result<f64> {
    if taus.len() < 2 || samples.len() != taus.len() {
        return Err(Error::InsufficientSamples { needed: 2, got: taus.len().min(samples.len()) });
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(invalid("sigma", format!("must lie in (0, 1), got {sigma}")));
    }
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("taus", "must be strictly increasing"));
    }
    let h = taus.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let lo = h * (1.0 - 1e-9);
    let hi = HOLDER_MAX_SEPARATION * (1.0 + 1e-12);
    let mut best: f64 = 0.0;
    for a in 0..taus.len() {
        for b in a + 1..taus.len() {
            let d = taus[b] - taus[a];
            if d > hi {
                break;
            }
            if d >= lo {
                best = best.max((samples[b] - samples[a]).norm() / d.powf(sigma));
            }
        }
    }
    Ok(best)
}

/// Seminorm on a uniform grid with precomputed offset weights (`w2[k] = (k h)^{-2σ}`).
fn holder_uniform(g: &[C64], w2: &[f64]) -> f64 {
    let n = g.len();
    let mut best: f64 = 0.0;
    for a in 0..n {
        let ga = g[a];
        let top = (w2.len() - 1).min(n - 1 - a);
        for k in 1..=top {
            let d = g[a + k] - ga;
            best = best.max(d.norm_sqr() * w2[k]);
        }
    }
    best.sqrt()
}

fn check_sigma(gamma: f64, sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Hypothesis(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    if sigma > gamma - 1.0 {
        return Err(Error::Hypothesis(format!(
            "sigma <= gamma - 1 is required (sigma={sigma}, gamma={gamma})"
        )));
    }
    Ok(())
}

/// `m - 1` and `∂_τ m` for one side, stored x-major.
struct SideData {
    rem: Vec<C64>,
    dm: Vec<C64>,
}

fn side_data(solver: &JostSolver, freq: &FrequencyGrid, side: Side) -> Result<SideData> {
    let n = solver.grid().len();
    let nt = freq.len();
    let cols: Vec<Result<(Vec<C64>, Vec<C64>)>> = freq
        .taus()
        .par_iter()
        .map(|&tau| {
            let c = solver.solve(tau, side, true)?;
            Ok((c.m, c.dm.unwrap()))
        })
        .collect();
    let mut rem = vec![C64::new(0.0, 0.0); n * nt];
    let mut dm = vec![C64::new(0.0, 0.0); n * nt];
    for (k, c) in cols.into_iter().enumerate() {
        let (m, d) = c?;
        for i in 0..n {
            rem[i * nt + k] = m[i] - 1.0;
            dm[i * nt + k] = d[i];
        }
    }
    Ok(SideData { rem, dm })
}

/// Empirical constants `sup LHS / shape` for the decay bounds on the Jost modifiers.
///
/// With `(n, f) = (<x∓>, <x±>)` for `m±`:
///
/// | id               | LHS                        | shape                       |
/// |------------------|----------------------------|-----------------------------|
/// | `pointwise`      | `|m - 1|`                  | `n / f^(γ-1)`               |
/// | `pointwise_tau`  | `|τ| |m - 1|`              | `n / f^γ`                   |
/// | `holder`         | `[m(x,·) - 1]_σ`           | `n^(1+σ) / f^(γ-1-σ)`       |
/// | `holder_tau`     | `[τ (m(x,·) - 1)]_σ`       | `n^(1+σ) / f^(γ-σ)`         |
/// | `derivative`     | `|∂_τ m|`                  | `n^2 / f^(γ-2)`             |
/// | `derivative_tau` | `|τ| |∂_τ m|`              | `n^2 / f^(γ-1)`             |
///
/// The derivative rows need `γ >= 2` and are omitted otherwise. The τ-grid must
/// be uniform and contain 0.
pub fn verify_jost_estimates(
    p: &Potential,
    g: &SpatialGrid,
    freq: &FrequencyGrid,
    gamma: f64,
    sigma: f64,
) -> Result<Vec<EstimateReport>> {
    check_sigma(gamma, sigma)?;
    if !freq.includes_zero() {
        return Err(invalid("freq", "estimate verification expects a uniform grid through 0"));
    }
    let solver = JostSolver::new(p, g, SolverOptions::default())?;
    let taus = freq.taus();
    let nt = taus.len();
    let h = freq.h_tau();
    let kmax = ((HOLDER_MAX_SEPARATION / h) * (1.0 + 1e-9)).floor() as usize;
    let w2: Vec<f64> = (0..=kmax).map(|k| if k == 0 { 0.0 } else { (k as f64 * h).powf(-2.0 * sigma) }).collect();
    let with_derivative = gamma >= 2.0;

    let mut c = [0.0f64; 6];
    for side in [Side::Plus, Side::Minus] {
        let data = side_data(&solver, freq, side)?;
        let per_x: Vec<[f64; 6]> = (0..g.len())
            .into_par_iter()
            .map(|i| {
                let x = g.x(i);
                // weights in the orientation of the side: x_± for m±
                let (near, far) = match side {
                    Side::Plus => (jb(neg(x)), jb(pos(x))),
                    Side::Minus => (jb(pos(x)), jb(neg(x))),
                };
                let rem = &data.rem[i * nt..(i + 1) * nt];
                let dm = &data.dm[i * nt..(i + 1) * nt];
                let mut out = [0.0f64; 6];
                if rem.iter().all(|v| *v == C64::new(0.0, 0.0)) && dm.iter().all(|v| *v == C64::new(0.0, 0.0)) {
                    return out;
                }
                let s66 = near / far.powf(gamma - 1.0);
                let s67 = near / far.powf(gamma);
                let s68 = near.powf(1.0 + sigma) / far.powf(gamma - 1.0 - sigma);
                let s69 = near.powf(1.0 + sigma) / far.powf(gamma - sigma);
                let s616 = near * near / far.powf(gamma - 2.0);
                let s617 = near * near / far.powf(gamma - 1.0);
                for k in 0..nt {
                    let r = rem[k].norm();
                    let t = taus[k].abs();
                    out[0] = out[0].max(r / s66);
                    out[1] = out[1].max(r * t / s67);
                    if with_derivative {
                        let d = dm[k].norm();
                        out[4] = out[4].max(d / s616);
                        out[5] = out[5].max(d * t / s617);
                    }
                }
                out[2] = holder_uniform(rem, &w2) / s68;
                let scaled: Vec<C64> = rem.iter().zip(taus).map(|(v, &t)| v * t).collect();
                out[3] = holder_uniform(&scaled, &w2) / s69;
                out
            })
            .collect();
        for v in per_x {
            for j in 0..6 {
                c[j] = c[j].max(v[j]);
            }
        }
    }
    let mut reports = vec![
        EstimateReport::new("pointwise", c[0], gamma, sigma, None),
        EstimateReport::new("pointwise_tau", c[1], gamma, sigma, None),
        EstimateReport::new("holder", c[2], gamma, sigma, None),
        EstimateReport::new("holder_tau", c[3], gamma, sigma, None),
    ];
    if with_derivative {
        reports.push(EstimateReport::new("derivative", c[4], gamma, sigma, Some(1)));
        reports.push(EstimateReport::new("derivative_tau", c[5], gamma, sigma, Some(1)));
    }
    Ok(reports)
}

/// Runs [`verify_jost_estimates`] on `(g, freq)` and on both refined, filling the drift.
pub fn verify_jost_estimates_refined(
    p: &Potential,
    g: &SpatialGrid,
    freq: &FrequencyGrid,
    gamma: f64,
    sigma: f64,
) -> Result<Vec<EstimateReport>> {
    let mut coarse = verify_jost_estimates(p, g, freq, gamma, sigma)?;
    let fine = verify_jost_estimates(p, &g.refined(), &freq.refined(), gamma, sigma)?;
    for (c, f) in coarse.iter_mut().zip(&fine) {
        c.drift = Some(relative_drift(c.constant, f.constant));
    }
    Ok(coarse)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|k| lo + k as f64 * h).collect()
    }

    #[test]
    fn constant_samples() {
        let t = grid(0.0, 1.0, 0.01);
        let s = vec![C64::new(2.0, 1.0); t.len()];
        assert_eq!(holder_seminorm(&t, &s, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn linear_samples() {
        let t = grid(0.0, 1.0, 0.01);
        let s: Vec<C64> = t.iter().map(|&x| C64::new(x, 0.0)).collect();
        let v = holder_seminorm(&t, &s, 0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn square_root_samples() {
        let t = grid(-1.0, 1.0, 0.005);
        let s: Vec<C64> = t.iter().map(|&x| C64::new(x.abs().sqrt(), 0.0)).collect();
        let v = holder_seminorm(&t, &s, 0.5).unwrap();
        assert!(v <= 1.0 + 1e-9 && v > 0.95, "{v}");
    }

    #[test]
    fn uniform_fast_path_agrees() {
        let t = grid(-2.0, 2.0, 0.02);
        let s: Vec<C64> = t.iter().map(|&x| C64::from_polar(1.0, 7.0 * x) * (1.0 + x * x)).collect();
        let h = 0.02;
        let w2: Vec<f64> = (0..=50).map(|k| if k == 0 { 0.0 } else { (k as f64 * h).powf(-0.6) }).collect();
        let a = holder_seminorm(&t, &s, 0.3).unwrap();
        let b = holder_uniform(&s, &w2);
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn errors() {
        assert!(holder_seminorm(&[0.0], &[C64::new(0.0, 0.0)], 0.5).is_err());
        assert!(holder_seminorm(&[0.0, 1.0], &[C64::new(0.0, 0.0); 2], 1.5).is_err());
        let g = SpatialGrid::new(-5.0, 5.0, 51).unwrap();
        let f = FrequencyGrid::uniform(2.0, 0.1).unwrap();
        assert!(matches!(
            verify_jost_estimates(&Potential::zero(), &g, &f, 1.2, 0.5),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn free_constants_vanish() {
        let g = SpatialGrid::new(-5.0, 5.0, 51).unwrap();
        let f = FrequencyGrid::uniform(2.0, 0.1).unwrap();
        let r = verify_jost_estimates(&Potential::zero(), &g, &f, 2.0, 0.5).unwrap();
        assert_eq!(r.len(), 6);
        assert!(r.iter().all(|e| e.constant == 0.0));
    }
}
