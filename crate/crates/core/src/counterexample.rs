//! Dyadic shell functions `φ_N = Σ_{j<=N} |x|^{-1/2} 1_{2^j <= |x| <= 2^{j+1}}` and the growth
//! of `I_{1/2} φ_N(0)` against `‖φ_N‖₂`.

use crate::error::{invalid, Error, Result};
use crate::fit::{least_squares, rms_residual};
use serde::{Deserialize, Serialize};

/// `∫_{2^j}^{2^{j+1}} dr/r`.
fn shell_log(j: i32) -> f64 {
    2f64.powi(j + 1).ln() - 2f64.powi(j).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellFunction {
    pub n_shells: u32,
    /// Spatial dimension; only 1 is supported.
    pub dim: u32,
    /// `(|x|, φ_N(|x|))` on a logarithmic grid covering the support.
    pub samples: Vec<(f64, f64)>,
}

const SAMPLES_PER_SHELL: usize = 64;

pub fn build_phi_n(n: i64) -> Result<ShellFunction> {
    if n < 0 {
        return Err(invalid("N", format!("must be >= 0, got {n}")));
    }
    if n > 1000 {
        return Err(invalid("N", format!("{n} shells overflow the radial range")));
    }
    let n = n as u32;
    let mut sf = ShellFunction { n_shells: n, dim: 1, samples: Vec::new() };
    let top = (n + 1) as f64;
    let count = SAMPLES_PER_SHELL * (n as usize + 1);
    sf.samples = (0..=count)
        .map(|i| {
            let r = 2f64.powf(top * i as f64 / count as f64);
            (r, sf.eval(r))
        })
        .collect();
    Ok(sf)
}

impl ShellFunction {
    pub fn eval(&self, x: f64) -> f64 {
        let r = x.abs();
        if r >= 1.0 && r <= 2f64.powi(self.n_shells as i32 + 1) {
            r.powf(-0.5)
        } else {
            0.0
        }
    }

    pub fn shells(&self) -> u32 {
        self.n_shells + 1
    }

    /// `∫ φ_N² = 2 Σ_j [ln r]_{2^j}^{2^{j+1}}`.
    pub fn l2_norm_sq(&self) -> f64 {
        (0..=self.n_shells as i32).map(|j| 2.0 * shell_log(j)).sum()
    }

    /// Log-substituted trapezoid on the sample grid: `∫ r^{-1} dr = ∫ d(ln r)`.
    pub fn l2_norm_sq_quadrature(&self) -> f64 {
        let mut acc = 0.0;
        for w in self.samples.windows(2) {
            let (r0, f0) = w[0];
            let (r1, f1) = w[1];
            acc += 0.5 * (f0 * f0 * r0 + f1 * f1 * r1) * (r1.ln() - r0.ln());
        }
        2.0 * acc
    }

    /// Drops the outermost shell.
    pub fn truncated(&self) -> Result<Self> {
        if self.n_shells == 0 {
            return Err(invalid("N", "cannot drop the only shell"));
        }
        build_phi_n(self.n_shells as i64 - 1)
    }
}

/// `I_{1/2} φ_N(0) = ∫ |y|^{-1/2} φ_N(y) dy`, Riesz constant 1.
pub fn riesz_at_zero(sf: &ShellFunction) -> Result<f64> {
    if sf.dim != 1 {
        return Err(invalid("n", "only dimension 1 is implemented"));
    }
    // the integrand is 1/r on every shell
    Ok((0..=sf.n_shells as i32).map(|j| 2.0 * shell_log(j)).sum())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: u32,
    pub i0: f64,
    pub norm_sq: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingReport {
    pub dim: u32,
    pub rows: Vec<ScalingRow>,
    /// Fits are taken against `ln(N + 1)`, the number of shells.
    pub slope_i0_sq: f64,
    pub residual_i0_sq: f64,
    pub slope_norm_sq: f64,
    pub residual_norm_sq: f64,
    /// Ratio growth against the same abscissa.
    pub slope_ratio: f64,
    /// `ratio(2N)/ratio(N)` for every pair present in the list.
    pub doublings: Vec<(u32, f64)>,
    /// Same fits against `ln N`, for reference.
    pub slope_i0_sq_vs_n: f64,
    pub slope_norm_sq_vs_n: f64,
}

pub fn scaling_report(ns: &[i64]) -> Result<ScalingReport> {
    if ns.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: ns.len() });
    }
    let rows: Vec<ScalingRow> = ns
        .iter()
        .map(|&n| {
            let sf = build_phi_n(n)?;
            let i0 = riesz_at_zero(&sf)?;
            let norm_sq = sf.l2_norm_sq();
            Ok(ScalingRow { n: n as u32, i0, norm_sq, ratio: i0 * i0 / norm_sq })
        })
        .collect::<Result<_>>()?;
    let fit = |x: &dyn Fn(&ScalingRow) -> f64, y: &dyn Fn(&ScalingRow) -> f64| -> Result<(f64, f64)> {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (x(r), y(r))).collect();
        let (a, b) = least_squares(&pts)?;
        Ok((a, rms_residual(&pts, a, b)))
    };
    let shells = |r: &ScalingRow| ((r.n + 1) as f64).ln();
    let (slope_i0_sq, residual_i0_sq) = fit(&shells, &|r| (r.i0 * r.i0).ln())?;
    let (slope_norm_sq, residual_norm_sq) = fit(&shells, &|r| r.norm_sq.ln())?;
    let (slope_ratio, _) = fit(&shells, &|r| r.ratio.ln())?;
    let plain = |r: &ScalingRow| (r.n as f64).ln();
    let slope_i0_sq_vs_n = if rows.iter().all(|r| r.n > 0) { fit(&plain, &|r| (r.i0 * r.i0).ln())?.0 } else { f64::NAN };
    let slope_norm_sq_vs_n = if rows.iter().all(|r| r.n > 0) { fit(&plain, &|r| r.norm_sq.ln())?.0 } else { f64::NAN };
    let doublings = rows
        .iter()
        .filter_map(|a| rows.iter().find(|b| b.n == 2 * a.n && a.n > 0).map(|b| (a.n, b.ratio / a.ratio)))
        .collect();
    Ok(ScalingReport {
        dim: 1,
        rows,
        slope_i0_sq,
        residual_i0_sq,
        slope_norm_sq,
        residual_norm_sq,
        slope_ratio,
        doublings,
        slope_i0_sq_vs_n,
        slope_norm_sq_vs_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn closed_form_values() {
        let sf = build_phi_n(3).unwrap();
        assert_eq!(sf.eval(1.5), 1.5f64.powf(-0.5));
        assert_eq!(sf.eval(-1.5), 1.5f64.powf(-0.5));
        assert_eq!(sf.eval(0.5), 0.0);
        assert_eq!(sf.eval(17.0), 0.0);
        assert!(sf.eval(15.9) > 0.0);
        assert!(build_phi_n(-1).is_err());
    }

    #[test]
    fn riesz_values() {
        assert!((riesz_at_zero(&build_phi_n(0).unwrap()).unwrap() - 2.0 * LN_2).abs() < 1e-14);
        assert!((riesz_at_zero(&build_phi_n(10).unwrap()).unwrap() - 22.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(scaling_report(&[4, 8]), Err(Error::InsufficientSamples { .. })));
    }
}
