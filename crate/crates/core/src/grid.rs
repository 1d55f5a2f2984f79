//! Uniform spatial grids and symmetric frequency grids.

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// Japanese bracket `sqrt(1 + x^2)`.
#[inline]
pub fn jb(x: f64) -> f64 {
    x.hypot(1.0)
}

#[inline]
pub fn pos(x: f64) -> f64 {
    x.max(0.0)
}

#[inline]
pub fn neg(x: f64) -> f64 {
    (-x).max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    h: f64,
}

impl SpatialGrid {
    pub const DEFAULT_X_MIN: f64 = -40.0;
    pub const DEFAULT_X_MAX: f64 = 40.0;
    pub const DEFAULT_POINTS: usize = 2049;

    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!("n_points={n_points} < 3")));
        }
        if !(x_min < 0.0 && 0.0 < x_max) {
            return Err(Error::InvalidGrid(format!(
                "need x_min < 0 < x_max, got [{x_min}, {x_max}]"
            )));
        }
        let h = (x_max - x_min) / (n_points - 1) as f64;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("bad spacing {h}")));
        }
        Ok(Self { x_min, x_max, n_points, h })
    }

    pub fn default_grid() -> Self {
        Self::new(Self::DEFAULT_X_MIN, Self::DEFAULT_X_MAX, Self::DEFAULT_POINTS).unwrap()
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn len(&self) -> usize {
        self.n_points
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Same interval, spacing halved.
    pub fn refined(&self) -> Self {
        Self::new(self.x_min, self.x_max, 2 * self.n_points - 1).unwrap()
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.h; self.n_points];
        w[0] *= 0.5;
        w[self.n_points - 1] *= 0.5;
        w
    }

    pub fn trapezoid(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.n_points);
        let inner: f64 = f[1..self.n_points - 1].iter().sum();
        self.h * (inner + 0.5 * (f[0] + f[self.n_points - 1]))
    }

    /// Largest `|x ± y|` over grid pairs.
    pub fn max_separation(&self) -> f64 {
        (self.x_max - self.x_min).max(2.0 * self.x_max.abs().max(self.x_min.abs()))
    }

    /// Highest angular frequency representable without aliasing.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.h
    }
}

/// Sorted frequency samples, symmetric about zero, with trapezoid weights.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    taus: Vec<f64>,
    weights: Vec<f64>,
    h_tau: f64,
    includes_zero: bool,
}

impl FrequencyGrid {
    /// Minimum nodes per sign on a dyadic band.
    pub const MIN_BAND_NODES: usize = 257;
    /// Phase advance allowed per frequency step, `h_tau * max|x±y|`.
    pub const OSCILLATION_BUDGET: f64 = std::f64::consts::FRAC_PI_4;

    /// `{k h_tau : |k| <= K}` with `K h_tau <= tau_max`, zero included.
    pub fn uniform(tau_max: f64, h_tau: f64) -> Result<Self> {
        if !(tau_max > 0.0 && h_tau > 0.0 && h_tau <= tau_max) {
            return Err(invalid("h_tau", format!("need 0 < h_tau <= tau_max, got {h_tau}, {tau_max}")));
        }
        let k = (tau_max / h_tau + 1e-9).floor() as i64;
        let taus: Vec<f64> = (-k..=k).map(|i| i as f64 * h_tau).collect();
        let mut weights = vec![h_tau; taus.len()];
        weights[0] *= 0.5;
        *weights.last_mut().unwrap() *= 0.5;
        Ok(Self { taus, weights, h_tau, includes_zero: true })
    }

    /// `±[lo, hi]` with `n` equispaced nodes per sign; zero excluded.
    pub fn band(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(0.0 < lo && lo < hi && hi.is_finite()) || n < 2 {
            return Err(invalid("band", format!("need 0 < lo < hi and n >= 2, got [{lo}, {hi}], n={n}")));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let pos: Vec<f64> = (0..n).map(|k| if k + 1 == n { hi } else { lo + k as f64 * h }).collect();
        let mut taus: Vec<f64> = pos.iter().rev().map(|t| -t).collect();
        taus.extend_from_slice(&pos);
        let mut w = vec![h; n];
        w[0] *= 0.5;
        w[n - 1] *= 0.5;
        let mut weights: Vec<f64> = w.iter().rev().copied().collect();
        weights.extend_from_slice(&w);
        Ok(Self { taus, weights, h_tau: h, includes_zero: false })
    }

    /// Band grid for the window at scale `m`, resolving phases `tau * max_sep` within the budget.
    pub fn for_scale(m: f64, max_sep: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(invalid("M", format!("must be positive, got {m}")));
        }
        let width = 1.5 * m;
        let steps = (width * max_sep / Self::OSCILLATION_BUDGET).ceil() as usize;
        let n = (steps + 1).max(Self::MIN_BAND_NODES);
        Self::band(0.5 * m, 2.0 * m, n)
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn h_tau(&self) -> f64 {
        self.h_tau
    }
    pub fn includes_zero(&self) -> bool {
        self.includes_zero
    }
    pub fn len(&self) -> usize {
        self.taus.len()
    }
    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.taus.last().copied().unwrap_or(0.0)
    }

    /// Index of the sample equal to `tau` up to `1e-9 * h_tau`.
    pub fn index_of(&self, tau: f64) -> Option<usize> {
        let tol = 1e-9 * self.h_tau.max(1e-300);
        let i = self.taus.partition_point(|&t| t < tau - tol);
        (i < self.taus.len() && (self.taus[i] - tau).abs() <= tol).then_some(i)
    }

    /// Index of `-tau_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.taus.len() - 1 - i
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        let tol = 1e-12 * hi.abs().max(1.0);
        let first_pos = self.taus.iter().copied().find(|&t| t > 0.0);
        let last = self.max_abs();
        match first_pos {
            Some(p) => last >= hi - tol && (p <= lo + tol || self.includes_zero),
            None => false,
        }
    }

    /// Checks the phase budget for kernels with separations up to `max_sep`.
    pub fn check_oscillation(&self, max_sep: f64) -> Result<()> {
        let required = Self::OSCILLATION_BUDGET / max_sep;
        if self.h_tau > required * (1.0 + 1e-9) {
            return Err(Error::Nyquist { required, actual: self.h_tau });
        }
        Ok(())
    }

    /// Same range with half the spacing.
    pub fn refined(&self) -> Self {
        if self.includes_zero {
            Self::uniform(self.max_abs(), 0.5 * self.h_tau).unwrap()
        } else {
            let n = self.taus.len() / 2;
            let lo = self.taus[n];
            Self::band(lo, self.max_abs(), 2 * n - 1).unwrap()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(SpatialGrid::new(-1.0, 1.0, 2).is_err());
        assert!(SpatialGrid::new(0.5, 1.0, 10).is_err());
        assert!(SpatialGrid::new(-1.0, f64::NAN, 10).is_err());
        let g = SpatialGrid::default_grid();
        assert!((g.h() - 80.0 / 2048.0).abs() < 1e-15);
        assert_eq!(g.x(g.len() - 1), 40.0);
        assert_eq!(g.refined().len(), 4097);
    }

    #[test]
    fn band_is_symmetric() {
        let f = FrequencyGrid::for_scale(4.0, 20.0).unwrap();
        let t = f.taus();
        for i in 0..t.len() {
            assert_eq!(t[i], -t[f.mirror(i)]);
        }
        assert!(f.covers(2.0, 8.0));
        f.check_oscillation(20.0).unwrap();
        assert!(f.check_oscillation(200.0).is_err());
        let r = f.refined();
        assert!((r.h_tau() - 0.5 * f.h_tau()).abs() < 1e-14);
    }

    #[test]
    fn uniform_lookup() {
        let f = FrequencyGrid::uniform(2.0, 0.25).unwrap();
        assert_eq!(f.len(), 17);
        assert_eq!(f.index_of(0.0), Some(8));
        assert_eq!(f.index_of(-2.0), Some(0));
        assert_eq!(f.index_of(0.3), None);
        let s: f64 = f.weights().iter().sum();
        assert!((s - 4.0).abs() < 1e-14);
    }
}
