//! Smooth dyadic partition of unity.

use crate::grid::FrequencyGrid;
use serde::{Deserialize, Serialize};

/// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})`: 0 for `t <= 0`, 1 for `t >= 1`, smooth.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Even cutoff: 1 on `[-1, 1]`, 0 outside `[-2, 2]`.
pub fn psi(s: f64) -> f64 {
    1.0 - smooth_step(s.abs() - 1.0)
}

/// `ψ(s) - ψ(2s)`, supported in `1/2 <= |s| <= 2`.
pub fn phi(s: f64) -> f64 {
    let a = s.abs();
    if !(0.5..2.0).contains(&a) {
        return 0.0;
    }
    psi(s) - psi(2.0 * s)
}

/// `φ(·/M)`; `j` is set when `M = 2^j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpWindow {
    pub j: Option<i32>,
    pub scale: f64,
}

pub fn build_lp_window(j: i32) -> LpWindow {
    LpWindow { j: Some(j), scale: 2f64.powi(j) }
}

impl LpWindow {
    pub fn at_scale(scale: f64) -> Self {
        let l = scale.log2();
        let j = (l == l.round()).then_some(l as i32);
        Self { j, scale }
    }

    pub fn eval(&self, tau: f64) -> f64 {
        phi(tau / self.scale)
    }

    pub fn support(&self) -> (f64, f64) {
        (0.5 * self.scale, 2.0 * self.scale)
    }

    pub fn samples(&self, f: &FrequencyGrid) -> Vec<f64> {
        f.taus().iter().map(|&t| self.eval(t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity() {
        for k in 0..2000 {
            let s = 1e-4 * 1.0057f64.powi(k);
            let total: f64 = (-20..=20).map(|j| phi(s / 2f64.powi(j))).sum();
            assert!((total - 1.0).abs() < 1e-12, "{s}: {total}");
        }
        let one: f64 = (-20..=20).map(|j| phi(1.0 / 2f64.powi(j))).sum();
        assert!((one - 1.0).abs() < 1e-15);
    }

    #[test]
    fn support_and_symmetry() {
        assert_eq!(phi(3.0), 0.0);
        assert_eq!(phi(0.4), 0.0);
        assert_eq!(phi(1.0), 1.0);
        for k in 0..1000 {
            let s = 0.003 * k as f64;
            assert_eq!(phi(s), phi(-s));
            assert!(phi(s) >= 0.0);
        }
        let w = build_lp_window(2);
        assert_eq!(w.support(), (2.0, 8.0));
        assert_eq!(LpWindow::at_scale(0.25).j, Some(-2));
    }
}
