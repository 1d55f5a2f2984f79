//! Independent reference values: plane-wave matching for the square barrier,
//! the repulsive `sech²` transmission, and Picard iteration for Gronwall inputs.

use crate::grid::SpatialGrid;
use num_complex::Complex64 as C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `sin(k d)/k`, continuous at `k = 0`.
fn sin_over(k: C64, d: f64) -> C64 {
    if (k * d).norm() < 1e-6 {
        C64::new(d, 0.0) * (1.0 - k * k * d * d / 6.0)
    } else {
        (k * d).sin() / k
    }
}

/// Square barrier `V0` on `[-a, a]` solved by matching plane waves.
#[derive(Clone, Copy, Debug)]
pub struct SquareBarrierOracle {
    pub height: f64,
    pub half_width: f64,
}

impl SquareBarrierOracle {
    pub fn new(height: f64, half_width: f64) -> Self {
        Self { height, half_width }
    }

    fn k(&self, tau: f64) -> C64 {
        C64::new(tau * tau - self.height, 0.0).sqrt()
    }

    /// `(f₊, f₊')` at `x` for the solution equal to `e^{iτx}` right of the barrier.
    fn f_plus(&self, x: f64, tau: f64) -> (C64, C64) {
        let a = self.half_width;
        if x >= a {
            let e = C64::from_polar(1.0, tau * x);
            return (e, I * tau * e);
        }
        let k = self.k(tau);
        let ea = C64::from_polar(1.0, tau * a);
        let inner = |d: f64| {
            let s = sin_over(k, d);
            let c = (k * d).cos();
            (ea * (c + I * tau * s), ea * (-k * k * s + I * tau * c))
        };
        if x >= -a {
            return inner(x - a);
        }
        let (f0, f1) = inner(-2.0 * a);
        let (al, be) = self.left_coefficients_from(f0, f1, tau);
        let e = C64::from_polar(1.0, tau * x);
        (al * e + be / e, I * tau * (al * e - be / e))
    }

    fn left_coefficients_from(&self, f0: C64, f1: C64, tau: f64) -> (C64, C64) {
        let a = self.half_width;
        let g = f1 / (I * tau);
        let alpha = 0.5 * (f0 + g) * C64::from_polar(1.0, tau * a);
        let beta = 0.5 * (f0 - g) * C64::from_polar(1.0, -tau * a);
        (alpha, beta)
    }

    /// `f₊ = α e^{iτx} + β e^{-iτx}` left of the barrier.
    fn left_coefficients(&self, tau: f64) -> (C64, C64) {
        let a = self.half_width;
        let k = self.k(tau);
        let ea = C64::from_polar(1.0, tau * a);
        let d = -2.0 * a;
        let s = sin_over(k, d);
        let c = (k * d).cos();
        self.left_coefficients_from(ea * (c + I * tau * s), ea * (-k * k * s + I * tau * c), tau)
    }

    pub fn transmission(&self, tau: f64) -> C64 {
        1.0 / self.left_coefficients(tau).0
    }

    /// `R₋`; the barrier is even, so `R₊` is the same number.
    pub fn reflection(&self, tau: f64) -> C64 {
        let (al, be) = self.left_coefficients(tau);
        be / al
    }

    /// Textbook amplitude `e^{-2iτa} / (cos 2ka - i (τ² + k²)/(2τk) sin 2ka)`.
    pub fn transmission_textbook(&self, tau: f64) -> C64 {
        let k = self.k(tau);
        let l = 2.0 * self.half_width;
        let s = sin_over(k, l);
        let denom = (k * l).cos() - I * (tau * tau + k * k) / (2.0 * tau) * s;
        C64::from_polar(1.0, -tau * l) / denom
    }

    /// `m₊(x, τ) = e^{-iτx} f₊(x, τ)`.
    pub fn m_plus(&self, x: f64, tau: f64) -> C64 {
        C64::from_polar(1.0, -tau * x) * self.f_plus(x, tau).0
    }

    /// `m₋(x, τ) = m₊(-x, τ)` for the even barrier.
    pub fn m_minus(&self, x: f64, tau: f64) -> C64 {
        self.m_plus(-x, tau)
    }
}

/// `|T|²` for `V0 sech²(x)` with `4 V0 > 1`.
pub fn sech2_transmission_probability(height: f64, tau: f64) -> f64 {
    let s = (std::f64::consts::PI * tau).sinh().powi(2);
    let c = (0.5 * std::f64::consts::PI * (4.0 * height - 1.0).sqrt()).cosh().powi(2);
    s / (s + c)
}

/// Fixed point of `v = a + ∫_x^∞ b v` by Picard iteration on a refined grid.
///
/// `a`, `b` are interpolated linearly onto `refine` subintervals per cell and
/// the integral is a trapezoid sum; iteration stops when the update is below `1e-14`.
pub fn picard_fixed_point(a: &[f64], b: &[f64], g: &SpatialGrid, refine: usize) -> Vec<f64> {
    let n = g.len();
    let nf = (n - 1) * refine + 1;
    let hf = g.h() / refine as f64;
    let lerp = |v: &[f64], j: usize| {
        let c = j / refine;
        let r = (j % refine) as f64 / refine as f64;
        if c + 1 >= n {
            v[n - 1]
        } else {
            v[c] * (1.0 - r) + v[c + 1] * r
        }
    };
    let af: Vec<f64> = (0..nf).map(|j| lerp(a, j)).collect();
    let bf: Vec<f64> = (0..nf).map(|j| lerp(b, j)).collect();
    let mut v = af.clone();
    for _ in 0..100_000 {
        let mut next = vec![0.0; nf];
        let mut acc = 0.0;
        next[nf - 1] = af[nf - 1];
        for j in (0..nf - 1).rev() {
            acc += 0.5 * hf * (bf[j] * v[j] + bf[j + 1] * v[j + 1]);
            next[j] = af[j] + acc;
        }
        let change = next.iter().zip(&v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let scale = next.iter().copied().fold(1.0, f64::max);
        v = next;
        if change <= 1e-14 * scale {
            break;
        }
    }
    (0..n).map(|i| v[i * refine]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_agrees_with_textbook() {
        let o = SquareBarrierOracle::new(1.0, 1.0);
        for &tau in &[0.3, 0.9, 1.0, 1.7, 5.0] {
            let a = o.transmission(tau);
            let b = o.transmission_textbook(tau);
            assert!((a - b).norm() < 1e-12, "{tau}: {a} vs {b}");
            let r = o.reflection(tau);
            assert!((a.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn free_limit() {
        let o = SquareBarrierOracle::new(0.0, 1.0);
        assert!((o.transmission(2.0) - 1.0).norm() < 1e-14);
        assert!(o.reflection(2.0).norm() < 1e-14);
        assert!((o.m_plus(-3.0, 2.0) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn picard_with_zero_b() {
        let g = SpatialGrid::new(-1.0, 1.0, 11).unwrap();
        let a: Vec<f64> = (0..11).map(|i| i as f64).collect();
        assert_eq!(picard_fixed_point(&a, &[0.0; 11], &g, 4), a);
    }
}
