//! Backward Gronwall bound for `v(x) <= a(x) + ∫_x^∞ b(t) v(t) dt`.

use crate::error::{invalid, Error, Result};
use crate::grid::SpatialGrid;

/// Evaluates `a(x) + ∫_x^∞ a(t) b(t) exp(∫_x^t b) dt` on the grid nodes.
///
/// `a` and `b` are read as piecewise linear between nodes and zero beyond the
/// right end. `∫ b` is the (exact) trapezoid sum; on each cell `a` is bounded
/// by its larger endpoint value, so the result dominates the continuous bound.
pub fn gronwall_bound(a: &[f64], b: &[f64], g: &SpatialGrid) -> Result<Vec<f64>> {
    let n = g.len();
    if a.len() != n || b.len() != n {
        return Err(invalid("a, b", format!("expected {n} samples, got {} and {}", a.len(), b.len())));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Gronwall inputs".into()));
    }
    if a.iter().chain(b.iter()).any(|&v| v < 0.0) {
        return Err(invalid("a, b", "Gronwall inputs must be nonnegative"));
    }
    let h = g.h();
    let mut out = vec![0.0; n];
    out[n - 1] = a[n - 1];
    // w_i = Σ_{k>=i} max(a_k, a_{k+1}) (e^{B_i - B_{k+1}} - e^{B_i - B_k})
    let mut w = 0.0;
    for i in (0..n - 1).rev() {
        let db = 0.5 * h * (b[i] + b[i + 1]);
        let grow = db.exp();
        w = a[i].max(a[i + 1]) * db.exp_m1() + grow * w;
        out[i] = a[i] + w;
    }
    Ok(out)
}

/// `B(x_i) = ∫_{x_i}^∞ b` by trapezoid, accumulated from the right.
pub fn tail_integral(b: &[f64], h: f64) -> Vec<f64> {
    let n = b.len();
    let mut out = vec![0.0; n];
    for i in (0..n - 1).rev() {
        out[i] = out[i + 1] + 0.5 * h * (b[i] + b[i + 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_feedback_returns_a() {
        let g = SpatialGrid::new(-2.0, 2.0, 41).unwrap();
        let a: Vec<f64> = (0..41).map(|i| (i as f64 * 0.3).sin().abs()).collect();
        let out = gronwall_bound(&a, &vec![0.0; 41], &g).unwrap();
        assert_eq!(out, a);
    }

    #[test]
    fn constant_a_closed_form() {
        let g = SpatialGrid::new(-3.0, 3.0, 301).unwrap();
        let b: Vec<f64> = g.nodes().iter().map(|x| (-x * x).exp()).collect();
        let a = vec![0.7; 301];
        let out = gronwall_bound(&a, &b, &g).unwrap();
        let bb = tail_integral(&b, g.h());
        for i in 0..301 {
            let exact = 0.7 * bb[i].exp();
            assert!((out[i] - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn rejects_negative() {
        let g = SpatialGrid::new(-1.0, 1.0, 3).unwrap();
        assert!(gronwall_bound(&[1.0, -1.0, 0.0], &[0.0; 3], &g).is_err());
    }
}
