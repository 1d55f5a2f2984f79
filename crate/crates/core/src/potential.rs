//! Potential models and weighted norms.

use crate::error::{invalid, Error, Result};
use crate::grid::{jb, SpatialGrid};
use serde::{Deserialize, Serialize};

/// Gaussian tails below `V0 * 1e-18` are treated as zero.
const GAUSSIAN_CUTOFF: f64 = 6.5;
/// `sech^2(22) < 4e-19`.
const SECH2_CUTOFF: f64 = 22.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    /// `V0` on `|x| <= a`.
    SquareBarrier { height: f64, half_width: f64 },
    /// `V0 exp(-(x/w)^2)`.
    Gaussian { height: f64, width: f64 },
    /// `V0 sech^2(x)`.
    Sech2 { height: f64 },
    /// Linear interpolation of samples, zero outside.
    Sampled { x: Vec<f64>, v: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    kind: PotentialKind,
    gamma: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind, gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(invalid("gamma", format!("decay exponent must be finite and >= 1, got {gamma}")));
        }
        let nonneg = |name: &str, v: f64| -> Result<()> {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
            }
            Ok(())
        };
        let positive = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
            Ok(())
        };
        match &kind {
            PotentialKind::Zero => {}
            PotentialKind::SquareBarrier { height, half_width } => {
                nonneg("height", *height)?;
                positive("half_width", *half_width)?;
            }
            PotentialKind::Gaussian { height, width } => {
                nonneg("height", *height)?;
                positive("width", *width)?;
            }
            PotentialKind::Sech2 { height } => nonneg("height", *height)?,
            PotentialKind::Sampled { x, v } => {
                if x.len() != v.len() || x.len() < 2 {
                    return Err(invalid("samples", "need matching x and V columns with at least 2 rows"));
                }
                if x.iter().chain(v.iter()).any(|t| !t.is_finite()) {
                    return Err(Error::NonFinite("potential samples".into()));
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("samples", "x must be strictly increasing"));
                }
            }
        }
        Ok(Self { kind, gamma })
    }

    pub fn zero() -> Self {
        Self { kind: PotentialKind::Zero, gamma: 2.0 }
    }

    pub fn square_barrier(height: f64, half_width: f64) -> Self {
        Self::new(PotentialKind::SquareBarrier { height, half_width }, 2.0).unwrap()
    }

    pub fn gaussian(height: f64, width: f64) -> Self {
        Self::new(PotentialKind::Gaussian { height, width }, 2.0).unwrap()
    }

    pub fn sech2(height: f64) -> Self {
        Self::new(PotentialKind::Sech2 { height }, 2.0).unwrap()
    }

    /// Samples `f` on the grid nodes.
    pub fn sampled_on(g: &SpatialGrid, f: impl Fn(f64) -> f64, gamma: f64) -> Result<Self> {
        let x = g.nodes();
        let v = x.iter().map(|&t| f(t)).collect();
        Self::new(PotentialKind::Sampled { x, v }, gamma)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(invalid("gamma", format!("decay exponent must be finite and >= 1, got {gamma}")));
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn name(&self) -> String {
        match &self.kind {
            PotentialKind::Zero => "zero".into(),
            PotentialKind::SquareBarrier { height, half_width } => {
                format!("square_barrier(V0={height}, a={half_width})")
            }
            PotentialKind::Gaussian { height, width } => format!("gaussian(V0={height}, w={width})"),
            PotentialKind::Sech2 { height } => format!("sech2(V0={height})"),
            PotentialKind::Sampled { x, .. } => format!("sampled({} points)", x.len()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            PotentialKind::Zero => true,
            PotentialKind::SquareBarrier { height, .. }
            | PotentialKind::Gaussian { height, .. }
            | PotentialKind::Sech2 { height } => *height == 0.0,
            PotentialKind::Sampled { v, .. } => v.iter().all(|&t| t == 0.0),
        }
    }

    pub fn is_built_in(&self) -> bool {
        !matches!(self.kind, PotentialKind::Sampled { .. })
    }

    pub fn is_even(&self) -> bool {
        self.is_built_in()
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::SquareBarrier { height, half_width } => {
                if x.abs() <= *half_width {
                    *height
                } else {
                    0.0
                }
            }
            PotentialKind::Gaussian { height, width } => {
                let u = x / width;
                height * (-u * u).exp()
            }
            PotentialKind::Sech2 { height } => {
                let c = x.cosh();
                height / (c * c)
            }
            PotentialKind::Sampled { x: xs, v } => interpolate(xs, v, x),
        }
    }

    /// Closed interval outside of which `V` vanishes (numerically), `None` for `V = 0`.
    pub fn support(&self) -> Option<(f64, f64)> {
        if self.is_zero() {
            return None;
        }
        match &self.kind {
            PotentialKind::Zero => None,
            PotentialKind::SquareBarrier { half_width, .. } => Some((-half_width, *half_width)),
            PotentialKind::Gaussian { width, .. } => Some((-GAUSSIAN_CUTOFF * width, GAUSSIAN_CUTOFF * width)),
            PotentialKind::Sech2 { .. } => Some((-SECH2_CUTOFF, SECH2_CUTOFF)),
            PotentialKind::Sampled { x, v } => {
                let first = v.iter().position(|&t| t != 0.0)?;
                let last = v.iter().rposition(|&t| t != 0.0)?;
                Some((x[first.saturating_sub(1)], x[(last + 1).min(x.len() - 1)]))
            }
        }
    }

    /// Points where `V` or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            PotentialKind::SquareBarrier { half_width, .. } => vec![-half_width, *half_width],
            PotentialKind::Sampled { x, .. } => match self.support() {
                Some((lo, hi)) => x.iter().copied().filter(|&t| t >= lo && t <= hi).collect(),
                None => Vec::new(),
            },
            _ => Vec::new(),
        }
    }

    /// The mirrored potential `V(-x)`.
    pub fn reflected(&self) -> Self {
        let kind = match &self.kind {
            PotentialKind::Sampled { x, v } => PotentialKind::Sampled {
                x: x.iter().rev().map(|t| -t).collect(),
                v: v.iter().rev().copied().collect(),
            },
            k => k.clone(),
        };
        Self { kind, gamma: self.gamma }
    }

    pub fn is_nonnegative(&self) -> bool {
        match &self.kind {
            PotentialKind::Sampled { v, .. } => v.iter().all(|&t| t >= 0.0),
            _ => true,
        }
    }

    pub fn samples(&self, g: &SpatialGrid) -> Vec<f64> {
        (0..g.len()).map(|i| self.eval(g.x(i))).collect()
    }

    pub fn weighted_l1_norm(&self, gamma: f64, g: &SpatialGrid) -> Result<f64> {
        weighted_l1_norm(self, gamma, g)
    }
}

fn interpolate(xs: &[f64], v: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if !(x >= xs[0] && x <= xs[n - 1]) {
        return 0.0;
    }
    let i = xs.partition_point(|&t| t <= x);
    if i >= n {
        return v[n - 1];
    }
    let i = i.max(1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let t = (x - x0) / (x1 - x0);
    v[i - 1] + t * (v[i] - v[i - 1])
}

/// Trapezoid approximation of `∫ <x>^gamma |V(x)| dx` over the grid.
pub fn weighted_l1_norm(p: &Potential, gamma: f64, g: &SpatialGrid) -> Result<f64> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(invalid("gamma", format!("must be >= 0, got {gamma}")));
    }
    let f: Vec<f64> = (0..g.len())
        .map(|i| {
            let x = g.x(i);
            jb(x).powf(gamma) * p.eval(x).abs()
        })
        .collect();
    if f.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("weighted potential samples".into()));
    }
    Ok(g.trapezoid(&f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let sq = Potential::square_barrier(1.0, 1.0);
        assert_eq!(sq.eval(0.0), 1.0);
        assert_eq!(sq.eval(5.0), 0.0);
        assert_eq!(sq.eval(1.0), 1.0);
        assert_eq!(Potential::gaussian(2.0, 1.0).eval(0.0), 2.0);
        assert_eq!(Potential::sech2(1.5).eval(0.0), 1.5);
        assert_eq!(Potential::zero().eval(3.0), 0.0);
    }

    #[test]
    fn sampled_interpolation() {
        let p = Potential::new(PotentialKind::Sampled { x: vec![-1.0, 0.0, 1.0], v: vec![0.0, 2.0, 0.0] }, 2.0)
            .unwrap();
        assert_eq!(p.eval(0.5), 1.0);
        assert_eq!(p.eval(-0.25), 1.5);
        assert_eq!(p.eval(3.0), 0.0);
        assert_eq!(p.support(), Some((-1.0, 1.0)));
        let r = p.reflected();
        assert_eq!(r.eval(0.5), p.eval(-0.5));
    }

    #[test]
    fn validation() {
        assert!(Potential::new(PotentialKind::Gaussian { height: -1.0, width: 1.0 }, 2.0).is_err());
        assert!(Potential::new(PotentialKind::Zero, 0.5).is_err());
        assert!(Potential::new(PotentialKind::Sampled { x: vec![0.0, 0.0], v: vec![1.0, 1.0] }, 2.0).is_err());
        assert!(weighted_l1_norm(&Potential::zero(), -1.0, &SpatialGrid::default_grid()).is_err());
    }

    #[test]
    fn square_barrier_norms() {
        let g = SpatialGrid::default_grid();
        let p = Potential::square_barrier(1.0, 1.0);
        let tol = 2.0 * g.h() * 2.0;
        assert!((weighted_l1_norm(&p, 0.0, &g).unwrap() - 2.0).abs() <= tol);
        assert!((weighted_l1_norm(&p, 2.0, &g).unwrap() - 8.0 / 3.0).abs() <= tol);
        assert_eq!(weighted_l1_norm(&Potential::zero(), 3.0, &g).unwrap(), 0.0);
    }
}
