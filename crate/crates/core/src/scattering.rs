//! Transmission and reflection coefficients, the scattering identity, and
//! zero-energy resonance detection.
//!
//! The origin is classified by whether `T(0) ≠ 0` (resonant) or `T(τ) = ατ + o(τ)`
//! (non-resonant). Note that the narrative remark accompanying the theorem phrases
//! resonance "by the aid of the relation T(0) = 0"; the definition with `T(0) ≠ 0`
//! is what is implemented.

use crate::error::{invalid, Error, Result};
use crate::grid::{FrequencyGrid, SpatialGrid};
use crate::jost::{JostColumn, JostField, JostSolver, Side};
use crate::potential::Potential;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Extrapolated `|T(0)|` at or below this is non-resonant.
pub const RESONANCE_THRESHOLD: f64 = 0.02;
/// Allowed relative change of the fitted slope between the last two fits.
pub const SLOPE_STABILITY: f64 = 0.10;
pub const DEFAULT_TAU_SEQ: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Resonant,
    NonResonant,
}

/// `T = τ / (τ - (1/2i) ∫ V m₊)`.
pub fn transmission_from(integral: C64, tau: f64) -> Result<C64> {
    if tau == 0.0 {
        return Err(invalid("tau", "transmission needs tau != 0"));
    }
    let denom = tau - integral / (2.0 * I);
    if denom.norm() < 1e-12 {
        return Err(Error::SmallDenominator { tau, magnitude: denom.norm() });
    }
    Ok(tau / denom)
}

/// `R± = (T / 2iτ) ∫ e^{∓2iτt} V m∓`, from the column of `m∓`.
pub fn reflection_from(t: C64, other: &JostColumn) -> C64 {
    t / (2.0 * I * other.tau) * other.phase_integral
}

pub fn transmission(p: &Potential, g: &SpatialGrid, tau: f64) -> Result<C64> {
    if tau == 0.0 {
        return Err(invalid("tau", "transmission needs tau != 0"));
    }
    let s = JostSolver::with_defaults(p, g)?;
    transmission_from(s.solve(tau, Side::Plus, false)?.integral, tau)
}

pub fn reflection(p: &Potential, g: &SpatialGrid, tau: f64, side: Side) -> Result<C64> {
    if tau == 0.0 {
        return Err(invalid("tau", "reflection needs tau != 0"));
    }
    let s = JostSolver::with_defaults(p, g)?;
    let t = transmission_from(s.solve(tau, Side::Plus, false)?.integral, tau)?;
    let other = match side {
        Side::Plus => Side::Minus,
        Side::Minus => Side::Plus,
    };
    Ok(reflection_from(t, &s.solve(tau, other, false)?))
}

/// `(T, R₊, R₋)` from the two columns at one τ. At `τ = 0` the limits are used:
/// `(1, 0, 0)` when `∫ V m₊` vanishes, `(0, -1, -1)` otherwise.
fn coefficients(plus_integral: C64, plus_phase: C64, minus_phase: C64, tau: f64) -> Result<(C64, C64, C64)> {
    if tau == 0.0 {
        return Ok(if plus_integral.norm() < 1e-12 {
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
        } else {
            (C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(-1.0, 0.0))
        });
    }
    let t = transmission_from(plus_integral, tau)?;
    let k = t / (2.0 * I * tau);
    Ok((t, k * minus_phase, k * plus_phase))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub verdict: Verdict,
    pub taus: Vec<f64>,
    pub t: Vec<C64>,
    pub t0_extrapolated: C64,
    /// Slope of `T` at 0 (non-resonant case).
    pub alpha: Option<C64>,
    pub alpha_plus: Option<C64>,
    pub alpha_minus: Option<C64>,
    /// Relative change between the last two slope fits.
    pub slope_drift: f64,
}

#[derive(Clone, Debug)]
pub struct ScatteringData {
    pub taus: Vec<f64>,
    pub t: Vec<C64>,
    pub r_plus: Vec<C64>,
    pub r_minus: Vec<C64>,
    pub resonance: Option<ResonanceReport>,
}

impl ScatteringData {
    pub fn from_field(field: &JostField) -> Result<Self> {
        let taus = field.freq().taus().to_vec();
        let mut t = Vec::with_capacity(taus.len());
        let mut r_plus = Vec::with_capacity(taus.len());
        let mut r_minus = Vec::with_capacity(taus.len());
        for (k, &tau) in taus.iter().enumerate() {
            let (a, b, c) = coefficients(
                field.integral(Side::Plus, k),
                field.phase_integral(Side::Plus, k),
                field.phase_integral(Side::Minus, k),
                tau,
            )?;
            t.push(a);
            r_plus.push(b);
            r_minus.push(c);
        }
        Ok(Self { taus, t, r_plus, r_minus, resonance: None })
    }

    /// Solves (checked) at every τ of `freq`.
    pub fn compute(solver: &JostSolver, freq: &FrequencyGrid) -> Result<Self> {
        let rows: Vec<Result<(C64, C64, C64)>> = freq
            .taus()
            .par_iter()
            .map(|&tau| {
                let p = solver.solve(tau, Side::Plus, false)?;
                let m = solver.solve(tau, Side::Minus, false)?;
                coefficients(p.integral, p.phase_integral, m.phase_integral, tau)
            })
            .collect();
        let mut out = Self {
            taus: freq.taus().to_vec(),
            t: Vec::new(),
            r_plus: Vec::new(),
            r_minus: Vec::new(),
            resonance: None,
        };
        for r in rows {
            let (a, b, c) = r?;
            out.t.push(a);
            out.r_plus.push(b);
            out.r_minus.push(c);
        }
        Ok(out)
    }

    pub fn with_resonance(mut self, report: ResonanceReport) -> Self {
        self.resonance = Some(report);
        self
    }

    pub fn index_of(&self, tau: f64) -> Option<usize> {
        self.taus.iter().position(|&t| (t - tau).abs() <= 1e-12 * tau.abs().max(1.0))
    }

    /// `max |T|² + |R±|² - 1` over `|τ| >= min_tau`.
    pub fn unitarity_defect(&self, min_tau: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.taus.len() {
            if self.taus[k].abs() < min_tau {
                continue;
            }
            let tt = self.t[k].norm_sqr();
            worst = worst.max((tt + self.r_plus[k].norm_sqr() - 1.0).abs());
            worst = worst.max((tt + self.r_minus[k].norm_sqr() - 1.0).abs());
        }
        worst
    }
}

/// `sup_x` defect of `T m∓(x,τ) = R± e^{±2iτx} m±(x,τ) + m±(x,-τ)`, both signs.
pub fn check_scattering_identity(field: &JostField, data: &ScatteringData, tau: f64) -> Result<f64> {
    let f = field.freq();
    let it = f.index_of(tau).ok_or_else(|| invalid("tau", format!("{tau} is not on the frequency grid")))?;
    let jt = f.index_of(-tau).ok_or_else(|| invalid("tau", format!("{} is not on the frequency grid", -tau)))?;
    let kd = data.index_of(tau).ok_or_else(|| invalid("tau", format!("no scattering data at {tau}")))?;
    let (t, rp, rm) = (data.t[kd], data.r_plus[kd], data.r_minus[kd]);
    let g = field.grid();
    let mut worst: f64 = 0.0;
    for ix in 0..g.len() {
        let e = C64::from_polar(1.0, 2.0 * tau * g.x(ix));
        let mp = field.m(Side::Plus, ix, it);
        let mm = field.m(Side::Minus, ix, it);
        let upper = t * mm - rp * e * mp - field.m(Side::Plus, ix, jt);
        let lower = t * mp - rm / e * mm - field.m(Side::Minus, ix, jt);
        worst = worst.max(upper.norm()).max(lower.norm());
    }
    Ok(worst)
}

/// Classifies the origin from `T` at the decreasing positive `taus`.
pub fn detect_resonance(p: &Potential, g: &SpatialGrid, taus: &[f64]) -> Result<ResonanceReport> {
    detect_resonance_with(&JostSolver::with_defaults(p, g)?, taus)
}

pub fn detect_resonance_with(solver: &JostSolver, taus: &[f64]) -> Result<ResonanceReport> {
    if taus.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: taus.len() });
    }
    if taus.iter().any(|&t| !(t > 0.0)) || taus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("tau_seq", "must be positive and strictly decreasing"));
    }
    let mut t = Vec::new();
    let mut rp = Vec::new();
    let mut rm = Vec::new();
    for &tau in taus {
        let p = solver.solve(tau, Side::Plus, false)?;
        let m = solver.solve(tau, Side::Minus, false)?;
        let (a, b, c) = coefficients(p.integral, p.phase_integral, m.phase_integral, tau)?;
        t.push(a);
        rp.push(b);
        rm.push(c);
    }
    let n = taus.len();
    let slope = |v: &[C64], i: usize| (v[i] - v[i + 1]) / (taus[i] - taus[i + 1]);
    let alpha = slope(&t, n - 2);
    let t0 = t[n - 1] - alpha * taus[n - 1];
    let mut report = ResonanceReport {
        verdict: Verdict::Resonant,
        taus: taus.to_vec(),
        t: t.clone(),
        t0_extrapolated: t0,
        alpha: None,
        alpha_plus: None,
        alpha_minus: None,
        slope_drift: f64::NAN,
    };
    if t0.norm() > RESONANCE_THRESHOLD {
        return Ok(report);
    }
    if t.windows(2).any(|w| w[1].norm() >= w[0].norm()) {
        return Err(Error::Inconclusive(format!(
            "|T| is not decreasing along tau_seq {:?}: {:?}",
            taus,
            t.iter().map(|v| v.norm()).collect::<Vec<_>>()
        )));
    }
    let previous = slope(&t, n - 3);
    let drift = (alpha - previous).norm() / alpha.norm();
    report.slope_drift = drift;
    if drift <= SLOPE_STABILITY {
        let one = |v: &[C64]| -> Vec<C64> { v.iter().map(|r| r + 1.0).collect() };
        report.verdict = Verdict::NonResonant;
        report.alpha = Some(alpha);
        report.alpha_plus = Some(slope(&one(&rp), n - 2));
        report.alpha_minus = Some(slope(&one(&rm), n - 2));
    }
    Ok(report)
}
