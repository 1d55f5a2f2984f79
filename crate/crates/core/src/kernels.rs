//! Dense kernels of `φ(√H₀/M)`, `φ(√H/M)` and the low-energy leading part `K_M`.

use crate::error::{invalid, Error, Result};
use crate::estimates::EstimateReport;
use crate::grid::{jb, FrequencyGrid, SpatialGrid};
use crate::jost::{JostField, JostSolver, Side, SolverOptions};
use crate::potential::Potential;
use crate::scattering::{ScatteringData, Verdict};
use crate::window::LpWindow;
use ndarray::{Array2, Axis};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Prefactor of the spectral representation; with it the `V = 0` kernel is the
/// Fourier multiplier `(1/2π) ∫ φ(τ/M) e^{iτ(x-y)} dτ`.
pub const CALIBRATION: f64 = 1.0 / (2.0 * std::f64::consts::PI);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Free,
    Perturbed,
    LeadingKm,
    Remainder,
}

impl Provenance {
    pub fn code(self) -> u32 {
        match self {
            Provenance::Free => 0,
            Provenance::Perturbed => 1,
            Provenance::LeadingKm => 2,
            Provenance::Remainder => 3,
        }
    }
    pub fn from_code(c: u32) -> Option<Self> {
        Some(match c {
            0 => Provenance::Free,
            1 => Provenance::Perturbed,
            2 => Provenance::LeadingKm,
            3 => Provenance::Remainder,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct KernelMatrix {
    pub scale: f64,
    pub provenance: Provenance,
    pub calibration: f64,
    pub grid: SpatialGrid,
    /// `K(x_i, y_j)`.
    pub entries: Array2<C64>,
}

impl KernelMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.entries[[i, j]] - self.entries[[j, i]]).norm());
            }
        }
        worst
    }

    pub fn realness_defect(&self) -> f64 {
        self.entries.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &KernelMatrix) -> f64 {
        self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `self - other`, tagged as a remainder.
    pub fn remainder(&self, other: &KernelMatrix) -> KernelMatrix {
        KernelMatrix {
            scale: self.scale,
            provenance: Provenance::Remainder,
            calibration: self.calibration,
            grid: self.grid.clone(),
            entries: &self.entries - &other.entries,
        }
    }

    /// `∫ K(x, y) f(y) dy` by trapezoid in `y`.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let w = self.grid.trapezoid_weights();
        let fw: Vec<C64> = f.iter().zip(&w).map(|(v, w)| v * w).collect();
        self.entries
            .axis_iter(Axis(0))
            .map(|row| row.iter().zip(&fw).map(|(k, v)| k * v).sum())
            .collect()
    }
}

fn check_freq(window: &LpWindow, freq: &FrequencyGrid, g: &SpatialGrid) -> Result<()> {
    let (lo, hi) = window.support();
    if !freq.covers(lo, hi) {
        return Err(Error::FrequencyCoverage(format!(
            "grid reaches {} but the window at M={} needs [{lo}, {hi}]",
            freq.max_abs(),
            window.scale
        )));
    }
    freq.check_oscillation(g.max_separation())
}

/// `c Σ_k w_k φ(τ_k/M) a_k e^{i s τ_k z}` on `z = z0 + l h`, `l = 0..len`.
fn profile(freq: &FrequencyGrid, weights: &[C64], sign: f64, z0: f64, h: f64, len: usize) -> Vec<C64> {
    let taus = freq.taus();
    let active: Vec<usize> = (0..taus.len()).filter(|&k| weights[k] != C64::new(0.0, 0.0)).collect();
    (0..len)
        .into_par_iter()
        .map(|l| {
            let z = z0 + l as f64 * h;
            let mut acc = C64::new(0.0, 0.0);
            for &k in &active {
                acc += weights[k] * C64::from_polar(1.0, sign * taus[k] * z);
            }
            acc * CALIBRATION
        })
        .collect()
}

fn window_weights(window: &LpWindow, freq: &FrequencyGrid) -> Vec<f64> {
    freq.taus().iter().zip(freq.weights()).map(|(&t, &w)| w * window.eval(t)).collect()
}

/// Free kernel on the band grid for the window's scale.
pub fn free_kernel(window: &LpWindow, g: &SpatialGrid) -> Result<KernelMatrix> {
    let freq = FrequencyGrid::for_scale(window.scale, g.max_separation())?;
    free_kernel_with(window, g, &freq)
}

/// `(1/2π) ∫ φ(τ/M) e^{iτ(x-y)} dτ` with the quadrature of `freq`.
pub fn free_kernel_with(window: &LpWindow, g: &SpatialGrid, freq: &FrequencyGrid) -> Result<KernelMatrix> {
    check_freq(window, freq, g)?;
    let n = g.len();
    let w: Vec<C64> = window_weights(window, freq).into_iter().map(|v| C64::new(v, 0.0)).collect();
    let h = g.h();
    // d = x - y = (l - (n-1)) h
    let prof = profile(freq, &w, 1.0, -((n - 1) as f64) * h, h, 2 * n - 1);
    let entries = Array2::from_shape_fn((n, n), |(i, j)| prof[i + n - 1 - j]);
    Ok(KernelMatrix { scale: window.scale, provenance: Provenance::Free, calibration: CALIBRATION, grid: g.clone(), entries })
}

/// `c ∫ φ(τ/M) T(τ) f₊(y,τ) f₋(x,τ) dτ` for `x < y`, with `x, y` swapped otherwise.
pub fn perturbed_kernel(field: &JostField, data: &ScatteringData, window: &LpWindow) -> Result<KernelMatrix> {
    let g = field.grid();
    let freq = field.freq();
    check_freq(window, freq, g)?;
    if data.taus.len() != freq.len() {
        return Err(invalid("scattering data", "must be sampled on the field's frequency grid"));
    }
    let n = g.len();
    let ww = window_weights(window, freq);
    let active: Vec<usize> = (0..freq.len()).filter(|&k| ww[k] != 0.0).collect();
    let na = active.len();
    let mut fm = Array2::<C64>::zeros((na, n));
    let mut fp = Array2::<C64>::zeros((na, n));
    for (r, &k) in active.iter().enumerate() {
        let wt = data.t[k] * ww[k] * CALIBRATION;
        for i in 0..n {
            fm[[r, i]] = field.f(Side::Minus, i, k);
            fp[[r, i]] = wt * field.f(Side::Plus, i, k);
        }
    }
    // gram(i, j) = c Σ w φ T f₋(x_i) f₊(x_j)
    let gram = fm.t().dot(&fp);
    let entries = Array2::from_shape_fn((n, n), |(i, j)| if i < j { gram[[i, j]] } else { gram[[j, i]] });
    Ok(KernelMatrix {
        scale: window.scale,
        provenance: Provenance::Perturbed,
        calibration: CALIBRATION,
        grid: g.clone(),
        entries,
    })
}

/// Region of the ordered pair `x <= y` in the case table of `b(x, y, τ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `x <= 0 < y`: `b = T`.
    Straddle,
    /// `0 < x <= y`: `b = (R₊+1) e^{2iτx} - e^{2iτx} + 1`.
    Right,
    /// `x <= y <= 0`: `b = (R₋+1) e^{-2iτy} - e^{-2iτy} + 1`.
    Left,
}

pub fn region(x: f64, y: f64) -> Region {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    if x > 0.0 {
        Region::Right
    } else if y > 0.0 {
        Region::Straddle
    } else {
        Region::Left
    }
}

/// `b(x, y, τ)`, symmetric in `(x, y)` by construction.
pub fn leading_symbol(x: f64, y: f64, t: C64, r_plus: C64, r_minus: C64, tau: f64) -> C64 {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    match region(x, y) {
        Region::Straddle => t,
        Region::Right => {
            let e = C64::from_polar(1.0, 2.0 * tau * x);
            (r_plus + 1.0) * e - e + 1.0
        }
        Region::Left => {
            let e = C64::from_polar(1.0, -2.0 * tau * y);
            (r_minus + 1.0) * e - e + 1.0
        }
    }
}

/// `K_M(x, y) = c ∫ e^{-iτ(x-y)} φ(τ/M) b(x, y, τ) dτ` for `x <= y`, extended symmetrically.
pub fn leading_kernel_km(
    data: &ScatteringData,
    freq: &FrequencyGrid,
    window: &LpWindow,
    g: &SpatialGrid,
) -> Result<KernelMatrix> {
    if !(window.scale > 0.0 && window.scale <= 1.0) {
        return Err(invalid("M", format!("the leading kernel is defined for 0 < M <= 1, got {}", window.scale)));
    }
    check_freq(window, freq, g)?;
    if data.taus.len() != freq.len() {
        return Err(invalid("scattering data", "must be sampled on the frequency grid"));
    }
    let n = g.len();
    let h = g.h();
    let ww = window_weights(window, freq);
    let real: Vec<C64> = ww.iter().map(|&v| C64::new(v, 0.0)).collect();
    let wt: Vec<C64> = ww.iter().zip(&data.t).map(|(&v, t)| v * t).collect();
    let wrp: Vec<C64> = ww.iter().zip(&data.r_plus).map(|(&v, r)| v * (r + 1.0)).collect();
    let wrm: Vec<C64> = ww.iter().zip(&data.r_minus).map(|(&v, r)| v * (r + 1.0)).collect();
    // d = x - y = (l - (n-1)) h, s = x + y = 2 x_min + l h
    let d0 = -((n - 1) as f64) * h;
    let s0 = 2.0 * g.x_min();
    let len = 2 * n - 1;
    let straddle = profile(freq, &wt, -1.0, d0, h, len);
    let free = profile(freq, &real, -1.0, d0, h, len);
    let right_r = profile(freq, &wrp, 1.0, s0, h, len);
    let right_1 = profile(freq, &real, 1.0, s0, h, len);
    let left_r = profile(freq, &wrm, -1.0, s0, h, len);
    let left_1 = profile(freq, &real, -1.0, s0, h, len);
    let entries = Array2::from_shape_fn((n, n), |(a, b)| {
        let (i, j) = if a <= b { (a, b) } else { (b, a) };
        let d = i + n - 1 - j;
        let s = i + j;
        match region(g.x(i), g.x(j)) {
            Region::Straddle => straddle[d],
            Region::Right => right_r[s] - right_1[s] + free[d],
            Region::Left => left_r[s] - left_1[s] + free[d],
        }
    });
    Ok(KernelMatrix {
        scale: window.scale,
        provenance: Provenance::LeadingKm,
        calibration: CALIBRATION,
        grid: g.clone(),
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EstimateMode {
    /// `M >= 1`, reference is the free kernel.
    HighEnergy,
    /// `M <= 1`, reference is `K_M`; needs a non-resonant origin.
    LowEnergy(Verdict),
}

/// `sup |K_test - K_ref| / shape`, with shape
/// `(Σ± <M(x±y)>^{-σ}) (<x>^{σ-γ} + <y>^{σ-γ})`, times `M` in the low-energy mode.
pub fn verify_kernel_estimate(
    test: &KernelMatrix,
    reference: &KernelMatrix,
    gamma: f64,
    sigma: f64,
    mode: EstimateMode,
) -> Result<EstimateReport> {
    if !(sigma > 0.0 && sigma < 1.0 && sigma <= gamma - 1.0) {
        return Err(Error::Hypothesis(format!("need 0 < sigma < 1 and sigma <= gamma - 1, got sigma={sigma}, gamma={gamma}")));
    }
    let m = test.scale;
    if (reference.scale - m).abs() > 1e-12 * m || test.n() != reference.n() {
        return Err(Error::ModeMismatch("kernels differ in scale or size".into()));
    }
    let (factor, id) = match mode {
        EstimateMode::HighEnergy => {
            if m < 1.0 || reference.provenance != Provenance::Free {
                return Err(Error::ModeMismatch(format!(
                    "high-energy mode needs M >= 1 and a free reference, got M={m}, {:?}",
                    reference.provenance
                )));
            }
            (1.0, "high_energy_remainder")
        }
        EstimateMode::LowEnergy(verdict) => {
            if m > 1.0 || reference.provenance != Provenance::LeadingKm {
                return Err(Error::ModeMismatch(format!(
                    "low-energy mode needs M <= 1 and the leading kernel as reference, got M={m}, {:?}",
                    reference.provenance
                )));
            }
            if verdict != Verdict::NonResonant {
                return Err(Error::Hypothesis("the low-energy bound requires a non-resonant origin".into()));
            }
            (m, "low_energy_remainder")
        }
    };
    let g = &test.grid;
    let n = test.n();
    let xs = g.nodes();
    let wx: Vec<f64> = xs.iter().map(|&x| jb(x).powf(sigma - gamma)).collect();
    let c = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: f64 = 0.0;
            for j in 0..n {
                let diff = (test.entries[[i, j]] - reference.entries[[i, j]]).norm();
                if diff == 0.0 {
                    continue;
                }
                let osc = jb(m * (xs[i] + xs[j])).powf(-sigma) + jb(m * (xs[i] - xs[j])).powf(-sigma);
                best = best.max(diff / (factor * osc * (wx[i] + wx[j])));
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(EstimateReport::new(id, c, gamma, sigma, None))
}

/// Free, perturbed and (for `M <= 1`) leading kernels at one scale.
pub struct KernelBundle {
    pub freq: FrequencyGrid,
    pub data: ScatteringData,
    pub free: KernelMatrix,
    pub perturbed: KernelMatrix,
    pub leading: Option<KernelMatrix>,
}

pub fn assemble_kernels(p: &Potential, g: &SpatialGrid, scale: f64, opts: SolverOptions) -> Result<KernelBundle> {
    let window = LpWindow::at_scale(scale);
    let freq = FrequencyGrid::for_scale(scale, g.max_separation())?;
    let solver = JostSolver::new(p, g, opts)?;
    let field = JostField::compute(&solver, &freq, false)?;
    let data = ScatteringData::from_field(&field)?;
    let perturbed = perturbed_kernel(&field, &data, &window)?;
    drop(field);
    let free = free_kernel_with(&window, g, &freq)?;
    let leading = if scale <= 1.0 { Some(leading_kernel_km(&data, &freq, &window, g)?) } else { None };
    Ok(KernelBundle { freq, data, free, perturbed, leading })
}
