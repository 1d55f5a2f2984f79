//! Dyadic blocks of `H₀` and `H`, homogeneous Besov norms, norm equivalence,
//! and cross-localization between the two block families.

use crate::error::{invalid, Error, Result};
use crate::grid::{FrequencyGrid, SpatialGrid};
use crate::jost::{JostSolver, Side, SolverOptions};
use crate::kernels::{KernelMatrix, CALIBRATION};
use crate::potential::Potential;
use crate::scattering::{detect_resonance_with, transmission_from, Verdict, DEFAULT_TAU_SEQ};
use crate::window::phi;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Norms below this count as zero.
pub const NORM_FLOOR: f64 = 1e-12;
/// Relative edge amplitude allowed for functions entering a Besov norm.
pub const EDGE_DECAY: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Free,
    Perturbed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub j_min: i32,
    pub j_max: i32,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, j_min: i32, j_max: i32) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(invalid("s", format!("must be >= 0, got {s}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid("p", format!("must lie in (1, inf), got {p}")));
        }
        if j_min > j_max {
            return Err(invalid("j_range", format!("empty range [{j_min}, {j_max}]")));
        }
        Ok(Self { s, p, j_min, j_max })
    }

    /// `s < 1/p`, needed for the equivalence.
    pub fn check_equivalence(&self) -> Result<()> {
        if self.s >= 1.0 / self.p {
            return Err(Error::Hypothesis(format!(
                "norm equivalence needs 0 <= s < 1/p, got s={} with 1/p={}",
                self.s,
                1.0 / self.p
            )));
        }
        Ok(())
    }
}

pub fn lp_norm(f: &[C64], p: f64, g: &SpatialGrid) -> f64 {
    let v: Vec<f64> = f.iter().map(|z| z.norm().powf(p)).collect();
    g.trapezoid(&v).max(0.0).powf(1.0 / p)
}

pub fn lp_norm_real(f: &[f64], p: f64, g: &SpatialGrid) -> f64 {
    let v: Vec<f64> = f.iter().map(|z| z.abs().powf(p)).collect();
    g.trapezoid(&v).max(0.0).powf(1.0 / p)
}

pub fn to_complex(f: &[f64]) -> Vec<C64> {
    f.iter().map(|&v| C64::new(v, 0.0)).collect()
}

fn check_decay(f: &[C64]) -> Result<()> {
    let peak = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let edge = f[0].norm().max(f[f.len() - 1].norm());
    if edge > EDGE_DECAY * peak {
        return Err(Error::NonDecaying { edge });
    }
    Ok(())
}

/// Everything needed to apply `φ(√H₀/2^j)` and `φ(√H/2^j)` on one grid.
pub struct BlockContext {
    grid: SpatialGrid,
    solver: Option<JostSolver>,
    kernels: BTreeMap<i32, KernelMatrix>,
}

impl BlockContext {
    /// Free blocks only.
    pub fn free(grid: &SpatialGrid) -> Self {
        Self { grid: grid.clone(), solver: None, kernels: BTreeMap::new() }
    }

    pub fn new(p: &Potential, grid: &SpatialGrid, opts: SolverOptions) -> Result<Self> {
        Ok(Self { grid: grid.clone(), solver: Some(JostSolver::new(p, grid, opts)?), kernels: BTreeMap::new() })
    }

    /// Registers a dense perturbed kernel for block `j`; it takes precedence over the spectral path.
    pub fn with_kernel(mut self, j: i32, k: KernelMatrix) -> Self {
        self.kernels.insert(j, k);
        self
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn solver(&self) -> Option<&JostSolver> {
        self.solver.as_ref()
    }

    /// The whole band `[2^{j-1}, 2^{j+1}]` lies below the grid's Nyquist frequency.
    pub fn resolvable(&self, j: i32) -> bool {
        2f64.powi(j + 1) <= self.grid.nyquist()
    }

    fn freq(&self, scale: f64) -> Result<FrequencyGrid> {
        FrequencyGrid::for_scale(scale, self.grid.max_separation())
    }

    /// Applies block `j` to every function of the batch.
    pub fn apply(&self, fs: &[Vec<C64>], j: i32, which: Which) -> Result<Vec<Vec<C64>>> {
        let n = self.grid.len();
        if fs.iter().any(|f| f.len() != n) {
            return Err(invalid("f", format!("expected {n} samples")));
        }
        if !self.resolvable(j) {
            return Err(Error::Nyquist { required: std::f64::consts::PI / 2f64.powi(j + 1), actual: self.grid.h() });
        }
        let scale = 2f64.powi(j);
        match which {
            Which::Free => self.apply_free(fs, scale),
            Which::Perturbed => {
                if let Some(k) = self.kernels.get(&j) {
                    return Ok(fs.iter().map(|f| k.apply(f)).collect());
                }
                let solver = self.solver.as_ref().ok_or(Error::MissingKernel(j))?;
                self.apply_spectral(solver, fs, scale)
            }
        }
    }

    /// Toeplitz product with the free kernel profile.
    fn apply_free(&self, fs: &[Vec<C64>], scale: f64) -> Result<Vec<Vec<C64>>> {
        let g = &self.grid;
        let n = g.len();
        let freq = self.freq(scale)?;
        let taus = freq.taus();
        let w: Vec<f64> = taus.iter().zip(freq.weights()).map(|(&t, &w)| w * phi(t / scale)).collect();
        let active: Vec<usize> = (0..taus.len()).filter(|&k| w[k] != 0.0).collect();
        let h = g.h();
        let prof: Vec<C64> = (0..2 * n - 1)
            .into_par_iter()
            .map(|l| {
                let d = (l as f64 - (n - 1) as f64) * h;
                let mut acc = C64::new(0.0, 0.0);
                for &k in &active {
                    acc += w[k] * C64::from_polar(1.0, taus[k] * d);
                }
                acc * CALIBRATION
            })
            .collect();
        let tw = g.trapezoid_weights();
        Ok(fs
            .iter()
            .map(|f| {
                let fw: Vec<C64> = f.iter().zip(&tw).map(|(a, b)| a * b).collect();
                (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let base = i + n - 1;
                        let mut acc = C64::new(0.0, 0.0);
                        for (j, v) in fw.iter().enumerate() {
                            acc += prof[base - j] * v;
                        }
                        acc
                    })
                    .collect()
            })
            .collect())
    }

    /// `c Σ_k w_k φ T [f₋(x) Σ_{y>x} f₊ F + f₊(x) Σ_{y<=x} f₋ F]`, the dense product
    /// with the perturbed kernel evaluated without forming the matrix.
    fn apply_spectral(&self, solver: &JostSolver, fs: &[Vec<C64>], scale: f64) -> Result<Vec<Vec<C64>>> {
        let g = &self.grid;
        let n = g.len();
        let nf = fs.len();
        let freq = self.freq(scale)?;
        let taus = freq.taus();
        let real = fs.iter().all(|f| {
            let peak = f.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
            f.iter().all(|z| z.im.abs() <= 1e-12 * peak.max(f64::MIN_POSITIVE))
        });
        // real data: the -τ half is the conjugate of the +τ half
        let ks: Vec<usize> = (0..taus.len())
            .filter(|&k| phi(taus[k] / scale) != 0.0 && (!real || taus[k] > 0.0))
            .collect();
        let tw = g.trapezoid_weights();
        let fw: Vec<Vec<C64>> = fs.iter().map(|f| f.iter().zip(&tw).map(|(a, b)| a * b).collect()).collect();
        let xs = g.nodes();
        let zero = || vec![vec![C64::new(0.0, 0.0); n]; nf];
        let acc = ks
            .par_iter()
            .try_fold(zero, |mut acc, &k| -> Result<Vec<Vec<C64>>> {
                let tau = taus[k];
                let p = solver.column(tau, Side::Plus, false);
                let m = solver.column(tau, Side::Minus, false);
                let t = transmission_from(p.integral, tau)?;
                let c = CALIBRATION * freq.weights()[k] * phi(tau / scale) * t * if real { 2.0 } else { 1.0 };
                let fp: Vec<C64> = (0..n).map(|i| C64::from_polar(1.0, tau * xs[i]) * p.m[i]).collect();
                let fm: Vec<C64> = (0..n).map(|i| C64::from_polar(1.0, -tau * xs[i]) * m.m[i]).collect();
                for (b, f) in fw.iter().enumerate() {
                    let out = &mut acc[b];
                    let mut lower = C64::new(0.0, 0.0);
                    let mut suffix = vec![C64::new(0.0, 0.0); n + 1];
                    for i in (0..n).rev() {
                        suffix[i] = suffix[i + 1] + fp[i] * f[i];
                    }
                    for i in 0..n {
                        lower += fm[i] * f[i];
                        out[i] += c * (fm[i] * suffix[i + 1] + fp[i] * lower);
                    }
                }
                Ok(acc)
            })
            .try_reduce(zero, |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    for (u, v) in x.iter_mut().zip(y) {
                        *u += v;
                    }
                }
                Ok(a)
            })?;
        Ok(if real { acc.into_iter().map(|v| v.into_iter().map(|z| C64::new(z.re, 0.0)).collect()).collect() } else { acc })
    }
}

pub fn lp_block_apply(f: &[C64], j: i32, which: Which, ctx: &BlockContext) -> Result<Vec<C64>> {
    Ok(ctx.apply(&[f.to_vec()], j, which)?.pop().unwrap())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockNorm {
    pub j: i32,
    /// `None` when the band is above the grid's Nyquist frequency.
    pub norm: Option<f64>,
}

/// `L^p` norms of all blocks of one function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockProfile {
    pub p: f64,
    pub blocks: Vec<BlockNorm>,
}

impl BlockProfile {
    /// `(Σ 2^{2js} ‖block_j‖²)^{1/2}` and the edge-block tail indicator.
    pub fn norm(&self, s: f64) -> (f64, f64) {
        let terms: Vec<f64> =
            self.blocks.iter().filter_map(|b| b.norm.map(|v| (2f64.powf(b.j as f64 * s) * v).powi(2))).collect();
        let total = terms.iter().sum::<f64>().sqrt();
        let tail = match (terms.first(), terms.last()) {
            (Some(a), Some(b)) if terms.len() > 1 => (a + b).sqrt(),
            (Some(a), _) => a.sqrt(),
            _ => 0.0,
        };
        (total, tail)
    }
}

pub fn block_profiles(
    fs: &[Vec<C64>],
    p: f64,
    j_min: i32,
    j_max: i32,
    which: Which,
    ctx: &BlockContext,
) -> Result<Vec<BlockProfile>> {
    for f in fs {
        check_decay(f)?;
    }
    let mut out: Vec<BlockProfile> = fs.iter().map(|_| BlockProfile { p, blocks: Vec::new() }).collect();
    for j in j_min..=j_max {
        if !ctx.resolvable(j) {
            for o in out.iter_mut() {
                o.blocks.push(BlockNorm { j, norm: None });
            }
            continue;
        }
        let blocks = ctx.apply(fs, j, which)?;
        for (o, b) in out.iter_mut().zip(&blocks) {
            o.blocks.push(BlockNorm { j, norm: Some(lp_norm(b, p, ctx.grid())) });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BesovNorm {
    pub norm: f64,
    pub tail: f64,
    pub profile: BlockProfile,
}

pub fn besov_norm(f: &[C64], params: &BesovParams, which: Which, ctx: &BlockContext) -> Result<BesovNorm> {
    let profile = block_profiles(&[f.to_vec()], params.p, params.j_min, params.j_max, which, ctx)?.pop().unwrap();
    let (norm, tail) = profile.norm(params.s);
    Ok(BesovNorm { norm, tail, profile })
}

/// Free and perturbed norms of one function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BesovReport {
    pub s: f64,
    pub p: f64,
    pub free: BlockProfile,
    pub perturbed: BlockProfile,
    pub norm_free: f64,
    pub norm_perturbed: f64,
    pub ratio: Option<f64>,
    pub tail_free: f64,
    pub tail_perturbed: f64,
}

impl BesovReport {
    pub fn build(s: f64, free: &BlockProfile, perturbed: &BlockProfile) -> Self {
        let (nf, tf) = free.norm(s);
        let (np, tp) = perturbed.norm(s);
        let ratio = (nf > NORM_FLOOR && np > NORM_FLOOR).then(|| np / nf);
        Self {
            s,
            p: free.p,
            free: free.clone(),
            perturbed: perturbed.clone(),
            norm_free: nf,
            norm_perturbed: np,
            ratio,
            tail_free: tf,
            tail_perturbed: tp,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub s: f64,
    pub p: f64,
    pub ratios: Vec<f64>,
    /// `max ratio / min ratio` over the suite.
    pub constant: f64,
    pub reports: Vec<BesovReport>,
}

/// Block norms of a suite for both families, reusable across `s`.
pub struct EquivalenceTable {
    pub p: f64,
    pub free: Vec<BlockProfile>,
    pub perturbed: Vec<BlockProfile>,
}

impl EquivalenceTable {
    pub fn report(&self, s: f64) -> Result<EquivalenceReport> {
        let reports: Vec<BesovReport> =
            self.free.iter().zip(&self.perturbed).map(|(a, b)| BesovReport::build(s, a, b)).collect();
        let ratios: Vec<f64> = reports.iter().filter_map(|r| r.ratio).collect();
        if ratios.is_empty() {
            return Err(Error::DegenerateFit("every function in the suite has vanishing norm".into()));
        }
        let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        Ok(EquivalenceReport { s, p: self.p, ratios, constant: hi / lo, reports })
    }
}

/// Checks the hypotheses of the equivalence theorem for `(V, p, s)`.
pub fn check_equivalence_hypotheses(pot: &Potential, solver: &JostSolver, params: &BesovParams) -> Result<()> {
    params.check_equivalence()?;
    if pot.is_zero() {
        return Ok(());
    }
    let verdict = detect_resonance_with(solver, &DEFAULT_TAU_SEQ)?.verdict;
    if verdict == Verdict::Resonant {
        return Err(Error::Hypothesis(
            "zero is a resonance (T(0) != 0); the equivalence requires a non-resonant origin".into(),
        ));
    }
    if !pot.is_nonnegative() {
        return Err(Error::Hypothesis(
            "the point spectrum must be empty; only nonnegative potentials are accepted".into(),
        ));
    }
    if pot.gamma() <= 1.0 + 1.0 / params.p {
        return Err(Error::Hypothesis(format!(
            "decay exponent gamma={} must exceed 1 + 1/p = {}",
            pot.gamma(),
            1.0 + 1.0 / params.p
        )));
    }
    Ok(())
}

pub fn equivalence_table(suite: &[Vec<f64>], params: &BesovParams, pot: &Potential, ctx: &BlockContext) -> Result<EquivalenceTable> {
    let solver = ctx.solver().ok_or(Error::MissingKernel(params.j_min))?;
    check_equivalence_hypotheses(pot, solver, params)?;
    let fs: Vec<Vec<C64>> = suite.iter().map(|f| to_complex(f)).collect();
    let free = block_profiles(&fs, params.p, params.j_min, params.j_max, Which::Free, ctx)?;
    let perturbed = block_profiles(&fs, params.p, params.j_min, params.j_max, Which::Perturbed, ctx)?;
    Ok(EquivalenceTable { p: params.p, free, perturbed })
}

/// Per-function ratio `‖f‖_{B(H)} / ‖f‖_{B(H₀)}` and the suite constant `max/min`.
pub fn equivalence_ratio(
    suite: &[Vec<f64>],
    params: &BesovParams,
    pot: &Potential,
    grid: &SpatialGrid,
    opts: SolverOptions,
) -> Result<EquivalenceReport> {
    let ctx = BlockContext::new(pot, grid, opts)?;
    equivalence_table(suite, params, pot, &ctx)?.report(params.s)
}

/// Six decaying test functions: Gaussians, modulated Gaussians and shifted bumps.
pub fn test_suite(g: &SpatialGrid) -> Vec<Vec<f64>> {
    let gauss = |x: f64, c: f64, w: f64| (-((x - c) / w).powi(2) / 2.0).exp();
    let fns: [Box<dyn Fn(f64) -> f64>; 6] = [
        Box::new(move |x| gauss(x, 0.0, 1.0)),
        Box::new(move |x| gauss(x, 0.0, 3.0)),
        Box::new(move |x| gauss(x, 0.0, 1.0) * (3.0 * x).cos()),
        Box::new(move |x| gauss(x, 2.0, 1.0) * (1.5 * x).cos()),
        Box::new(move |x| gauss(x, 5.0, 1.0)),
        Box::new(move |x| gauss(x, -8.0, 2.0)),
    ];
    fns.iter().map(|f| g.nodes().iter().map(|&x| f(x)).collect()).collect()
}

/// `n` probes: half band-limited to `band` (sums of modulated Gaussians), half
/// translated bumps. Drawn from ChaCha8 seeded with `seed`.
pub fn make_probes(g: &SpatialGrid, n: usize, seed: u64, band: (f64, f64)) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = g.nodes();
    let reach = 0.25 * g.x_max().min(-g.x_min());
    (0..n)
        .map(|k| {
            if k % 2 == 0 {
                // envelope wide enough that its spectrum stays inside the band
                let mut f = vec![0.0; xs.len()];
                let width_min = (8.0 / (band.1 - band.0)).max(0.5);
                for _ in 0..4 {
                    let w = rng.random_range(width_min..2.0 * width_min).min(reach / 3.0);
                    let c = rng.random_range(-reach..reach);
                    let om = rng.random_range(band.0 + 2.0 / w..(band.1 - 2.0 / w).max(band.0 + 2.0 / w + 1e-9));
                    let ph = rng.random_range(0.0..std::f64::consts::TAU);
                    let a = rng.random_range(0.5..1.5);
                    for (v, &x) in f.iter_mut().zip(&xs) {
                        *v += a * (-((x - c) / w).powi(2) / 2.0).exp() * (om * x + ph).cos();
                    }
                }
                f
            } else {
                let w = rng.random_range(0.3f64..3.0).min(reach / 3.0);
                let c = rng.random_range(-reach..reach);
                xs.iter().map(|&x| (-((x - c) / w).powi(2) / 2.0).exp()).collect()
            }
        })
        .collect()
}

/// Composition order; `k` is the scale of the block applied first, `j` of the one applied last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossOrder {
    /// `φ(√H/2^j) φ(√H₀/2^k)`.
    PerturbedAfterFree,
    /// `φ(√H₀/2^j) φ(√H/2^k)`.
    FreeAfterPerturbed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossLocReport {
    pub k: i32,
    pub j: i32,
    pub order: CrossOrder,
    /// Probe-based lower bound of the operator norm on `L^p`.
    pub value: f64,
    pub annihilated: bool,
}

/// Lower bounds `max_probe ‖composite f‖_p / ‖f‖_p` for every outer scale `j` in `js`.
pub fn cross_localization_sweep(
    ctx: &BlockContext,
    k: i32,
    js: &[i32],
    p_exp: f64,
    probes: &[Vec<f64>],
    order: CrossOrder,
) -> Result<Vec<CrossLocReport>> {
    if probes.is_empty() {
        return Err(invalid("probes", "need at least one probe"));
    }
    let g = ctx.grid();
    let norms: Vec<f64> = probes.iter().map(|f| lp_norm_real(f, p_exp, g)).collect();
    if norms.iter().any(|&v| v <= NORM_FLOOR) {
        return Err(invalid("probes", "probes must be nonzero"));
    }
    let (first, second) = match order {
        CrossOrder::PerturbedAfterFree => (Which::Free, Which::Perturbed),
        CrossOrder::FreeAfterPerturbed => (Which::Perturbed, Which::Free),
    };
    let fs: Vec<Vec<C64>> = probes.iter().map(|f| to_complex(f)).collect();
    let inner = ctx.apply(&fs, k, first)?;
    js.iter()
        .map(|&j| {
            let outer = ctx.apply(&inner, j, second)?;
            let best = outer.iter().zip(&norms).map(|(o, n)| lp_norm(o, p_exp, g) / n).fold(0.0, f64::max);
            let annihilated = best <= NORM_FLOOR;
            Ok(CrossLocReport { k, j, order, value: if annihilated { 0.0 } else { best }, annihilated })
        })
        .collect()
}

pub fn cross_localization_norm(
    ctx: &BlockContext,
    k: i32,
    j: i32,
    p_exp: f64,
    probes: &[Vec<f64>],
    order: CrossOrder,
) -> Result<CrossLocReport> {
    Ok(cross_localization_sweep(ctx, k, &[j], p_exp, probes, order)?.pop().unwrap())
}

/// Single-block probe ratio `max ‖φ(√H/M) f‖_p / ‖f‖_p`.
pub fn block_probe_ratio(ctx: &BlockContext, j: i32, p_exp: f64, probes: &[Vec<f64>]) -> Result<f64> {
    let g = ctx.grid();
    let fs: Vec<Vec<C64>> = probes.iter().map(|f| to_complex(f)).collect();
    let out = ctx.apply(&fs, j, Which::Perturbed)?;
    Ok(out.iter().zip(probes).map(|(o, f)| lp_norm(o, p_exp, g) / lp_norm_real(f, p_exp, g)).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(BesovParams::new(-0.1, 2.0, 0, 1).is_err());
        assert!(BesovParams::new(0.1, 1.0, 0, 1).is_err());
        assert!(BesovParams::new(0.1, 2.0, 2, 1).is_err());
        assert!(matches!(BesovParams::new(0.5, 2.0, 0, 1).unwrap().check_equivalence(), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let g = SpatialGrid::new(-10.0, 10.0, 129).unwrap();
        let ctx = BlockContext::free(&g);
        let b = besov_norm(&vec![C64::new(0.0, 0.0); 129], &BesovParams::new(0.2, 2.0, -3, 2).unwrap(), Which::Free, &ctx)
            .unwrap();
        assert_eq!(b.norm, 0.0);
    }

    #[test]
    fn non_decaying_is_rejected() {
        let g = SpatialGrid::new(-10.0, 10.0, 129).unwrap();
        let ctx = BlockContext::free(&g);
        let f = vec![C64::new(1.0, 0.0); 129];
        let r = besov_norm(&f, &BesovParams::new(0.2, 2.0, -3, 2).unwrap(), Which::Free, &ctx);
        assert!(matches!(r, Err(Error::NonDecaying { .. })));
    }

    #[test]
    fn missing_kernel() {
        let g = SpatialGrid::new(-10.0, 10.0, 129).unwrap();
        let ctx = BlockContext::free(&g);
        let f = vec![C64::new(0.0, 0.0); 129];
        assert!(matches!(lp_block_apply(&f, 0, Which::Perturbed, &ctx), Err(Error::MissingKernel(0))));
    }

    #[test]
    fn probes_are_reproducible() {
        let g = SpatialGrid::new(-20.0, 20.0, 257).unwrap();
        let a = make_probes(&g, 6, 7, (8.0, 32.0));
        let b = make_probes(&g, 6, 7, (8.0, 32.0));
        assert_eq!(a, b);
        assert_ne!(a, make_probes(&g, 6, 8, (8.0, 32.0)));
        for f in &a {
            assert!(f[0].abs() < 1e-10 && f[256].abs() < 1e-10);
        }
    }
}
