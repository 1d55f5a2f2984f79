//! Jost modifiers `m±(x, τ)` and their τ-derivatives.
//!
//! `m₊` solves `m(x) = 1 + ∫_x^∞ D(t-x, τ) V(t) m(t) dt`. Equivalently
//! `f = e^{iτx} m` solves `f'' = (V - τ²) f` with `f = e^{iτx}` right of the
//! support, which is what we integrate: a fourth-order Magnus scheme with two
//! Gauss nodes per step, exact wherever `V` is constant on a step. `m₋` is
//! `m₊` of the mirrored potential read at `-x`.

use crate::error::{invalid, Error, Result};
use crate::gronwall::gronwall_bound;
use crate::grid::{neg, pos, FrequencyGrid, SpatialGrid};
use crate::potential::Potential;
use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6
const COMMUTATOR: f64 = 0.144_337_567_297_406_43; // sqrt(3)/12

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
    pub fn label(self) -> &'static str {
        match self {
            Side::Plus => "+",
            Side::Minus => "-",
        }
    }
}

/// `D(t, τ) = (e^{2itτ} - 1)/(2iτ)`, equal to `t` at `τ = 0`.
pub fn kernel_d(t: f64, tau: f64) -> C64 {
    let u = t * tau;
    if u.abs() < 1e-4 {
        // t * e^{iu} sin(u)/u, series for sin(u)/u
        let sinc = 1.0 - u * u / 6.0 + u.powi(4) / 120.0;
        return C64::from_polar(t * sinc, u);
    }
    (C64::from_polar(1.0, 2.0 * u) - 1.0) / (2.0 * I * tau)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Largest Magnus step inside the support of `V`.
    pub max_step: f64,
    /// Bound on the step-doubling defect at every node.
    pub tol: f64,
    /// How many times the step may be halved before giving up.
    pub max_refinements: u32,
    /// Check every column against the Gronwall envelope.
    pub certify: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_step: 0.01, tol: 1e-8, max_refinements: 4, certify: true }
    }
}

#[derive(Clone, Copy, Debug)]
struct Step {
    len: f64,
    z_end: f64,
    v1: f64,
    v2: f64,
    free: bool,
    record: Option<usize>,
    far: bool,
}

/// Step sequence in the oriented frame `z = ±x`, integrating from the top of the support down.
#[derive(Clone, Debug)]
struct Plan {
    start: f64,
    steps: Vec<Step>,
    /// Nodes at or beyond the start, where `m = 1`.
    above: Vec<usize>,
    empty: bool,
}

fn build_plan(v: &Potential, z: &[(f64, usize)], max_step: f64) -> Plan {
    let Some((lo, hi)) = v.support() else {
        return Plan { start: f64::INFINITY, steps: Vec::new(), above: z.iter().map(|p| p.1).collect(), empty: true };
    };
    #[derive(Clone, Copy)]
    enum Ev {
        Node(usize),
        Break,
        Far,
    }
    let mut events: Vec<(f64, Ev)> = z.iter().filter(|p| p.0 < hi).map(|&(zz, i)| (zz, Ev::Node(i))).collect();
    let above = z.iter().filter(|p| p.0 >= hi).map(|p| p.1).collect();
    for b in v.breakpoints() {
        if b > lo && b < hi {
            events.push((b, Ev::Break));
        }
    }
    events.push((lo, Ev::Far));
    events.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut steps = Vec::with_capacity(events.len() * 2);
    let mut cur = hi;
    for (ze, ev) in events {
        let total = ze - cur;
        let free = cur <= lo;
        let n_sub = if free || total == 0.0 { 1 } else { ((-total) / max_step).ceil().max(1.0) as usize };
        let len = total / n_sub as f64;
        for k in 0..n_sub {
            let a = cur + k as f64 * len;
            let last = k + 1 == n_sub;
            let (v1, v2) = if free {
                (0.0, 0.0)
            } else {
                (v.eval(a + (0.5 - GAUSS_OFFSET) * len), v.eval(a + (0.5 + GAUSS_OFFSET) * len))
            };
            steps.push(Step {
                len,
                z_end: if last { ze } else { a + len },
                v1,
                v2,
                free,
                record: match (last, ev) {
                    (true, Ev::Node(i)) => Some(i),
                    _ => None,
                },
                far: last && matches!(ev, Ev::Far),
            });
        }
        cur = ze;
    }
    Plan { start: hi, steps, above, empty: false }
}

/// `C = cosh√δ`, `S = sinh√δ/√δ`, `S' = dS/dδ`, analytically continued to `δ < 0`.
#[inline]
fn cs(delta: f64) -> (f64, f64, f64) {
    if delta.abs() < 1e-2 {
        let d = delta;
        let c = 1.0 + d * (0.5 + d * (1.0 / 24.0 + d * (1.0 / 720.0 + d * (1.0 / 40320.0 + d / 3628800.0))));
        let s = 1.0 + d * (1.0 / 6.0 + d * (1.0 / 120.0 + d * (1.0 / 5040.0 + d * (1.0 / 362880.0 + d / 39916800.0))));
        let sp = 1.0 / 6.0 + d * (1.0 / 60.0 + d * (1.0 / 1680.0 + d * (1.0 / 90720.0 + d / 7983360.0)));
        (c, s, sp)
    } else {
        let (c, s) = if delta > 0.0 {
            let r = delta.sqrt();
            (r.cosh(), r.sinh() / r)
        } else {
            let r = (-delta).sqrt();
            (r.cos(), r.sin() / r)
        };
        (c, s, (c - s) / (2.0 * delta))
    }
}

/// Propagator `exp(Ω)` and its τ-derivative for one step.
#[inline]
fn propagator(step: &Step, tau: f64) -> ([f64; 4], [f64; 4]) {
    let h = step.len;
    let t2 = tau * tau;
    let q1 = step.v1 - t2;
    let q2 = step.v2 - t2;
    let qb = 0.5 * (q1 + q2);
    let c = COMMUTATOR * h * h * (q1 - q2);
    let delta = c * c + h * h * qb;
    let (cc, s, sp) = cs(delta);
    let p = [cc + s * c, s * h, s * h * qb, cc - s * c];
    let dd = -2.0 * tau * h * h;
    let dc = 0.5 * s * dd;
    let ds = sp * dd;
    let dp = [dc + ds * c, ds * h, ds * h * qb - 2.0 * s * tau * h, dc - ds * c];
    (p, dp)
}

struct RunOut {
    integral: C64,
    phase_integral: C64,
}

fn run(plan: &Plan, tau: f64, m: &mut [C64], mut dm: Option<&mut [C64]>) -> RunOut {
    for &i in &plan.above {
        m[i] = C64::new(1.0, 0.0);
        if let Some(d) = dm.as_deref_mut() {
            d[i] = C64::new(0.0, 0.0);
        }
    }
    if plan.empty {
        return RunOut { integral: C64::new(0.0, 0.0), phase_integral: C64::new(0.0, 0.0) };
    }
    let z0 = plan.start;
    let e0 = C64::from_polar(1.0, tau * z0);
    let mut f = e0;
    let mut fp = I * tau * e0;
    let mut ft = I * z0 * e0;
    let mut fpt = I * e0 - tau * z0 * e0;
    let want = dm.is_some();
    let mut cache: Option<(f64, [f64; 4], [f64; 4])> = None;
    let mut out = RunOut { integral: C64::new(0.0, 0.0), phase_integral: C64::new(0.0, 0.0) };
    for st in &plan.steps {
        let (p, dp) = if st.free {
            match cache {
                Some((len, p, dp)) if len == st.len => (p, dp),
                _ => {
                    let r = propagator(st, tau);
                    cache = Some((st.len, r.0, r.1));
                    r
                }
            }
        } else {
            propagator(st, tau)
        };
        let nf = p[0] * f + p[1] * fp;
        let nfp = p[2] * f + p[3] * fp;
        if want {
            let nft = p[0] * ft + p[1] * fpt + dp[0] * f + dp[1] * fp;
            let nfpt = p[2] * ft + p[3] * fpt + dp[2] * f + dp[3] * fp;
            ft = nft;
            fpt = nfpt;
        }
        f = nf;
        fp = nfp;
        if st.record.is_some() || st.far {
            let z = st.z_end;
            let ph = C64::from_polar(1.0, -tau * z);
            if let Some(i) = st.record {
                m[i] = ph * f;
                if let Some(d) = dm.as_deref_mut() {
                    d[i] = ph * (ft - I * z * f);
                }
            }
            if st.far {
                let mm = ph * f;
                let mp = ph * (fp - I * tau * f);
                out.integral = -mp - 2.0 * I * tau * (mm - 1.0);
                out.phase_integral = -C64::from_polar(1.0, 2.0 * tau * z) * mp;
            }
        }
    }
    out
}

/// One solved column `m(·, τ)` on the grid nodes.
#[derive(Clone, Debug)]
pub struct JostColumn {
    pub tau: f64,
    pub side: Side,
    pub m: Vec<C64>,
    /// `∂_τ m`, when requested.
    pub dm: Option<Vec<C64>>,
    /// `∫ V m± dt`.
    pub integral: C64,
    /// `∫ e^{±2iτt} V(t) m±(t) dt` (upper sign for `m₊`).
    pub phase_integral: C64,
    /// Step-doubling defect per node (empty when not computed).
    pub residual: Vec<f64>,
}

impl JostColumn {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }
}

struct Envelope {
    /// Gronwall bound of `|m - 1|` at each node, τ-independent part.
    uniform: Vec<f64>,
    /// `∫_z^∞ |V|` in the oriented frame at each node.
    tail_l1: Vec<f64>,
}

/// Reusable solver for one potential on one grid.
pub struct JostSolver {
    grid: SpatialGrid,
    potential: Potential,
    opts: SolverOptions,
    oriented: [Potential; 2],
    coords: [Vec<(f64, usize)>; 2],
    plans: [Vec<Plan>; 2],
    envelope: [Envelope; 2],
}

const REFINE_CACHE: usize = 2;

impl JostSolver {
    pub fn new(potential: &Potential, grid: &SpatialGrid, opts: SolverOptions) -> Result<Self> {
        if !(opts.max_step > 0.0 && opts.max_step.is_finite()) {
            return Err(invalid("max_step", format!("must be positive, got {}", opts.max_step)));
        }
        if !(opts.tol > 0.0) {
            return Err(invalid("tol", format!("must be positive, got {}", opts.tol)));
        }
        let l1 = crate::potential::weighted_l1_norm(potential, 1.0, grid)?;
        if !l1.is_finite() {
            return Err(Error::NonFinite("weighted L1 norm".into()));
        }
        let oriented = [potential.clone(), potential.reflected()];
        let plus: Vec<(f64, usize)> = (0..grid.len()).map(|i| (grid.x(i), i)).collect();
        let minus: Vec<(f64, usize)> = (0..grid.len()).map(|i| (-grid.x(i), i)).collect();
        let coords = [plus, minus];
        let plans = [0, 1].map(|s| {
            (0..REFINE_CACHE)
                .map(|l| build_plan(&oriented[s], &coords[s], opts.max_step / (1u32 << l) as f64))
                .collect::<Vec<_>>()
        });
        let envelope = [envelope(&oriented[0], &coords[0], grid)?, envelope(&oriented[1], &coords[1], grid)?];
        Ok(Self { grid: grid.clone(), potential: potential.clone(), opts, oriented, coords, plans, envelope })
    }

    pub fn with_defaults(potential: &Potential, grid: &SpatialGrid) -> Result<Self> {
        Self::new(potential, grid, SolverOptions::default())
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }
    pub fn potential(&self) -> &Potential {
        &self.potential
    }
    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    fn idx(side: Side) -> usize {
        match side {
            Side::Plus => 0,
            Side::Minus => 1,
        }
    }

    fn plan(&self, side: Side, level: usize) -> std::borrow::Cow<'_, Plan> {
        let s = Self::idx(side);
        match self.plans[s].get(level) {
            Some(p) => std::borrow::Cow::Borrowed(p),
            None => std::borrow::Cow::Owned(build_plan(
                &self.oriented[s],
                &self.coords[s],
                self.opts.max_step / (1u64 << level) as f64,
            )),
        }
    }

    /// Column at the base step, no defect estimate or certification.
    pub fn column(&self, tau: f64, side: Side, with_derivative: bool) -> JostColumn {
        self.column_at(tau, side, with_derivative, 0)
    }

    fn column_at(&self, tau: f64, side: Side, with_derivative: bool, level: usize) -> JostColumn {
        let n = self.grid.len();
        let mut m = vec![C64::new(0.0, 0.0); n];
        let mut dm = with_derivative.then(|| vec![C64::new(0.0, 0.0); n]);
        let plan = self.plan(side, level);
        let out = run(&plan, tau, &mut m, dm.as_deref_mut());
        JostColumn {
            tau,
            side,
            m,
            dm,
            integral: out.integral,
            phase_integral: out.phase_integral,
            residual: Vec::new(),
        }
    }

    /// Column with step-doubling defect `≤ tol` at every node and Gronwall certification.
    pub fn solve(&self, tau: f64, side: Side, with_derivative: bool) -> Result<JostColumn> {
        if !tau.is_finite() {
            return Err(Error::NonFinite(format!("tau={tau}")));
        }
        let mut coarse = self.column_at(tau, side, with_derivative, 0);
        let mut level = 0usize;
        loop {
            let fine = self.column_at(tau, side, with_derivative, level + 1);
            let residual: Vec<f64> = coarse.m.iter().zip(&fine.m).map(|(a, b)| (a - b).norm()).collect();
            let worst = residual.iter().copied().fold(0.0, f64::max);
            let mut col = fine;
            col.residual = residual;
            if worst <= self.opts.tol {
                if self.opts.certify {
                    self.certify(&col)?;
                }
                return Ok(col);
            }
            if level as u32 >= self.opts.max_refinements {
                return Err(Error::SolverDivergence { tau, residual: worst, tolerance: self.opts.tol });
            }
            coarse = col;
            level += 1;
        }
    }

    /// Gronwall envelope of `|m - 1|` at every node for this τ.
    pub fn envelope(&self, tau: f64, side: Side) -> Vec<f64> {
        let env = &self.envelope[Self::idx(side)];
        env.uniform
            .iter()
            .zip(&env.tail_l1)
            .map(|(&u, &t)| {
                if tau == 0.0 {
                    u
                } else {
                    let a = t / tau.abs();
                    u.min(a * a.exp())
                }
            })
            .collect()
    }

    pub fn certify(&self, col: &JostColumn) -> Result<()> {
        let env = self.envelope(col.tau, col.side);
        for (i, (m, b)) in col.m.iter().zip(&env).enumerate() {
            let v = (m - 1.0).norm();
            if !v.is_finite() || v > 1.05 * b + 1e-10 {
                return Err(Error::GronwallViolation { tau: col.tau, x: self.grid.x(i), value: v, bound: *b });
            }
        }
        Ok(())
    }
}

/// Gronwall envelope of the oriented problem, sampled at the grid nodes.
fn envelope(v: &Potential, coords: &[(f64, usize)], grid: &SpatialGrid) -> Result<Envelope> {
    let n = coords.len();
    let Some((lo, hi)) = v.support() else {
        return Ok(Envelope { uniform: vec![0.0; n], tail_l1: vec![0.0; n] });
    };
    let zmin = coords.iter().map(|c| c.0).fold(lo, f64::min);
    let span = hi - zmin;
    let step = grid.h().min(0.01).max(span / 200_000.0);
    let m = ((span / step).ceil() as usize + 1).max(3);
    let lo_pad = zmin - 1.0;
    let aux = SpatialGrid::new(lo_pad.min(-1e-9), (hi + 1.0).max(1e-9), m)?;
    let zs = aux.nodes();
    let absv: Vec<f64> = zs.iter().map(|&z| v.eval(z).abs()).collect();
    // a(z) = ∫_z^∞ (1 + t₊)|V|, b(t) = (1 + |t|)|V|
    let wa: Vec<f64> = zs.iter().zip(&absv).map(|(&z, &a)| (1.0 + pos(z)) * a).collect();
    let a = crate::gronwall::tail_integral(&wa, aux.h());
    let b: Vec<f64> = zs.iter().zip(&absv).map(|(&z, &a)| (1.0 + z.abs()) * a).collect();
    let u = gronwall_bound(&a, &b, &aux)?;
    let l1 = crate::gronwall::tail_integral(&absv, aux.h());
    let mut uniform = vec![0.0; n];
    let mut tail_l1 = vec![0.0; n];
    for &(z, i) in coords {
        if z >= hi {
            continue;
        }
        let k = (((z - aux.x_min()) / aux.h()).floor().max(0.0) as usize).min(m - 1);
        uniform[i] = (1.0 + neg(z)) * u[k];
        tail_l1[i] = l1[k];
    }
    Ok(Envelope { uniform, tail_l1 })
}

/// `m(·, τ)` on the grid nodes.
pub fn solve_jost(p: &Potential, g: &SpatialGrid, tau: f64, side: Side) -> Result<Vec<C64>> {
    Ok(JostSolver::with_defaults(p, g)?.solve(tau, side, false)?.m)
}

/// `∂_τ m(·, τ)` on the grid nodes; only `k = 1` is supported.
pub fn jost_derivative(p: &Potential, g: &SpatialGrid, tau: f64, side: Side, k: u32) -> Result<Vec<C64>> {
    if k != 1 {
        return Err(invalid("k", format!("only first derivatives are supported, got {k}")));
    }
    Ok(JostSolver::with_defaults(p, g)?.solve(tau, side, true)?.dm.unwrap())
}

/// `m±` on a space × frequency grid.
#[derive(Clone, Debug)]
pub struct JostField {
    grid: SpatialGrid,
    freq: FrequencyGrid,
    /// Indexed `(τ, x)` internally.
    m_plus: Array2<C64>,
    m_minus: Array2<C64>,
    residual: Array2<f64>,
    integral_plus: Vec<C64>,
    integral_minus: Vec<C64>,
    phase_plus: Vec<C64>,
    phase_minus: Vec<C64>,
}

impl JostField {
    /// Solves every τ of `freq`; with `checked`, each column goes through [`JostSolver::solve`].
    pub fn compute(solver: &JostSolver, freq: &FrequencyGrid, checked: bool) -> Result<Self> {
        let n = solver.grid().len();
        let cols: Vec<Result<(JostColumn, JostColumn)>> = freq
            .taus()
            .par_iter()
            .map(|&tau| {
                if checked {
                    Ok((solver.solve(tau, Side::Plus, false)?, solver.solve(tau, Side::Minus, false)?))
                } else {
                    Ok((solver.column(tau, Side::Plus, false), solver.column(tau, Side::Minus, false)))
                }
            })
            .collect();
        let nt = freq.len();
        let mut m_plus = Array2::zeros((nt, n));
        let mut m_minus = Array2::zeros((nt, n));
        let mut residual = Array2::zeros((nt, n));
        let mut integral_plus = Vec::with_capacity(nt);
        let mut integral_minus = Vec::with_capacity(nt);
        let mut phase_plus = Vec::with_capacity(nt);
        let mut phase_minus = Vec::with_capacity(nt);
        for (k, c) in cols.into_iter().enumerate() {
            let (p, q) = c?;
            for i in 0..n {
                m_plus[[k, i]] = p.m[i];
                m_minus[[k, i]] = q.m[i];
                if checked {
                    residual[[k, i]] = p.residual[i].max(q.residual[i]);
                }
            }
            integral_plus.push(p.integral);
            integral_minus.push(q.integral);
            phase_plus.push(p.phase_integral);
            phase_minus.push(q.phase_integral);
        }
        Ok(Self {
            grid: solver.grid().clone(),
            freq: freq.clone(),
            m_plus,
            m_minus,
            residual,
            integral_plus,
            integral_minus,
            phase_plus,
            phase_minus,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }
    pub fn freq(&self) -> &FrequencyGrid {
        &self.freq
    }

    /// `m±(x_ix, τ_it)`.
    pub fn m(&self, side: Side, ix: usize, it: usize) -> C64 {
        match side {
            Side::Plus => self.m_plus[[it, ix]],
            Side::Minus => self.m_minus[[it, ix]],
        }
    }

    /// `f±(x, τ) = e^{±iτx} m±(x, τ)`.
    pub fn f(&self, side: Side, ix: usize, it: usize) -> C64 {
        let phase = side.sign() * self.freq.taus()[it] * self.grid.x(ix);
        C64::from_polar(1.0, phase) * self.m(side, ix, it)
    }

    /// Rows indexed by τ.
    pub fn table(&self, side: Side) -> &Array2<C64> {
        match side {
            Side::Plus => &self.m_plus,
            Side::Minus => &self.m_minus,
        }
    }

    /// `m± - 1`, indexed `(τ, x)`.
    pub fn remainder(&self, side: Side) -> Array2<C64> {
        self.table(side).mapv(|v| v - 1.0)
    }

    pub fn residual(&self) -> &Array2<f64> {
        &self.residual
    }

    pub fn integral(&self, side: Side, it: usize) -> C64 {
        match side {
            Side::Plus => self.integral_plus[it],
            Side::Minus => self.integral_minus[it],
        }
    }

    pub fn phase_integral(&self, side: Side, it: usize) -> C64 {
        match side {
            Side::Plus => self.phase_plus[it],
            Side::Minus => self.phase_minus[it],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_d_limits() {
        assert_eq!(kernel_d(2.5, 0.0), C64::new(2.5, 0.0));
        assert_eq!(kernel_d(0.0, 3.0), C64::new(0.0, 0.0));
        assert!(kernel_d(1.0, std::f64::consts::PI).norm() < 1e-15);
        let a = kernel_d(1.0, 1e-5);
        let b = kernel_d(1.0, 1e-3);
        assert!((a - C64::new(1.0, 1e-5)).norm() < 1e-9);
        let direct = (C64::from_polar(1.0, 2e-3) - 1.0) / (2.0 * I * 1e-3);
        assert!((b - direct).norm() < 1e-12);
    }

    #[test]
    fn series_branch_is_continuous() {
        for &d in &[-1.0001e-2, -0.99999e-2, 0.99999e-2, 1.0001e-2] {
            let (c, s, sp) = cs(d);
            let r = (d as f64).abs().sqrt();
            let (c0, s0) = if d > 0.0 { (r.cosh(), r.sinh() / r) } else { (r.cos(), r.sin() / r) };
            assert!((c - c0).abs() < 1e-15 && (s - s0).abs() < 1e-15);
            let h = 1e-6;
            let fd = (cs(d + h).1 - cs(d - h).1) / (2.0 * h);
            assert!((sp - fd).abs() < 1e-8, "{sp} {fd}");
        }
    }

    #[test]
    fn free_case_is_exactly_one() {
        let g = SpatialGrid::new(-5.0, 5.0, 101).unwrap();
        let s = JostSolver::with_defaults(&Potential::zero(), &g).unwrap();
        let c = s.solve(2.0, Side::Plus, true).unwrap();
        assert!(c.m.iter().all(|&v| v == C64::new(1.0, 0.0)));
        assert!(c.dm.unwrap().iter().all(|&v| v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn one_beyond_support() {
        let g = SpatialGrid::new(-5.0, 5.0, 101).unwrap();
        let s = JostSolver::with_defaults(&Potential::square_barrier(1.0, 1.0), &g).unwrap();
        let p = s.solve(1.3, Side::Plus, false).unwrap();
        let q = s.solve(1.3, Side::Minus, false).unwrap();
        for i in 0..g.len() {
            if g.x(i) >= 1.0 {
                assert_eq!(p.m[i], C64::new(1.0, 0.0));
            }
            if g.x(i) <= -1.0 {
                assert_eq!(q.m[i], C64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn divergence_is_reported() {
        let g = SpatialGrid::new(-10.0, 10.0, 201).unwrap();
        let opts = SolverOptions { tol: 1e-30, max_refinements: 1, ..Default::default() };
        let s = JostSolver::new(&Potential::gaussian(2.0, 1.0), &g, opts).unwrap();
        assert!(matches!(s.solve(1.0, Side::Plus, false), Err(Error::SolverDivergence { .. })));
    }

    #[test]
    fn certification_rejects_bad_column() {
        let g = SpatialGrid::new(-5.0, 5.0, 51).unwrap();
        let s = JostSolver::with_defaults(&Potential::square_barrier(1.0, 1.0), &g).unwrap();
        let mut c = s.solve(1.0, Side::Plus, false).unwrap();
        s.certify(&c).unwrap();
        c.m[10] += 1e3;
        assert!(matches!(s.certify(&c), Err(Error::GronwallViolation { .. })));
    }
}
