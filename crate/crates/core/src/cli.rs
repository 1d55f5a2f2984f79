//! Command dispatch and artifact emission.

use crate::besov::{
    cross_localization_sweep, equivalence_table, make_probes, test_suite, BesovParams, BlockContext, CrossOrder,
};
use crate::config::{Command, RunConfig};
use crate::counterexample::scaling_report;
use crate::error::{Error, Result};
use crate::estimates::verify_jost_estimates_refined;
use crate::grid::FrequencyGrid;
use crate::io::{write_csv, write_jost_dump, write_json, write_kernel_dump, Metadata};
use crate::jost::{JostField, JostSolver};
use crate::kernels::{assemble_kernels, verify_kernel_estimate, EstimateMode, CALIBRATION};
use crate::scattering::{detect_resonance_with, ScatteringData, Verdict};
use crate::suite::{decay_exponent, run_all};
use clap::Parser;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "jost-besov", version, about = "Scattering data, Littlewood-Paley kernels and Besov norms for 1D Schrödinger operators")]
pub struct Cli {
    /// Overrides `command` from the config.
    #[arg(value_enum)]
    pub command: Option<Command>,
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Jost solver tolerance.
    #[arg(long, value_name = "FLOAT")]
    pub tol: Option<f64>,
    #[arg(long, value_name = "N")]
    pub grid_points: Option<usize>,
}

impl Cli {
    /// Config file merged with the command-line overrides, validated.
    pub fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(cmd) = self.command {
            c.command = Some(cmd);
        }
        if let Some(o) = &self.out {
            c.out = Some(o.clone());
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(t) = self.tol {
            c.tolerances.solver = t;
        }
        if let Some(n) = self.grid_points {
            c.grid.points = n;
        }
        if c.command.is_none() {
            return Err(crate::error::invalid("command", "no command given on the command line or in the config"));
        }
        c.validate()?;
        Ok(c)
    }
}

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis(_) => EXIT_HYPOTHESIS,
        Error::InvalidGrid(_)
        | Error::InvalidParameter { .. }
        | Error::Config(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_)
        | Error::NonDecaying { .. }
        | Error::InsufficientSamples { .. } => EXIT_INVALID,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub command: Command,
    pub files: Vec<PathBuf>,
    /// False only when verify-all has a failing check.
    pub passed: bool,
}

struct Emitter<'a> {
    cfg: &'a RunConfig,
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Emitter<'_> {
    fn meta(&self) -> Result<Metadata> {
        Ok(Metadata {
            command: self.cfg.command.map(Command::name).unwrap_or_default().to_string(),
            config_sha256: self.cfg.sha256(),
            calibration: CALIBRATION,
            grid: Some(self.cfg.spatial_grid()?),
            seed: self.cfg.seed,
            extra: vec![("potential".into(), self.cfg.potential()?.name())],
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let meta = self.meta()?;
        let p = self.path(name);
        write_csv(&p, &meta, rows)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let body = json!({
            "command": self.cfg.command.map(Command::name),
            "config_sha256": self.cfg.sha256(),
            "calibration": CALIBRATION,
            "grid": self.cfg.spatial_grid()?,
            "seed": self.cfg.seed,
            "potential": self.cfg.potential()?.name(),
            "result": value,
        });
        let p = self.path(name);
        write_json(&p, &body)
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    run_with(cfg, |_| {})
}

/// `progress` receives one line per finished verify-all check.
pub fn run_with(cfg: &RunConfig, mut progress: impl FnMut(&str)) -> Result<RunOutcome> {
    let command = cfg.command.ok_or_else(|| crate::error::invalid("command", "missing"))?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)?;
    let mut em = Emitter { cfg, dir, files: Vec::new() };
    let mut passed = true;
    match command {
        Command::Scatter => scatter(&mut em)?,
        Command::Jost => jost(&mut em)?,
        Command::Kernel => kernel(&mut em)?,
        Command::Besov => besov(&mut em)?,
        Command::Crossloc => crossloc(&mut em)?,
        Command::Counterexample => counterexample(&mut em)?,
        Command::VerifyAll => {
            let checks = run_all(cfg.seed, |c| progress(&c.line()));
            passed = checks.iter().all(|c| c.passed);
            let failed: Vec<u32> = checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
            em.json("verify.json", &json!({ "passed": passed, "failed": failed, "checks": checks }))?;
        }
    }
    Ok(RunOutcome { command, files: em.files, passed })
}

#[derive(Serialize)]
struct ScatterRow {
    tau: f64,
    re_t: f64,
    im_t: f64,
    re_r_plus: f64,
    im_r_plus: f64,
    re_r_minus: f64,
    im_r_minus: f64,
}

fn scatter(em: &mut Emitter) -> Result<()> {
    let cfg = em.cfg;
    let p = cfg.potential()?;
    let solver = JostSolver::new(&p, &cfg.spatial_grid()?, cfg.solver_options())?;
    let freq = FrequencyGrid::uniform(cfg.scatter.tau_max, cfg.scatter.h_tau)?;
    let res = detect_resonance_with(&solver, &cfg.scatter.resonance_taus)?;
    let data = ScatteringData::compute(&solver, &freq)?.with_resonance(res.clone());
    let rows: Vec<ScatterRow> = (0..data.taus.len())
        .map(|k| ScatterRow {
            tau: data.taus[k],
            re_t: data.t[k].re,
            im_t: data.t[k].im,
            re_r_plus: data.r_plus[k].re,
            im_r_plus: data.r_plus[k].im,
            re_r_minus: data.r_minus[k].re,
            im_r_minus: data.r_minus[k].im,
        })
        .collect();
    em.csv("scatter.csv", &rows)?;
    em.json(
        "scatter.json",
        &json!({
            "verdict": res.verdict,
            "alpha": res.alpha,
            "unitarity_max_defect": data.unitarity_defect(cfg.scatter.h_tau * 0.5),
            "resonance": res,
        }),
    )
}

#[derive(Serialize)]
struct JostRow {
    x: f64,
    tau: f64,
    re_m_plus: f64,
    im_m_plus: f64,
    re_m_minus: f64,
    im_m_minus: f64,
}

fn jost(em: &mut Emitter) -> Result<()> {
    use crate::jost::Side;
    let cfg = em.cfg;
    let p = cfg.potential()?;
    let g = cfg.spatial_grid()?;
    let solver = JostSolver::new(&p, &g, cfg.solver_options())?;
    let freq = FrequencyGrid::uniform(cfg.jost.export_tau_max, cfg.jost.export_h_tau)?;
    let field = JostField::compute(&solver, &freq, true)?;
    let mut rows = Vec::with_capacity(g.len() * freq.len());
    for i in 0..g.len() {
        for (k, &tau) in freq.taus().iter().enumerate() {
            let (a, b) = (field.m(Side::Plus, i, k), field.m(Side::Minus, i, k));
            rows.push(JostRow { x: g.x(i), tau, re_m_plus: a.re, im_m_plus: a.im, re_m_minus: b.re, im_m_minus: b.im });
        }
    }
    em.csv("jost.csv", &rows)?;
    if cfg.jost.dump {
        let path = em.path("jost.bin");
        write_jost_dump(&path, &field)?;
    }
    let est_freq = FrequencyGrid::uniform(cfg.jost.tau_max, cfg.jost.h_tau)?;
    let reports = verify_jost_estimates_refined(&p, &g, &est_freq, p.gamma(), cfg.jost.sigma)?;
    em.csv("estimates.csv", &reports.iter().map(|r| (r.id.clone(), r.constant, r.drift)).collect::<Vec<_>>())?;
    em.json("jost.json", &json!({ "estimates": reports, "max_residual": field.residual().iter().copied().fold(0.0, f64::max) }))
}

#[derive(Serialize)]
struct KernelRow {
    scale: f64,
    estimate: String,
    constant: Option<f64>,
    symmetry_defect: f64,
    realness_defect: f64,
}

fn kernel(em: &mut Emitter) -> Result<()> {
    let cfg = em.cfg;
    let p = cfg.potential()?;
    let g = cfg.spatial_grid()?;
    let verdict = detect_resonance_with(&JostSolver::new(&p, &g, cfg.solver_options())?, &cfg.scatter.resonance_taus)?.verdict;
    let sigma = cfg.kernel.sigma;
    let mut rows = Vec::new();
    for &m in &cfg.kernel.scales {
        let b = assemble_kernels(&p, &g, m, cfg.solver_options())?;
        let (estimate, constant) = if m >= 1.0 {
            let r = verify_kernel_estimate(&b.perturbed, &b.free, p.gamma(), sigma, EstimateMode::HighEnergy)?;
            (r.id, Some(r.constant))
        } else if verdict == Verdict::NonResonant {
            let lead = b.leading.as_ref().expect("leading kernel for M <= 1");
            let r = verify_kernel_estimate(&b.perturbed, lead, p.gamma(), sigma, EstimateMode::LowEnergy(verdict))?;
            (r.id, Some(r.constant))
        } else {
            ("low_energy_remainder (skipped: resonant origin)".to_string(), None)
        };
        rows.push(KernelRow {
            scale: m,
            estimate,
            constant,
            symmetry_defect: b.perturbed.symmetry_defect(),
            realness_defect: b.perturbed.realness_defect(),
        });
        if cfg.kernel.dump {
            for k in [Some(&b.free), Some(&b.perturbed), b.leading.as_ref()].into_iter().flatten() {
                let path = em.path(&format!("kernel_M{m}_{}.bin", format!("{:?}", k.provenance).to_lowercase()));
                write_kernel_dump(&path, k)?;
            }
        }
    }
    em.csv("kernel.csv", &rows)?;
    em.json("kernel.json", &json!({ "verdict": verdict, "gamma": p.gamma(), "sigma": sigma, "rows": rows }))
}

#[derive(Serialize)]
struct BlockRow {
    function: usize,
    j: i32,
    block_norm_free: Option<f64>,
    block_norm_perturbed: Option<f64>,
}

#[derive(Serialize)]
struct ConstantRow {
    s: f64,
    constant: f64,
}

fn besov(em: &mut Emitter) -> Result<()> {
    let cfg = em.cfg;
    let p = cfg.potential()?;
    let g = cfg.spatial_grid()?;
    let b = &cfg.besov;
    let params: Vec<BesovParams> =
        b.s.iter().map(|&s| BesovParams::new(s, b.p, b.j_min, b.j_max)).collect::<Result<_>>()?;
    for q in &params {
        q.check_equivalence()?;
    }
    let ctx = BlockContext::new(&p, &g, cfg.solver_options())?;
    let table = equivalence_table(&test_suite(&g), &params[0], &p, &ctx)?;
    let mut blocks = Vec::new();
    for (f, (a, c)) in table.free.iter().zip(&table.perturbed).enumerate() {
        for (x, y) in a.blocks.iter().zip(&c.blocks) {
            blocks.push(BlockRow { function: f, j: x.j, block_norm_free: x.norm, block_norm_perturbed: y.norm });
        }
    }
    em.csv("blocks.csv", &blocks)?;
    let reports = params.iter().map(|q| table.report(q.s)).collect::<Result<Vec<_>>>()?;
    em.csv("constants.csv", &reports.iter().map(|r| ConstantRow { s: r.s, constant: r.constant }).collect::<Vec<_>>())?;
    em.json("besov.json", &json!({ "p": b.p, "j_min": b.j_min, "j_max": b.j_max, "reports": reports }))
}

#[derive(Serialize)]
struct CrossRow {
    order: CrossOrder,
    k: i32,
    j: i32,
    distance: i32,
    ratio: f64,
    annihilated: bool,
}

fn crossloc(em: &mut Emitter) -> Result<()> {
    let cfg = em.cfg;
    let c = &cfg.crossloc;
    let g = cfg.spatial_grid()?;
    let ctx = BlockContext::new(&cfg.potential()?, &g, cfg.solver_options())?;
    let probes = make_probes(&g, c.probes, cfg.seed, (c.band[0], c.band[1]));
    let mut rows = Vec::new();
    let mut exponents = serde_json::Map::new();
    for order in [CrossOrder::PerturbedAfterFree, CrossOrder::FreeAfterPerturbed] {
        let reps = cross_localization_sweep(&ctx, c.k, &c.j, c.p, &probes, order)?;
        let far: Vec<_> = reps.iter().filter(|r| (r.j - r.k).abs() >= 2).cloned().collect();
        exponents.insert(format!("{order:?}"), json!(decay_exponent(&far).ok()));
        rows.extend(reps.into_iter().map(|r| CrossRow {
            order: r.order,
            k: r.k,
            j: r.j,
            distance: (r.j - r.k).abs(),
            ratio: r.value,
            annihilated: r.annihilated,
        }));
    }
    em.csv("crossloc.csv", &rows)?;
    em.json("crossloc.json", &json!({ "k": c.k, "p": c.p, "probes": c.probes, "decay_exponent": exponents }))
}

#[derive(Serialize)]
struct CounterRow {
    n: u32,
    i0: f64,
    norm_sq: f64,
    ratio: f64,
}

fn counterexample(em: &mut Emitter) -> Result<()> {
    let rep = scaling_report(&em.cfg.counterexample.n_values)?;
    let rows: Vec<CounterRow> =
        rep.rows.iter().map(|r| CounterRow { n: r.n, i0: r.i0, norm_sq: r.norm_sq, ratio: r.ratio }).collect();
    em.csv("counterexample.csv", &rows)?;
    em.json("counterexample.json", &rep)
}

/// Parses `args`, runs, prints diagnostics, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { 0 };
        }
    };
    let cfg = match cli.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match run_with(&cfg, |line| println!("{line}")) {
        Ok(out) => {
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            if out.passed {
                0
            } else {
                eprintln!("error: at least one check failed");
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
