//! Run configuration read from TOML.

use crate::besov::BesovParams;
use crate::error::{invalid, Error, Result};
use crate::grid::SpatialGrid;
use crate::io::read_potential_csv;
use crate::jost::SolverOptions;
use crate::potential::{Potential, PotentialKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Scatter,
    Jost,
    Kernel,
    Besov,
    Crossloc,
    Counterexample,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scatter => "scatter",
            Command::Jost => "jost",
            Command::Kernel => "kernel",
            Command::Besov => "besov",
            Command::Crossloc => "crossloc",
            Command::Counterexample => "counterexample",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    SquareBarrier { height: f64, half_width: f64 },
    Gaussian { height: f64, width: f64 },
    Sech2 { height: f64 },
    /// Two-column CSV `x, V`; relative paths resolve against the config file.
    Sampled { file: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSection {
    #[serde(flatten)]
    pub spec: PotentialSpec,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    2.0
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self { spec: PotentialSpec::SquareBarrier { height: 1.0, half_width: 1.0 }, gamma: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { x_min: SpatialGrid::DEFAULT_X_MIN, x_max: SpatialGrid::DEFAULT_X_MAX, points: SpatialGrid::DEFAULT_POINTS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterSection {
    pub tau_max: f64,
    pub h_tau: f64,
    pub resonance_taus: Vec<f64>,
}

impl Default for ScatterSection {
    fn default() -> Self {
        Self { tau_max: 20.0, h_tau: 0.05, resonance_taus: crate::scattering::DEFAULT_TAU_SEQ.to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JostSection {
    /// Uniform τ-grid of the exported field.
    pub export_tau_max: f64,
    pub export_h_tau: f64,
    /// Uniform τ-grid of the estimate run.
    pub tau_max: f64,
    pub h_tau: f64,
    pub sigma: f64,
    /// Also write the binary dump.
    pub dump: bool,
}

impl Default for JostSection {
    fn default() -> Self {
        Self { export_tau_max: 4.0, export_h_tau: 0.5, tau_max: 8.0, h_tau: 0.02, sigma: 0.5, dump: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub scales: Vec<f64>,
    pub sigma: f64,
    pub dump: bool,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self { scales: vec![0.125, 0.25, 4.0, 16.0], sigma: 0.5, dump: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BesovSection {
    pub s: Vec<f64>,
    pub p: f64,
    pub j_min: i32,
    pub j_max: i32,
}

impl Default for BesovSection {
    fn default() -> Self {
        Self { s: vec![0.0, 0.2, 0.4], p: 2.0, j_min: -4, j_max: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrosslocSection {
    /// Scale index of the block applied first.
    pub k: i32,
    /// Scale indices of the block applied last.
    pub j: Vec<i32>,
    pub p: f64,
    pub probes: usize,
    /// Frequency band `[lo, hi]` of the modulated probes.
    pub band: [f64; 2],
}

impl Default for CrosslocSection {
    fn default() -> Self {
        Self { k: 4, j: vec![-3, -2, -1, 0, 1, 2], p: 2.0, probes: 32, band: [0.5, 64.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleSection {
    pub n_values: Vec<i64>,
}

impl Default for CounterexampleSection {
    fn default() -> Self {
        Self { n_values: vec![4, 8, 16, 32, 64] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSection {
    /// Step-doubling defect allowed in the Jost solver.
    pub solver: f64,
    pub max_step: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        let o = SolverOptions::default();
        Self { solver: o.tol, max_step: o.max_step }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub potential: PotentialSection,
    pub grid: GridSection,
    pub scatter: ScatterSection,
    pub jost: JostSection,
    pub kernel: KernelSection,
    pub besov: BesovSection,
    pub crossloc: CrosslocSection,
    pub counterexample: CounterexampleSection,
    pub tolerances: ToleranceSection,
    /// Directory of the config file, for relative paths.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(name, format!("must be finite and > 0, got {v}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut c = Self::from_toml(&text)?;
        c.base_dir = path.parent().map(Path::to_path_buf);
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the effective config, overrides included; the output directory is left out.
    pub fn sha256(&self) -> String {
        let d = Sha256::digest(Self { out: None, ..self.clone() }.to_toml().as_bytes());
        d.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spatial_grid()?;
        positive("tolerances.solver", self.tolerances.solver)?;
        positive("tolerances.max_step", self.tolerances.max_step)?;
        positive("scatter.tau_max", self.scatter.tau_max)?;
        positive("scatter.h_tau", self.scatter.h_tau)?;
        positive("jost.tau_max", self.jost.tau_max)?;
        positive("jost.export_tau_max", self.jost.export_tau_max)?;
        positive("jost.export_h_tau", self.jost.export_h_tau)?;
        positive("jost.h_tau", self.jost.h_tau)?;
        if !(self.jost.sigma > 0.0 && self.jost.sigma < 1.0) {
            return Err(invalid("jost.sigma", format!("must lie in (0, 1), got {}", self.jost.sigma)));
        }
        if !(self.kernel.sigma > 0.0 && self.kernel.sigma < 1.0) {
            return Err(invalid("kernel.sigma", format!("must lie in (0, 1), got {}", self.kernel.sigma)));
        }
        if self.kernel.scales.is_empty() {
            return Err(invalid("kernel.scales", "empty"));
        }
        for &m in &self.kernel.scales {
            positive("kernel.scales", m)?;
        }
        for &s in &self.besov.s {
            BesovParams::new(s, self.besov.p, self.besov.j_min, self.besov.j_max)
                .map_err(|e| prefix("besov", e))?;
        }
        if self.besov.s.is_empty() {
            return Err(invalid("besov.s", "empty"));
        }
        if !(self.crossloc.p > 1.0 && self.crossloc.p.is_finite()) {
            return Err(invalid("crossloc.p", format!("must lie in (1, inf), got {}", self.crossloc.p)));
        }
        if self.crossloc.probes == 0 {
            return Err(invalid("crossloc.probes", "need at least one probe"));
        }
        let [lo, hi] = self.crossloc.band;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(invalid("crossloc.band", format!("need 0 < lo < hi, got [{lo}, {hi}]")));
        }
        if self.crossloc.j.is_empty() {
            return Err(invalid("crossloc.j", "empty"));
        }
        if let Some(&n) = self.counterexample.n_values.iter().find(|&&n| n < 0) {
            return Err(invalid("counterexample.n_values", format!("N must be >= 0, got {n}")));
        }
        if let PotentialSpec::Sampled { file } = &self.potential.spec {
            let p = self.resolve(file);
            if !p.is_file() {
                return Err(invalid("potential.file", format!("{} does not exist", p.display())));
            }
        }
        self.potential().map(|_| ())
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.grid.x_min, self.grid.x_max, self.grid.points).map_err(|e| prefix("grid", e))
    }

    pub fn potential(&self) -> Result<Potential> {
        let kind = match &self.potential.spec {
            PotentialSpec::Zero => PotentialKind::Zero,
            PotentialSpec::SquareBarrier { height, half_width } => {
                PotentialKind::SquareBarrier { height: *height, half_width: *half_width }
            }
            PotentialSpec::Gaussian { height, width } => PotentialKind::Gaussian { height: *height, width: *width },
            PotentialSpec::Sech2 { height } => PotentialKind::Sech2 { height: *height },
            PotentialSpec::Sampled { file } => {
                let (x, v) = read_potential_csv(&self.resolve(file))?;
                PotentialKind::Sampled { x, v }
            }
        };
        Potential::new(kind, self.potential.gamma).map_err(|e| prefix("potential", e))
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions { tol: self.tolerances.solver, max_step: self.tolerances.max_step, ..SolverOptions::default() }
    }
}

fn prefix(section: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::InvalidParameter { name: format!("{section}.{name}"), reason },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = RunConfig::from_toml("").unwrap();
        c.validate().unwrap();
        assert_eq!(c.potential().unwrap(), Potential::square_barrier(1.0, 1.0));
    }

    #[test]
    fn sections_parse() {
        let c = RunConfig::from_toml(
            r#"
            command = "verify-all"
            seed = 9
            [potential]
            kind = "gaussian"
            height = 2.0
            width = 0.5
            gamma = 3.0
            [grid]
            points = 1025
            [besov]
            s = [0.1]
            "#,
        )
        .unwrap();
        assert_eq!(c.command, Some(Command::VerifyAll));
        assert_eq!(c.potential.gamma, 3.0);
        assert_eq!(c.grid.points, 1025);
        assert_eq!(c.grid.x_min, -40.0);
        c.validate().unwrap();
    }

    #[test]
    fn field_level_errors() {
        let c = RunConfig::from_toml("[tolerances]\nsolver = -1.0").unwrap();
        match c.validate() {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "tolerances.solver"),
            other => panic!("{other:?}"),
        }
        let c = RunConfig::from_toml("[potential]\nkind = \"sampled\"\nfile = \"/nonexistent.csv\"").unwrap();
        assert!(matches!(c.validate(), Err(Error::InvalidParameter { name, .. }) if name == "potential.file"));
        assert!(matches!(RunConfig::from_toml("[grid]\npointz = 3"), Err(Error::Config(_))));
        let c = RunConfig::from_toml("[besov]\np = 0.5").unwrap();
        assert!(matches!(c.validate(), Err(Error::InvalidParameter { name, .. }) if name == "besov.p"));
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = RunConfig::default();
        assert_eq!(a.sha256(), b.sha256());
        b.seed = 1;
        assert_ne!(a.sha256(), b.sha256());
        assert_eq!(a.sha256().len(), 64);
    }
}
