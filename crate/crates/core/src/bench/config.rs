use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::Scheme;

/// The desk-scale baseline sweep written by `emit-default-config`.
pub const DEFAULT_CONFIG: &str = r#"# Experiment configuration. Every list is swept as a cartesian product.

[experiment]
name = "baseline"
output_dir = "results"

[mesh]
# lower-left x, lower-left y, upper-right x, upper-right y
domain = [0.0, 0.0, 10.0, 10.0]
cells = [256]
lloyd_iterations = [10]
seeds = [1]

[discretisation]
degree = [1]
n_q = [16]

[material]
scattering_ratio = [0.999]
# Exactly one of `sigma_t`, `sigma_t_range` or `optical_thickness` (σ_t = τ / h).
sigma_t_range = { min = 1e-3, max = 1e6, points = 20 }

[solver]
# any of: none, sip-dirichlet, sip-marshak, mip-dirichlet, mip-marshak
variants = ["none", "sip-dirichlet", "sip-marshak", "mip-dirichlet", "mip-marshak"]
tolerance = 1e-12
max_iterations = 50
penalty_prefactor = 10.0
# coupled reference solved directly up to this many scalar-flux unknowns
reference_max_dofs = 4096
"#;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub discretisation: DiscretisationSection,
    pub material: MaterialSection,
    #[serde(default)]
    pub solver: SolverSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

fn default_output_dir() -> String {
    "results".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub domain: [f64; 4],
    pub cells: Vec<usize>,
    pub lloyd_iterations: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self {
            domain: [0.0, 0.0, 10.0, 10.0],
            cells: vec![256],
            lloyd_iterations: vec![10],
            seeds: vec![1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscretisationSection {
    pub degree: Vec<usize>,
    pub n_q: Vec<usize>,
}

impl Default for DiscretisationSection {
    fn default() -> Self {
        Self {
            degree: vec![1],
            n_q: vec![16],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl LogRange {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let (a, b) = (self.min.log10(), self.max.log10());
        (0..self.points)
            .map(|i| 10f64.powf(a + (b - a) * i as f64 / (self.points - 1) as f64))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    #[serde(default = "default_ratios")]
    pub scattering_ratio: Vec<f64>,
    #[serde(default)]
    pub sigma_t: Option<Vec<f64>>,
    #[serde(default)]
    pub sigma_t_range: Option<LogRange>,
    #[serde(default)]
    pub optical_thickness: Option<Vec<f64>>,
}

fn default_ratios() -> Vec<f64> {
    vec![0.999]
}

/// How the total cross sections of a sweep are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSweep {
    Values(Vec<f64>),
    /// σ_t = τ / h for each optical thickness τ.
    OpticalThickness(Vec<f64>),
}

impl SigmaSweep {
    pub fn resolve(&self, h: f64) -> Vec<f64> {
        match self {
            SigmaSweep::Values(v) => v.clone(),
            SigmaSweep::OpticalThickness(t) => t.iter().map(|t| t / h).collect(),
        }
    }
}

impl MaterialSection {
    pub fn sweep(&self) -> Result<SigmaSweep> {
        match (&self.sigma_t, &self.sigma_t_range, &self.optical_thickness) {
            (Some(v), None, None) => Ok(SigmaSweep::Values(v.clone())),
            (None, Some(r), None) => Ok(SigmaSweep::Values(r.values())),
            (None, None, Some(t)) => Ok(SigmaSweep::OpticalThickness(t.clone())),
            (None, None, None) => Ok(SigmaSweep::Values(
                LogRange {
                    min: 1e-3,
                    max: 1e6,
                    points: 20,
                }
                .values(),
            )),
            _ => Err(Error::Config(
                "give only one of sigma_t, sigma_t_range and optical_thickness".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub variants: Vec<String>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub penalty_prefactor: f64,
    pub reference_max_dofs: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            variants: Scheme::ALL.iter().map(|s| s.name().to_string()).collect(),
            tolerance: 1e-12,
            max_iterations: 50,
            penalty_prefactor: 10.0,
            reference_max_dofs: 4096,
        }
    }
}

impl SolverSection {
    pub fn schemes(&self) -> Result<Vec<Scheme>> {
        self.variants
            .iter()
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Config(format!("unknown variant '{v}'")))
            })
            .collect()
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn baseline() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("built-in configuration is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        let name = &self.experiment.name;
        if name.is_empty() || name.contains(['/', '\\']) {
            return fail("experiment name must be a non-empty file-name fragment");
        }
        let m = &self.mesh;
        if m.cells.is_empty() || m.lloyd_iterations.is_empty() || m.seeds.is_empty() {
            return fail("mesh lists must be non-empty");
        }
        if m.cells.contains(&0) {
            return fail("cell counts must be positive");
        }
        let [x0, y0, x1, y1] = m.domain;
        if !(x1 > x0 && y1 > y0) {
            return fail("domain must have positive width and height");
        }
        let d = &self.discretisation;
        if d.degree.is_empty() || d.n_q.is_empty() {
            return fail("discretisation lists must be non-empty");
        }
        if d.n_q.iter().any(|&n| n < 2) {
            return fail("n_q values must be at least 2");
        }
        let mat = &self.material;
        if mat.scattering_ratio.is_empty()
            || mat
                .scattering_ratio
                .iter()
                .any(|c| !(*c > 0.0 && *c <= 1.0))
        {
            return fail("scattering ratios must be non-empty and lie in (0, 1]");
        }
        let positive = |v: &[f64]| !v.is_empty() && v.iter().all(|x| x.is_finite() && *x > 0.0);
        match mat.sweep()? {
            SigmaSweep::Values(v) | SigmaSweep::OpticalThickness(v) if !positive(&v) => {
                return fail("sigma_t sweep must be non-empty with positive values");
            }
            _ => {}
        }
        if let Some(r) = &mat.sigma_t_range {
            if !(r.min > 0.0 && r.max >= r.min && r.points > 0) {
                return fail("sigma_t_range needs 0 < min <= max and points > 0");
            }
        }
        let s = &self.solver;
        if s.variants.is_empty() {
            return fail("at least one variant is required");
        }
        s.schemes()?;
        if !(s.tolerance > 0.0) || s.max_iterations == 0 || !(s.penalty_prefactor > 0.0) {
            return fail("tolerance, max_iterations and penalty_prefactor must be positive");
        }
        Ok(())
    }
}
