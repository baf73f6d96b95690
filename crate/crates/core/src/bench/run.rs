use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::csv::{write_csv, ResultRow};
use crate::dgspace::DgSpace;
use crate::dsa::{DiffusionConfig, DiffusionCorrection};
use crate::error::{Error, Result};
use crate::geom::{Point2, Rect};
use crate::mesh::{generate_voronoi, mesh_quality, PolyMesh, VoronoiOptions};
use crate::quadrature::AngularQuadrature;
use crate::solver::{
    dsa_iteration, reference_solution, source_iteration, IterationReport, IterationSettings,
    ReferenceOptions, ReferenceSolution, Scheme,
};
use crate::transport::{CrossSections, ManufacturedProblem, Source, TransportSystem};

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    /// CSV files written, one per variant.
    pub files: Vec<PathBuf>,
    pub manifest: Option<PathBuf>,
}

/// A generated mesh with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct MeshCase {
    pub cells: usize,
    pub lloyd_iterations: usize,
    pub seed: u64,
    pub mesh: Arc<PolyMesh>,
}

pub fn config_domain(cfg: &ExperimentConfig) -> Result<Rect> {
    let [x0, y0, x1, y1] = cfg.mesh.domain;
    Rect::new(Point2::new(x0, y0), Point2::new(x1, y1))
}

/// Every mesh of the configuration in sweep order (cells, Lloyd iterations, seed).
pub fn config_meshes(cfg: &ExperimentConfig) -> Result<Vec<MeshCase>> {
    let domain = config_domain(cfg)?;
    let mut out = Vec::new();
    for &cells in &cfg.mesh.cells {
        for &lloyd in &cfg.mesh.lloyd_iterations {
            for &seed in &cfg.mesh.seeds {
                let opts = VoronoiOptions {
                    lloyd_iterations: lloyd,
                    ..VoronoiOptions::default()
                };
                let mesh = generate_voronoi(&domain, cells, seed, opts)?;
                out.push(MeshCase {
                    cells,
                    lloyd_iterations: lloyd,
                    seed,
                    mesh: Arc::new(mesh),
                });
            }
        }
    }
    Ok(out)
}

/// Runs one outer iteration of `scheme` against an existing system and reference.
pub fn run_variant(
    system: &TransportSystem,
    scheme: Scheme,
    reference: &ReferenceSolution,
    settings: &IterationSettings,
    prefactor: f64,
) -> Result<IterationReport> {
    match scheme {
        Scheme::SourceIteration => source_iteration(system, &reference.flux, settings, None),
        Scheme::Dsa(v) => {
            let correction = DiffusionCorrection::new(
                system.space(),
                system.cross_sections(),
                system.quadrature(),
                DiffusionConfig::new(v).with_prefactor(prefactor),
            )?;
            dsa_iteration(system, &correction, &reference.flux, settings, None)
        }
    }
}

/// Runs every tuple of the sweep and returns the rows in sweep order. `progress`
/// is called after each row.
pub fn collect_rows(
    cfg: &ExperimentConfig,
    mut progress: impl FnMut(&ResultRow),
) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let schemes = cfg.solver.schemes()?;
    let sweep = cfg.material.sweep()?;
    let settings = IterationSettings {
        tolerance: cfg.solver.tolerance,
        max_iterations: cfg.solver.max_iterations,
        ..IterationSettings::default()
    };
    let ref_opts = ReferenceOptions {
        max_direct_dofs: cfg.solver.reference_max_dofs,
        ..ReferenceOptions::default()
    };
    let mut rows = Vec::new();
    for case in config_meshes(cfg)? {
        let mesh = &case.mesh;
        let h = mesh.h();
        let eta = mesh_quality(mesh).anisotropy_ratio;
        for &p in &cfg.discretisation.degree {
            let space = Arc::new(DgSpace::new(mesh.clone(), p)?);
            for &n_q in &cfg.discretisation.n_q {
                let quad = AngularQuadrature::trapezoidal(n_q)?;
                let source = Source::Manufactured(ManufacturedProblem::new(&quad));
                for &c in &cfg.material.scattering_ratio {
                    for sigma_t in sweep.resolve(h) {
                        let base = ResultRow {
                            scalar: sigma_t,
                            c,
                            n_q,
                            p,
                            n_cells: mesh.num_cells(),
                            seed: case.seed,
                            lloyd_iterations: case.lloyd_iterations,
                            h,
                            eta,
                            variant: String::new(),
                            spectral_radius: None,
                            n_iterations: None,
                            divergent: None,
                            termination: None,
                            reference: None,
                            n_cyclic: None,
                            status: "ok".into(),
                            time_sweep: None,
                            time_dsa_source: None,
                            time_dsa_solve: None,
                            time_update: None,
                        };
                        let prepared = CrossSections::uniform(mesh.num_cells(), sigma_t, c)
                            .and_then(|xs| {
                                TransportSystem::assemble(space.clone(), xs, quad.clone(), source)
                            })
                            .and_then(|sys| {
                                let r = reference_solution(&sys, &ref_opts)?;
                                Ok((sys, r))
                            });
                        for &scheme in &schemes {
                            let mut row = base.clone();
                            row.variant = scheme.name().to_string();
                            let outcome = prepared.as_ref().map_err(|e| e.to_string()).and_then(
                                |(sys, reference)| {
                                    row.reference = Some(reference.method.name().to_string());
                                    row.n_cyclic = Some(sys.num_cyclic());
                                    run_variant(
                                        sys,
                                        scheme,
                                        reference,
                                        &settings,
                                        cfg.solver.penalty_prefactor,
                                    )
                                    .map_err(|e| e.to_string())
                                },
                            );
                            match outcome {
                                Ok(rep) => fill_row(&mut row, &rep),
                                Err(msg) => row.status = format!("error: {msg}"),
                            }
                            progress(&row);
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn fill_row(row: &mut ResultRow, rep: &IterationReport) {
    row.spectral_radius = rep.rho_value();
    row.n_iterations = Some(rep.iterations);
    row.divergent = Some(rep.divergent);
    row.termination = Some(rep.termination.name().to_string());
    row.time_sweep = Some(rep.timings.sweep.as_secs_f64());
    row.time_dsa_source = Some(rep.timings.dsa_source.as_secs_f64());
    row.time_dsa_solve = Some(rep.timings.dsa_solve.as_secs_f64());
    row.time_update = Some(rep.timings.update.as_secs_f64());
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    polydsa_version: &'a str,
    config_sha256: String,
    seeds: &'a [u64],
    threads: usize,
    rows: usize,
    wall_seconds: f64,
    files: Vec<String>,
    config: &'a ExperimentConfig,
}

/// SHA-256 of the canonical TOML serialisation of the configuration.
pub fn config_hash(cfg: &ExperimentConfig) -> Result<String> {
    let text = toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

/// Runs the sweep, writes `<experiment>_<variant>.csv` per variant and a
/// `<experiment>_manifest.toml` into `out_dir` (or the configured directory).
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: Option<&Path>,
    progress: impl FnMut(&ResultRow),
) -> Result<ExperimentOutput> {
    let start = Instant::now();
    let rows = collect_rows(cfg, progress)?;
    let dir = out_dir.map_or_else(
        || PathBuf::from(&cfg.experiment.output_dir),
        Path::to_path_buf,
    );
    std::fs::create_dir_all(&dir)?;
    let mut by_variant: BTreeMap<usize, Vec<ResultRow>> = BTreeMap::new();
    let schemes = cfg.solver.schemes()?;
    for r in &rows {
        let idx = schemes
            .iter()
            .position(|s| s.name() == r.variant)
            .unwrap_or(0);
        by_variant.entry(idx).or_default().push(r.clone());
    }
    let mut files = Vec::new();
    for (i, s) in schemes.iter().enumerate() {
        let path = dir.join(format!("{}_{}.csv", cfg.experiment.name, s.name()));
        write_csv(by_variant.get(&i).map_or(&[][..], Vec::as_slice), &path)?;
        files.push(path);
    }
    let manifest = Manifest {
        experiment: &cfg.experiment.name,
        polydsa_version: env!("CARGO_PKG_VERSION"),
        config_sha256: config_hash(cfg)?,
        seeds: &cfg.mesh.seeds,
        threads: rayon::current_num_threads(),
        rows: rows.len(),
        wall_seconds: start.elapsed().as_secs_f64(),
        files: files
            .iter()
            .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        config: cfg,
    };
    let mpath = dir.join(format!("{}_manifest.toml", cfg.experiment.name));
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(&mpath, text)?;
    Ok(ExperimentOutput {
        rows,
        files,
        manifest: Some(mpath),
    })
}
