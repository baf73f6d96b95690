use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polydsa::bench::{config_meshes, run_experiment, ExperimentConfig, DEFAULT_CONFIG};
use polydsa::mesh::mesh_quality;
use polydsa::Result;

#[derive(Parser)]
#[command(
    name = "polydsa",
    version,
    about = "DG transport with diffusion synthetic acceleration on Voronoi meshes"
)]
struct Cli {
    /// Print the baseline configuration and exit.
    #[arg(long)]
    emit_default_config: bool,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a configuration file and write CSV results.
    Run {
        config: PathBuf,
        /// Output directory, overriding `experiment.output_dir`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Use this single mesh seed instead of the configured list.
        #[arg(long)]
        seed: Option<u64>,
        /// Outer iteration cap.
        #[arg(long)]
        cap: Option<usize>,
        /// Relative-change tolerance of the outer iteration.
        #[arg(long)]
        tol: Option<f64>,
        /// Do not print a line per finished row.
        #[arg(long)]
        quiet: bool,
    },
    /// Print quality statistics of the meshes a configuration generates.
    MeshStats {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the baseline configuration.
    EmitDefaultConfig,
}

fn load(path: &PathBuf, seed: Option<u64>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(s) = seed {
        cfg.mesh.seeds = vec![s];
    }
    Ok(cfg)
}

fn real_main(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| polydsa::Error::InvalidArgument(e.to_string()))?;
    }
    if cli.emit_default_config {
        print!("{DEFAULT_CONFIG}");
        return Ok(());
    }
    match cli.command {
        None | Some(Command::EmitDefaultConfig) => print!("{DEFAULT_CONFIG}"),
        Some(Command::Run {
            config,
            out_dir,
            seed,
            cap,
            tol,
            quiet,
        }) => {
            let mut cfg = load(&config, seed)?;
            if let Some(c) = cap {
                cfg.solver.max_iterations = c;
            }
            if let Some(t) = tol {
                cfg.solver.tolerance = t;
            }
            cfg.validate()?;
            let out = run_experiment(&cfg, out_dir.as_deref(), |r| {
                if quiet {
                    return;
                }
                let rho = r
                    .spectral_radius
                    .map_or("-".to_string(), |v| format!("{v:.4}"));
                eprintln!(
                    "cells={} p={} n_q={} c={} sigma_t={:.4e} {:<13} rho={} iters={} {}",
                    r.n_cells,
                    r.p,
                    r.n_q,
                    r.c,
                    r.scalar,
                    r.variant,
                    rho,
                    r.n_iterations.map_or("-".into(), |n| n.to_string()),
                    r.status
                );
            })?;
            for f in &out.files {
                println!("{}", f.display());
            }
            if let Some(m) = &out.manifest {
                println!("{}", m.display());
            }
        }
        Some(Command::MeshStats { config, seed }) => {
            let cfg = load(&config, seed)?;
            println!("cells,lloyd_iterations,seed,h,eta,iso_min,iso_mean,facets_min,facets_mean,facets_max,shape_regularity");
            for case in config_meshes(&cfg)? {
                let q = mesh_quality(&case.mesh);
                println!(
                    "{},{},{},{:.6},{:.6},{:.6},{:.6},{},{:.4},{},{:.6}",
                    case.mesh.num_cells(),
                    case.lloyd_iterations,
                    case.seed,
                    case.mesh.h(),
                    q.anisotropy_ratio,
                    q.isoperimetric_min(),
                    q.isoperimetric_mean(),
                    q.facets_min,
                    q.facets_mean,
                    q.facets_max,
                    q.shape_regularity
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
