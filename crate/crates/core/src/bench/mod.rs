//! Configuration-driven experiment sweeps with CSV output.

mod config;
mod csv;
mod run;

pub use self::csv::{write_csv, ResultRow, HEADER};
pub use config::{
    DiscretisationSection, ExperimentConfig, ExperimentSection, LogRange, MaterialSection,
    MeshSection, SigmaSweep, SolverSection, DEFAULT_CONFIG,
};
pub use run::{
    collect_rows, config_domain, config_hash, config_meshes, run_experiment, run_variant,
    ExperimentOutput, MeshCase,
};
