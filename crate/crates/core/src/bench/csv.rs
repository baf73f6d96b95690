use std::path::Path;

use crate::error::Result;

/// Column names, in order, of every result file.
pub const HEADER: [&str; 22] = [
    "scalar",
    "c",
    "n_q",
    "p",
    "n_cells",
    "seed",
    "lloyd_iterations",
    "h",
    "eta",
    "optical_thickness",
    "variant",
    "spectral_radius",
    "n_iterations",
    "divergent",
    "termination",
    "reference",
    "n_cyclic",
    "status",
    "time_sweep_s",
    "time_dsa_source_s",
    "time_dsa_solve_s",
    "time_update_s",
];

/// One (configuration, variant) outcome. `scalar` is the swept σ_t.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scalar: f64,
    pub c: f64,
    pub n_q: usize,
    pub p: usize,
    pub n_cells: usize,
    pub seed: u64,
    pub lloyd_iterations: usize,
    pub h: f64,
    pub eta: f64,
    pub variant: String,
    pub spectral_radius: Option<f64>,
    pub n_iterations: Option<usize>,
    pub divergent: Option<bool>,
    pub termination: Option<String>,
    pub reference: Option<String>,
    pub n_cyclic: Option<usize>,
    /// `ok` or `error: <message>`.
    pub status: String,
    pub time_sweep: Option<f64>,
    pub time_dsa_source: Option<f64>,
    pub time_dsa_solve: Option<f64>,
    pub time_update: Option<f64>,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn optical_thickness(&self) -> f64 {
        self.h * self.scalar
    }

    /// Total timed seconds per outer iteration.
    pub fn time_per_iteration(&self) -> Option<f64> {
        let n = self.n_iterations.filter(|&n| n > 0)? as f64;
        let t =
            self.time_sweep? + self.time_dsa_source? + self.time_dsa_solve? + self.time_update?;
        Some(t / n)
    }

    pub fn record(&self) -> Vec<String> {
        let real = |v: f64| format!("{v:.16e}");
        let opt_real = |v: Option<f64>| v.map(real).unwrap_or_default();
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            real(self.scalar),
            real(self.c),
            self.n_q.to_string(),
            self.p.to_string(),
            self.n_cells.to_string(),
            self.seed.to_string(),
            self.lloyd_iterations.to_string(),
            real(self.h),
            real(self.eta),
            real(self.optical_thickness()),
            self.variant.clone(),
            opt_real(self.spectral_radius),
            opt(self.n_iterations.map(|v| v.to_string())),
            opt(self.divergent.map(|v| v.to_string())),
            opt(self.termination.clone()),
            opt(self.reference.clone()),
            opt(self.n_cyclic.map(|v| v.to_string())),
            self.status.clone(),
            opt_real(self.time_sweep),
            opt_real(self.time_dsa_source),
            opt_real(self.time_dsa_solve),
            opt_real(self.time_update),
        ]
    }
}

/// Writes the header and one line per row (17 significant digits for reals).
pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            scalar: 0.1,
            c: 0.999,
            n_q: 16,
            p: 1,
            n_cells: 64,
            seed: 7,
            lloyd_iterations: 10,
            h: 2.0,
            eta: 1.25,
            variant: "mip-dirichlet".into(),
            spectral_radius: Some(1.0 / 3.0),
            n_iterations: Some(12),
            divergent: Some(false),
            termination: Some("tolerance".into()),
            reference: Some("direct".into()),
            n_cyclic: Some(0),
            status: "ok".into(),
            time_sweep: Some(0.5),
            time_dsa_source: Some(0.1),
            time_dsa_solve: Some(0.2),
            time_update: Some(0.4),
        }
    }

    #[test]
    fn header_only_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty.csv");
        write_csv(&[], &empty).unwrap();
        assert_eq!(std::fs::read_to_string(&empty).unwrap().lines().count(), 1);

        let one = dir.path().join("one.csv");
        write_csv(&[row()], &one).unwrap();
        let mut rd = csv::Reader::from_path(&one).unwrap();
        assert_eq!(
            rd.headers().unwrap().iter().collect::<Vec<_>>(),
            HEADER.to_vec()
        );
        let recs: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(recs.len(), 1);
        let rho: f64 = recs[0][11].parse().unwrap();
        assert_eq!(rho, 1.0 / 3.0);
        let scalar: f64 = recs[0][0].parse().unwrap();
        assert_eq!(scalar, 0.1);
        assert_eq!(&recs[0][10], "mip-dirichlet");
    }

    #[test]
    fn per_iteration_time() {
        assert!((row().time_per_iteration().unwrap() - 0.1).abs() < 1e-15);
    }
}
