use crate::error::{Error, Result};

/// Errors at or below this value are considered converged and excluded from ρ.
pub const ERROR_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RhoEstimate {
    /// Geometric mean of the per-iterate reduction factors over the window.
    pub rho: f64,
    /// e_{n+1} / e_n for n < window.
    pub factors: Vec<f64>,
    /// Number of factors used.
    pub window: usize,
}

impl RhoEstimate {
    pub fn divergent(&self) -> bool {
        self.rho > 1.0
    }
}

/// Empirical convergence factor of an error history.
///
/// The window ends at the last error before the sequence first drops below
/// `floor`; ρ = (e_M / e_0)^{1/M}.
pub fn empirical_rho(errors: &[f64], floor: f64) -> Result<RhoEstimate> {
    let usable = errors
        .iter()
        .position(|&e| !(e >= floor) || !e.is_finite())
        .unwrap_or(errors.len());
    if usable < 2 {
        return Err(Error::InsufficientData(format!(
            "{usable} error value(s) above the floor {floor:e}; at least 2 are needed"
        )));
    }
    let m = usable - 1;
    let factors: Vec<f64> = errors[..usable].windows(2).map(|w| w[1] / w[0]).collect();
    let rho = (errors[m] / errors[0]).powf(1.0 / m as f64);
    Ok(RhoEstimate {
        rho,
        factors,
        window: m,
    })
}
