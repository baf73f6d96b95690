use crate::error::{invalid, Result};

/// Piecewise-constant total and scattering cross sections, one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSections {
    pub sigma_t: Vec<f64>,
    pub sigma_s: Vec<f64>,
}

impl CrossSections {
    pub fn new(sigma_t: Vec<f64>, sigma_s: Vec<f64>) -> Result<Self> {
        if sigma_t.len() != sigma_s.len() {
            return invalid("sigma_t and sigma_s have different lengths");
        }
        for (k, (&t, &s)) in sigma_t.iter().zip(&sigma_s).enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return invalid(format!("sigma_t = {t} in cell {k} must be positive"));
            }
            if !(s.is_finite() && (0.0..=t).contains(&s)) {
                return invalid(format!(
                    "sigma_s = {s} in cell {k} must lie in [0, sigma_t]"
                ));
            }
        }
        Ok(Self { sigma_t, sigma_s })
    }

    /// Homogeneous material with scattering ratio `c = σ_s / σ_t`.
    pub fn uniform(cells: usize, sigma_t: f64, c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return invalid(format!("scattering ratio {c} outside [0, 1]"));
        }
        Self::new(vec![sigma_t; cells], vec![c * sigma_t; cells])
    }

    pub fn len(&self) -> usize {
        self.sigma_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_t.is_empty()
    }

    pub fn sigma_a(&self, cell: usize) -> f64 {
        self.sigma_t[cell] - self.sigma_s[cell]
    }

    /// max over cells of σ_s / σ_t.
    pub fn scattering_ratio(&self) -> f64 {
        self.sigma_t
            .iter()
            .zip(&self.sigma_s)
            .map(|(t, s)| s / t)
            .fold(0.0, f64::max)
    }

    /// Isotropic diffusion coefficient σ_s / (2 σ_t²) of the two-dimensional correction.
    pub fn diffusion_coefficient(&self, cell: usize) -> f64 {
        self.sigma_s[cell] / (2.0 * self.sigma_t[cell] * self.sigma_t[cell])
    }
}
