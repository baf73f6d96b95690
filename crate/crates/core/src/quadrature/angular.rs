use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::geom::Point2;

/// Discrete ordinates with normalised weights (they sum to one).
#[derive(Debug, Clone, PartialEq)]
pub struct AngularQuadrature {
    pub ordinates: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl AngularQuadrature {
    /// Equispaced trapezoidal rule: angles 2π m / n for m = 0..n, equal weights.
    pub fn trapezoidal(n: usize) -> Result<Self> {
        if n < 2 {
            return invalid(format!(
                "angular quadrature needs at least 2 ordinates, got {n}"
            ));
        }
        // exact zeros at the quarter turns keep grid-aligned facets characteristic
        let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
        let ordinates = (0..n)
            .map(|m| {
                let theta = 2.0 * PI * m as f64 / n as f64;
                Point2::new(snap(theta.cos()), snap(theta.sin()))
            })
            .collect();
        Ok(Self {
            ordinates,
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Σ w_k f(ω_k).
    pub fn integrate(&self, f: impl Fn(Point2) -> f64) -> f64 {
        self.ordinates
            .iter()
            .zip(&self.weights)
            .map(|(o, w)| w * f(*o))
            .sum()
    }

    /// ½ Σ w_k |ω_k · n|, the interior-facet penalty floor of the MIP form.
    pub fn half_abs_projection(&self, n: Point2) -> f64 {
        0.5 * self.integrate(|o| o.dot(n).abs())
    }

    /// Σ w_k max(0, ω_k · n), the outgoing partial-current coefficient on a boundary facet.
    pub fn outgoing_projection(&self, n: Point2) -> f64 {
        self.integrate(|o| o.dot(n).max(0.0))
    }
}
