use std::f64::consts::PI;

use crate::geom::Point2;
use crate::quadrature::AngularQuadrature;

/// Smooth manufactured solution `ψ(ω, x) = ω_x² sin(πx) sin(πy)`, which
/// vanishes on the boundary of any square with integer side, so the
/// consistent inflow data is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedProblem {
    /// Σ_l w_l ω_{l,x}², the quadrature's second moment.
    pub second_moment: f64,
}

impl ManufacturedProblem {
    pub fn new(quad: &AngularQuadrature) -> Self {
        Self {
            second_moment: quad.integrate(|o| o.x * o.x),
        }
    }

    pub fn angular_flux(&self, omega: Point2, x: Point2) -> f64 {
        omega.x * omega.x * (PI * x.x).sin() * (PI * x.y).sin()
    }

    /// Σ_k w_k ψ(ω_k, x) under the quadrature used to build the problem.
    pub fn scalar_flux(&self, x: Point2) -> f64 {
        self.second_moment * (PI * x.x).sin() * (PI * x.y).sin()
    }

    /// ω·∇ψ + σ_t ψ − σ_s Σ_l w_l ψ_l.
    pub fn source(&self, omega: Point2, x: Point2, sigma_t: f64, sigma_s: f64) -> f64 {
        let (sx, cx) = (PI * x.x).sin_cos();
        let (sy, cy) = (PI * x.y).sin_cos();
        let w2 = omega.x * omega.x;
        let streaming = w2 * PI * (omega.x * cx * sy + omega.y * sx * cy);
        streaming + sigma_t * w2 * sx * sy - sigma_s * self.second_moment * sx * sy
    }
}

/// Volume source driving the transport problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Zero,
    /// The same constant in every direction and cell.
    Constant(f64),
    Manufactured(ManufacturedProblem),
}

impl Source {
    pub fn value(&self, omega: Point2, x: Point2, sigma_t: f64, sigma_s: f64) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Constant(v) => *v,
            Source::Manufactured(m) => m.source(omega, x, sigma_t, sigma_s),
        }
    }
}
