use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::DVector;

use super::rho::{empirical_rho, RhoEstimate, ERROR_FLOOR};
use crate::dsa::{assemble_dsa_rhs, DiffusionConfig, DiffusionCorrection, DsaVariant};
use crate::error::{invalid, Error, Result};
use crate::transport::TransportSystem;

/// Outer iteration scheme: plain source iteration or one of the accelerated variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    SourceIteration,
    Dsa(DsaVariant),
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::SourceIteration,
        Scheme::Dsa(DsaVariant::SipDirichlet),
        Scheme::Dsa(DsaVariant::SipMarshak),
        Scheme::Dsa(DsaVariant::MipDirichlet),
        Scheme::Dsa(DsaVariant::MipMarshak),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SourceIteration => "none",
            Scheme::Dsa(v) => v.name(),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            Ok(Scheme::SourceIteration)
        } else {
            s.parse().map(Scheme::Dsa)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationSettings {
    /// Stop when the relative scalar-flux change drops below this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Stop early once the error exceeds this multiple of the initial error.
    pub divergence_growth: f64,
    /// Error floor used by the convergence-factor window.
    pub error_floor: f64,
}

impl Default for IterationSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 50,
            divergence_growth: 1e6,
            error_floor: ERROR_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    Cap,
    Divergence,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Tolerance => "tolerance",
            Termination::Cap => "cap",
            Termination::Divergence => "divergence",
        }
    }
}

/// Accumulated wall time per phase of the outer iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub sweep: Duration,
    pub dsa_source: Duration,
    pub dsa_solve: Duration,
    pub update: Duration,
}

impl PhaseTimings {
    pub fn total(&self) -> Duration {
        self.sweep + self.dsa_source + self.dsa_solve + self.update
    }
}

#[derive(Debug, Clone)]
pub struct IterationReport {
    pub scheme: Scheme,
    /// ‖Φ^(n) − Φ*‖ in the broken L² norm, starting with the initial guess.
    pub errors: Vec<f64>,
    /// ‖Φ^(n+1) − Φ^(n)‖ / ‖Φ^(n+1)‖ per iteration.
    pub relative_changes: Vec<f64>,
    /// ‖δ^(n+1)‖ per iteration (all zero for source iteration).
    pub correction_norms: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
    /// `None` when fewer than two errors lie above the floor.
    pub rho: Option<RhoEstimate>,
    pub divergent: bool,
    pub timings: PhaseTimings,
    pub flux: DVector<f64>,
}

impl IterationReport {
    pub fn rho_value(&self) -> Option<f64> {
        self.rho.as_ref().map(|r| r.rho)
    }
}

fn run(
    system: &TransportSystem,
    scheme: Scheme,
    correction: Option<&DiffusionCorrection>,
    reference: Option<&DVector<f64>>,
    settings: &IterationSettings,
    initial: Option<&DVector<f64>>,
) -> Result<IterationReport> {
    let n = system.num_dofs();
    let space = system.space();
    for v in [reference, initial].into_iter().flatten() {
        if v.len() != n {
            return invalid(format!(
                "vector of length {} for {n} degrees of freedom",
                v.len()
            ));
        }
    }
    let mut phi = initial.cloned().unwrap_or_else(|| DVector::zeros(n));
    let error = |phi: &DVector<f64>| reference.map(|r| space.l2_norm(&(phi - r)));
    let mut errors: Vec<f64> = error(&phi).into_iter().collect();
    let e0 = errors.first().copied();
    let mut changes = Vec::new();
    let mut corrections = Vec::new();
    let mut timings = PhaseTimings::default();
    let mut termination = Termination::Cap;

    for _ in 0..settings.max_iterations {
        let t = Instant::now();
        let half = system.sweep_scalar_flux(&phi)?;
        timings.sweep += t.elapsed();

        let next = match correction {
            Some(c) => {
                let t = Instant::now();
                let b = assemble_dsa_rhs(system.scatter(), &half, &phi)?;
                timings.dsa_source += t.elapsed();
                let t = Instant::now();
                let delta = c.solve(&b);
                timings.dsa_solve += t.elapsed();
                let t = Instant::now();
                corrections.push(space.l2_norm(&delta));
                let next = half + delta;
                timings.update += t.elapsed();
                next
            }
            None => {
                corrections.push(0.0);
                half
            }
        };

        let t = Instant::now();
        let diff = space.l2_norm(&(&next - &phi));
        let norm = space.l2_norm(&next);
        let r = if norm > 0.0 {
            diff / norm
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        phi = next;
        changes.push(r);
        if let Some(e) = error(&phi) {
            errors.push(e);
        }
        timings.update += t.elapsed();

        if !phi.iter().all(|v| v.is_finite()) {
            termination = Termination::Divergence;
            break;
        }
        if let (Some(e0), Some(&e)) = (e0, errors.last()) {
            if e0 > 0.0 && e >= settings.divergence_growth * e0 {
                termination = Termination::Divergence;
                break;
            }
        }
        if r < settings.tolerance {
            termination = Termination::Tolerance;
            break;
        }
    }

    let rho = empirical_rho(&errors, settings.error_floor).ok();
    let divergent = rho.as_ref().is_some_and(RhoEstimate::divergent);
    Ok(IterationReport {
        scheme,
        errors,
        iterations: changes.len(),
        relative_changes: changes,
        correction_norms: corrections,
        termination,
        rho,
        divergent,
        timings,
        flux: phi,
    })
}

/// Unaccelerated source iteration `Φ^(n+1) = Σ_k w_k A_k⁻¹ (S Φ^(n) + L_k)`.
pub fn source_iteration(
    system: &TransportSystem,
    reference: &DVector<f64>,
    settings: &IterationSettings,
    initial: Option<&DVector<f64>>,
) -> Result<IterationReport> {
    run(
        system,
        Scheme::SourceIteration,
        None,
        Some(reference),
        settings,
        initial,
    )
}

/// Source iteration followed by the additive diffusion correction after every sweep.
pub fn dsa_iteration(
    system: &TransportSystem,
    correction: &DiffusionCorrection,
    reference: &DVector<f64>,
    settings: &IterationSettings,
    initial: Option<&DVector<f64>>,
) -> Result<IterationReport> {
    let scheme = Scheme::Dsa(variant_of(&correction.config));
    run(
        system,
        scheme,
        Some(correction),
        Some(reference),
        settings,
        initial,
    )
}

fn variant_of(config: &DiffusionConfig) -> DsaVariant {
    DsaVariant::ALL
        .into_iter()
        .find(|v| v.penalty() == config.penalty && v.boundary() == config.boundary)
        .expect("every penalty/boundary pair is a variant")
}

/// Builds the correction for `scheme` (if any) and runs the outer iteration.
pub fn run_scheme(
    system: &TransportSystem,
    scheme: Scheme,
    reference: &DVector<f64>,
    settings: &IterationSettings,
    initial: Option<&DVector<f64>>,
) -> Result<IterationReport> {
    match scheme {
        Scheme::SourceIteration => source_iteration(system, reference, settings, initial),
        Scheme::Dsa(v) => {
            let c = DiffusionCorrection::new(
                system.space(),
                system.cross_sections(),
                system.quadrature(),
                DiffusionConfig::new(v),
            )?;
            dsa_iteration(system, &c, reference, settings, initial)
        }
    }
}

/// Accelerated iteration without a reference, used when the direct reference is too large.
pub(crate) fn converge_without_reference(
    system: &TransportSystem,
    correction: &DiffusionCorrection,
    settings: &IterationSettings,
) -> Result<IterationReport> {
    let scheme = Scheme::Dsa(variant_of(&correction.config));
    run(system, scheme, Some(correction), None, settings, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!(Scheme::SourceIteration.to_string(), "none");
    }
}
