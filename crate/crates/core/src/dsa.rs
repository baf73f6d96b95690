//! Interior-penalty diffusion operators used as the synthetic-acceleration correction.
//!
//! The bilinear form is
//!
//! ```text
//! B(u, v) = Σ_κ ∫ D ∇u·∇v + σ_a u v
//!         − ∫_{interior ∪ Dirichlet} ({D∇u}·[v] + {D∇v}·[u] − σ [u]·[v])
//!         + ∫_{Robin} κ u v
//! ```
//!
//! with arithmetic averages. The Dirichlet model applies the penalty on the
//! whole boundary; the Marshak model puts a Robin term with κ = 1/π there
//! instead and no penalty or consistency terms.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::dgspace::DgSpace;
use crate::error::{invalid, Error, Result};
use crate::geom::Point2;
use crate::linalg::{CooBuilder, SparseLu, SparseOperator};
use crate::quadrature::{segment_rule, AngularQuadrature};
use crate::transport::CrossSections;

pub const DEFAULT_PENALTY_PREFACTOR: f64 = 10.0;
/// Robin coefficient of the two-dimensional Marshak condition.
pub const MARSHAK_COEFFICIENT: f64 = 1.0 / PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Penalty {
    /// Symmetric interior penalty.
    Sip,
    /// SIP with the penalty floored by the transport face moments.
    Mip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryModel {
    Dirichlet,
    Marshak,
}

/// The four diffusion corrections compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DsaVariant {
    SipDirichlet,
    SipMarshak,
    MipDirichlet,
    MipMarshak,
}

impl DsaVariant {
    pub const ALL: [DsaVariant; 4] = [
        DsaVariant::SipDirichlet,
        DsaVariant::SipMarshak,
        DsaVariant::MipDirichlet,
        DsaVariant::MipMarshak,
    ];

    pub fn penalty(self) -> Penalty {
        match self {
            DsaVariant::SipDirichlet | DsaVariant::SipMarshak => Penalty::Sip,
            DsaVariant::MipDirichlet | DsaVariant::MipMarshak => Penalty::Mip,
        }
    }

    pub fn boundary(self) -> BoundaryModel {
        match self {
            DsaVariant::SipDirichlet | DsaVariant::MipDirichlet => BoundaryModel::Dirichlet,
            DsaVariant::SipMarshak | DsaVariant::MipMarshak => BoundaryModel::Marshak,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DsaVariant::SipDirichlet => "sip-dirichlet",
            DsaVariant::SipMarshak => "sip-marshak",
            DsaVariant::MipDirichlet => "mip-dirichlet",
            DsaVariant::MipMarshak => "mip-marshak",
        }
    }
}

impl fmt::Display for DsaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DsaVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown diffusion variant '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionConfig {
    pub penalty: Penalty,
    pub boundary: BoundaryModel,
    /// Prefactor C of the SIP penalty; absorbs the inverse-estimate constants.
    pub prefactor: f64,
    pub marshak_coefficient: f64,
}

impl DiffusionConfig {
    pub fn new(variant: DsaVariant) -> Self {
        Self {
            penalty: variant.penalty(),
            boundary: variant.boundary(),
            prefactor: DEFAULT_PENALTY_PREFACTOR,
            marshak_coefficient: MARSHAK_COEFFICIENT,
        }
    }

    pub fn with_prefactor(mut self, c: f64) -> Self {
        self.prefactor = c;
        self
    }
}

/// ½ Σ w |ω·n|.
pub fn face_moment_interior(n: Point2, quad: &AngularQuadrature) -> f64 {
    quad.half_abs_projection(n)
}

/// Σ w max(0, ω·n).
pub fn face_moment_boundary(n: Point2, quad: &AngularQuadrature) -> f64 {
    quad.outgoing_projection(n)
}

/// SIP penalty `C max_κ D_κ max(p_κ, 1)² |F| / |κ|` over the cells incident to `facet`.
pub fn sip_penalty(space: &DgSpace, xs: &CrossSections, facet: usize, prefactor: f64) -> f64 {
    let mesh = space.mesh();
    let f = &mesh.facets[facet];
    let side = |k: usize| {
        let p = space.degree(k).max(1) as f64;
        xs.diffusion_coefficient(k) * p * p * f.length / mesh.cells[k].area
    };
    let s = f.plus.map_or(side(f.minus), |b| side(f.minus).max(side(b)));
    prefactor * s
}

/// SIP penalty floored by the interior or outflow face moment of the quadrature.
pub fn mip_penalty(
    space: &DgSpace,
    xs: &CrossSections,
    quad: &AngularQuadrature,
    facet: usize,
    prefactor: f64,
) -> f64 {
    let f = &space.mesh().facets[facet];
    let floor = if f.is_boundary() {
        face_moment_boundary(f.normal, quad)
    } else {
        face_moment_interior(f.normal, quad)
    };
    sip_penalty(space, xs, facet, prefactor).max(floor)
}

fn penalty(
    space: &DgSpace,
    xs: &CrossSections,
    quad: &AngularQuadrature,
    facet: usize,
    config: &DiffusionConfig,
) -> f64 {
    match config.penalty {
        Penalty::Sip => sip_penalty(space, xs, facet, config.prefactor),
        Penalty::Mip => mip_penalty(space, xs, quad, facet, config.prefactor),
    }
}

/// Assembles the diffusion matrix for the given variant.
pub fn assemble_diffusion(
    space: &DgSpace,
    xs: &CrossSections,
    quad: &AngularQuadrature,
    config: &DiffusionConfig,
) -> Result<SparseOperator> {
    if !(config.prefactor.is_finite() && config.prefactor > 0.0) {
        return invalid(format!(
            "penalty prefactor {} must be positive",
            config.prefactor
        ));
    }
    let mesh = space.mesh();
    let n = space.num_dofs();
    let mut coo = CooBuilder::new(n, n);

    for k in 0..mesh.num_cells() {
        let nl = space.local_dim(k);
        let d = xs.diffusion_coefficient(k);
        let sa = xs.sigma_a(k);
        let rule = space.cell_rule(k, 2 * space.degree(k))?;
        let mut v = vec![0.0; nl];
        let mut g = vec![Point2::default(); nl];
        let mut blk = DMatrix::zeros(nl, nl);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            space.eval_into(k, *x, &mut v, &mut g);
            for j in 0..nl {
                for i in 0..nl {
                    blk[(i, j)] += w * (d * g[i].dot(g[j]) + sa * v[i] * v[j]);
                }
            }
        }
        coo.add_block(space.offset(k), space.offset(k), &blk);
    }

    for (fi, f) in mesh.facets.iter().enumerate() {
        let (pa, pb) = mesh.facet_points(fi);
        let nrm = f.normal;
        match f.plus {
            Some(plus) => {
                let sigma = penalty(space, xs, quad, fi, config);
                let cells = [f.minus, plus];
                let signs = [1.0, -1.0];
                let dims = cells.map(|c| space.local_dim(c));
                let coef = cells.map(|c| xs.diffusion_coefficient(c));
                let seg = segment_rule(pa, pb, space.degree(f.minus) + space.degree(plus))?;
                let mut vals = dims.map(|d| vec![0.0; d]);
                let mut grads = dims.map(|d| vec![Point2::default(); d]);
                let mut blocks: Vec<DMatrix<f64>> = (0..4)
                    .map(|ab| DMatrix::zeros(dims[ab / 2], dims[ab % 2]))
                    .collect();
                for (x, w) in seg.points.iter().zip(&seg.weights) {
                    for s in 0..2 {
                        space.eval_into(cells[s], *x, &mut vals[s], &mut grads[s]);
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            let m = &mut blocks[2 * a + b];
                            let (sa, sb) = (signs[a], signs[b]);
                            for j in 0..dims[b] {
                                let dn_b = coef[b] * grads[b][j].dot(nrm);
                                for i in 0..dims[a] {
                                    let dn_a = coef[a] * grads[a][i].dot(nrm);
                                    m[(i, j)] -= w
                                        * (0.5 * dn_b * sa * vals[a][i]
                                            + 0.5 * dn_a * sb * vals[b][j]
                                            - sigma * sa * sb * vals[a][i] * vals[b][j]);
                                }
                            }
                        }
                    }
                }
                for a in 0..2 {
                    for b in 0..2 {
                        coo.add_block(
                            space.offset(cells[a]),
                            space.offset(cells[b]),
                            &blocks[2 * a + b],
                        );
                    }
                }
            }
            None => {
                let k = f.minus;
                let nl = space.local_dim(k);
                let p = space.degree(k);
                let seg = segment_rule(pa, pb, 2 * p)?;
                let mut v = vec![0.0; nl];
                let mut g = vec![Point2::default(); nl];
                let mut blk = DMatrix::zeros(nl, nl);
                match config.boundary {
                    BoundaryModel::Dirichlet => {
                        let sigma = penalty(space, xs, quad, fi, config);
                        let d = xs.diffusion_coefficient(k);
                        for (x, w) in seg.points.iter().zip(&seg.weights) {
                            space.eval_into(k, *x, &mut v, &mut g);
                            for j in 0..nl {
                                for i in 0..nl {
                                    blk[(i, j)] -= w
                                        * (d * g[j].dot(nrm) * v[i] + d * g[i].dot(nrm) * v[j]
                                            - sigma * v[i] * v[j]);
                                }
                            }
                        }
                    }
                    BoundaryModel::Marshak => {
                        let kappa = config.marshak_coefficient;
                        for (x, w) in seg.points.iter().zip(&seg.weights) {
                            space.values_into(k, *x, &mut v);
                            for j in 0..nl {
                                for i in 0..nl {
                                    blk[(i, j)] += w * kappa * v[i] * v[j];
                                }
                            }
                        }
                    }
                }
                coo.add_block(space.offset(k), space.offset(k), &blk);
            }
        }
    }
    Ok(coo.build())
}

/// Right-hand side `S (φ_half − φ_prev)` of the correction equation.
pub fn assemble_dsa_rhs(
    scatter: &SparseOperator,
    phi_half: &DVector<f64>,
    phi_prev: &DVector<f64>,
) -> Result<DVector<f64>> {
    if phi_half.len() != scatter.ncols() || phi_prev.len() != scatter.ncols() {
        return invalid(format!(
            "flux lengths {} and {} do not match the {}-column scattering matrix",
            phi_half.len(),
            phi_prev.len(),
            scatter.ncols()
        ));
    }
    Ok(scatter.mul_vec(&(phi_half - phi_prev)))
}

/// A diffusion operator factorised once and reused for every correction solve.
#[derive(Debug, Clone)]
pub struct DiffusionCorrection {
    pub config: DiffusionConfig,
    operator: SparseOperator,
    lu: SparseLu,
}

impl DiffusionCorrection {
    pub fn new(
        space: &DgSpace,
        xs: &CrossSections,
        quad: &AngularQuadrature,
        config: DiffusionConfig,
    ) -> Result<Self> {
        let operator = assemble_diffusion(space, xs, quad, &config)?;
        let lu = SparseLu::factor(&operator)?;
        Ok(Self {
            config,
            operator,
            lu,
        })
    }

    pub fn operator(&self) -> &SparseOperator {
        &self.operator
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.lu.solve(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::mesh::PolyMesh;
    use std::sync::Arc;

    fn unit_cell(p: usize) -> DgSpace {
        let m = PolyMesh::rectangular_grid(Rect::square(1.0).unwrap(), 1, 1).unwrap();
        DgSpace::new(Arc::new(m), p).unwrap()
    }

    #[test]
    fn single_cell_matrices() {
        let s = unit_cell(0);
        let xs = CrossSections::uniform(1, 1.0, 0.999).unwrap();
        let q = AngularQuadrature::trapezoidal(16).unwrap();
        let m =
            assemble_diffusion(&s, &xs, &q, &DiffusionConfig::new(DsaVariant::SipMarshak)).unwrap();
        assert!((m.get(0, 0) - (0.001 + 4.0 / PI)).abs() < 1e-12);
        let d = assemble_diffusion(&s, &xs, &q, &DiffusionConfig::new(DsaVariant::SipDirichlet))
            .unwrap();
        assert!((d.get(0, 0) - 19.981).abs() < 1e-12);
    }

    #[test]
    fn penalty_formula() {
        let s = unit_cell(1);
        // D = 0.5 needs σ_s / (2 σ_t²) = 0.5, e.g. σ_t = σ_s = 1
        let xs = CrossSections::uniform(1, 1.0, 1.0).unwrap();
        assert!((sip_penalty(&s, &xs, 0, 10.0) - 5.0).abs() < 1e-14);
        let s2 = unit_cell(2);
        assert!((sip_penalty(&s2, &xs, 0, 10.0) - 20.0).abs() < 1e-13);
    }

    #[test]
    fn face_moments() {
        let q4 = AngularQuadrature::trapezoidal(4).unwrap();
        let n = Point2::new(1.0, 0.0);
        assert!((face_moment_interior(n, &q4) - 0.25).abs() < 1e-15);
        assert!((face_moment_boundary(n, &q4) - 0.25).abs() < 1e-15);
        let q16 = AngularQuadrature::trapezoidal(16).unwrap();
        assert!((face_moment_interior(n, &q16) - 0.31421).abs() < 1e-5);
        assert_eq!(
            face_moment_interior(n, &q16),
            face_moment_interior(-n, &q16)
        );
    }

    #[test]
    fn variant_names_round_trip() {
        for v in DsaVariant::ALL {
            assert_eq!(v.name().parse::<DsaVariant>().unwrap(), v);
        }
        assert!("mip".parse::<DsaVariant>().is_err());
    }

    #[test]
    fn rhs_checks_dimensions() {
        let s = SparseOperator::identity(2);
        let a = DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(assemble_dsa_rhs(&s, &a, &a).unwrap(), DVector::zeros(2));
        assert!(assemble_dsa_rhs(&s, &a, &DVector::zeros(3)).is_err());
    }
}
