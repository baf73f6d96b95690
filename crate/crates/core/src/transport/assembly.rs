use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use rayon::prelude::*;

use super::sweep::{sweep_plan, SweepPlan, CHARACTERISTIC_TOL};
use super::{CrossSections, Source};
use crate::dgspace::{DgSpace, DATA_EXTRA_EXACTNESS};
use crate::error::{invalid, Error, Result};
use crate::geom::Point2;
use crate::linalg::{CooBuilder, SparseLu, SparseOperator};
use crate::quadrature::{segment_rule, AngularQuadrature};

/// Upwind DG transport operator for one direction, stored by element blocks.
#[derive(Debug, Clone)]
pub struct DirectionalOperator {
    pub omega: Point2,
    space: Arc<DgSpace>,
    diag: Vec<DMatrix<f64>>,
    diag_lu: Vec<LU<f64, Dyn, Dyn>>,
    /// For each cell, its upwind neighbours and the coupling block
    /// (rows: this cell's test functions, columns: the neighbour's trial functions).
    upwind: Vec<Vec<(usize, DMatrix<f64>)>>,
    plan: SweepPlan,
    global_lu: Option<SparseLu>,
}

impl DirectionalOperator {
    pub fn new(space: Arc<DgSpace>, xs: &CrossSections, omega: Point2) -> Result<Self> {
        let mesh = space.mesh();
        if xs.len() != mesh.num_cells() {
            return invalid(format!(
                "{} cross sections for {} cells",
                xs.len(),
                mesh.num_cells()
            ));
        }
        let blocks: Vec<(DMatrix<f64>, Vec<(usize, DMatrix<f64>)>)> = (0..mesh.num_cells())
            .map(|k| cell_blocks(&space, xs, omega, k))
            .collect::<Result<_>>()?;
        let mut diag = Vec::with_capacity(blocks.len());
        let mut diag_lu = Vec::with_capacity(blocks.len());
        let mut upwind = Vec::with_capacity(blocks.len());
        for (k, (d, up)) in blocks.into_iter().enumerate() {
            let lu = d.clone().lu();
            if !lu.is_invertible() {
                return Err(Error::SingularMatrix {
                    pivot: space.offset(k),
                });
            }
            diag.push(d);
            diag_lu.push(lu);
            upwind.push(up);
        }
        let plan = sweep_plan(mesh, omega);
        let mut op = Self {
            omega,
            space,
            diag,
            diag_lu,
            upwind,
            plan,
            global_lu: None,
        };
        if op.plan.is_cyclic() {
            op.global_lu = Some(SparseLu::factor(&op.to_sparse())?);
        }
        Ok(op)
    }

    pub fn plan(&self) -> &SweepPlan {
        &self.plan
    }

    pub fn to_sparse(&self) -> SparseOperator {
        let n = self.space.num_dofs();
        let mut b = CooBuilder::new(n, n);
        for (k, d) in self.diag.iter().enumerate() {
            let ok = self.space.offset(k);
            b.add_block(ok, ok, d);
            for (nb, blk) in &self.upwind[k] {
                b.add_block(ok, self.space.offset(*nb), blk);
            }
        }
        b.build()
    }

    /// Solves `A x = b` for every column of `b`: block forward substitution
    /// along the sweep order, or the cached sparse LU when the plan is cyclic.
    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(b.nrows(), self.space.num_dofs());
        if let Some(lu) = &self.global_lu {
            return lu.solve_matrix(b);
        }
        let SweepPlan::Ordered(order) = &self.plan else {
            unreachable!("cyclic plans always carry a factorisation")
        };
        let m = b.ncols();
        let mut x = DMatrix::zeros(b.nrows(), m);
        for &k in order {
            let r = self.space.dofs(k);
            let mut rhs = b.rows(r.start, r.len()).into_owned();
            for (nb, blk) in &self.upwind[k] {
                let rn = self.space.dofs(*nb);
                rhs.gemm(-1.0, blk, &x.rows(rn.start, rn.len()), 1.0);
            }
            self.diag_lu[k].solve_mut(&mut rhs);
            x.rows_mut(r.start, r.len()).copy_from(&rhs);
        }
        x
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let x = self.solve_matrix(&DMatrix::from_column_slice(b.len(), 1, b.as_slice()));
        DVector::from_column_slice(x.as_slice())
    }
}

/// Diagonal block and upwind coupling blocks of cell `k`.
fn cell_blocks(
    space: &DgSpace,
    xs: &CrossSections,
    omega: Point2,
    k: usize,
) -> Result<(DMatrix<f64>, Vec<(usize, DMatrix<f64>)>)> {
    let mesh = space.mesh();
    let p = space.degree(k);
    let n = space.local_dim(k);
    let mut vals = vec![0.0; n];
    let mut grads = vec![Point2::default(); n];
    let mut a = DMatrix::zeros(n, n);
    let st = xs.sigma_t[k];
    let rule = space.cell_rule(k, 2 * p)?;
    for (x, w) in rule.points.iter().zip(&rule.weights) {
        space.eval_into(k, *x, &mut vals, &mut grads);
        for j in 0..n {
            let trial = w * (omega.dot(grads[j]) + st * vals[j]);
            for i in 0..n {
                a[(i, j)] += trial * vals[i];
            }
        }
    }
    let mut upwind = Vec::new();
    for &fi in &mesh.cells[k].facets {
        let f = &mesh.facets[fi];
        let s = omega.dot(f.normal_from(k));
        if s >= -CHARACTERISTIC_TOL {
            continue;
        }
        let (pa, pb) = mesh.facet_points(fi);
        let nb = f.neighbour_of(k);
        let pn = nb.map_or(p, |c| space.degree(c));
        let seg = segment_rule(pa, pb, p + pn)?;
        let mut blk = nb.map(|c| DMatrix::zeros(n, space.local_dim(c)));
        let mut nvals = vec![0.0; nb.map_or(0, |c| space.local_dim(c))];
        for (x, w) in seg.points.iter().zip(&seg.weights) {
            let ws = w * s.abs();
            space.values_into(k, *x, &mut vals);
            for j in 0..n {
                for i in 0..n {
                    a[(i, j)] += ws * vals[i] * vals[j];
                }
            }
            if let (Some(c), Some(b)) = (nb, blk.as_mut()) {
                space.values_into(c, *x, &mut nvals);
                for j in 0..nvals.len() {
                    for i in 0..n {
                        b[(i, j)] -= ws * vals[i] * nvals[j];
                    }
                }
            }
        }
        if let (Some(c), Some(b)) = (nb, blk) {
            upwind.push((c, b));
        }
    }
    Ok((a, upwind))
}

/// Sparse matrix of the upwind transport form for direction `omega`.
pub fn assemble_transport(
    space: &Arc<DgSpace>,
    xs: &CrossSections,
    omega: Point2,
) -> Result<SparseOperator> {
    Ok(DirectionalOperator::new(space.clone(), xs, omega)?.to_sparse())
}

/// Block-diagonal scattering mass matrix with blocks σ_s M_κ.
pub fn assemble_scatter_mass(space: &DgSpace, xs: &CrossSections) -> SparseOperator {
    let n = space.num_dofs();
    let mut b = CooBuilder::new(n, n);
    for k in 0..space.num_cells() {
        let ok = space.offset(k);
        b.add_block(ok, ok, &(space.mass(k) * xs.sigma_s[k]));
    }
    b.build()
}

/// Load vector ∫ f φ_i for direction `omega` (zero inflow data).
pub fn assemble_load(
    space: &DgSpace,
    xs: &CrossSections,
    source: &Source,
    omega: Point2,
) -> Result<DVector<f64>> {
    let mut load = DVector::zeros(space.num_dofs());
    if *source == Source::Zero {
        return Ok(load);
    }
    for k in 0..space.num_cells() {
        let n = space.local_dim(k);
        let rule = space.cell_rule(k, 2 * space.degree(k) + DATA_EXTRA_EXACTNESS)?;
        let mut vals = vec![0.0; n];
        let off = space.offset(k);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            space.values_into(k, *x, &mut vals);
            let fv = w * source.value(omega, *x, xs.sigma_t[k], xs.sigma_s[k]);
            for i in 0..n {
                load[off + i] += fv * vals[i];
            }
        }
    }
    Ok(load)
}

/// All discrete-ordinates operators, the scattering mass and the loads of one configuration.
#[derive(Debug, Clone)]
pub struct TransportSystem {
    space: Arc<DgSpace>,
    xs: CrossSections,
    quad: AngularQuadrature,
    operators: Vec<DirectionalOperator>,
    scatter: SparseOperator,
    loads: Vec<DVector<f64>>,
}

impl TransportSystem {
    pub fn assemble(
        space: Arc<DgSpace>,
        xs: CrossSections,
        quad: AngularQuadrature,
        source: Source,
    ) -> Result<Self> {
        let operators = quad
            .ordinates
            .par_iter()
            .map(|o| DirectionalOperator::new(space.clone(), &xs, *o))
            .collect::<Result<Vec<_>>>()?;
        let loads = quad
            .ordinates
            .par_iter()
            .map(|o| assemble_load(&space, &xs, &source, *o))
            .collect::<Result<Vec<_>>>()?;
        let scatter = assemble_scatter_mass(&space, &xs);
        Ok(Self {
            space,
            xs,
            quad,
            operators,
            scatter,
            loads,
        })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn cross_sections(&self) -> &CrossSections {
        &self.xs
    }

    pub fn quadrature(&self) -> &AngularQuadrature {
        &self.quad
    }

    pub fn operator(&self, k: usize) -> &DirectionalOperator {
        &self.operators[k]
    }

    pub fn scatter(&self) -> &SparseOperator {
        &self.scatter
    }

    pub fn load(&self, k: usize) -> &DVector<f64> {
        &self.loads[k]
    }

    pub fn num_dofs(&self) -> usize {
        self.space.num_dofs()
    }

    /// Number of ordinates whose upwind graph has a cycle.
    pub fn num_cyclic(&self) -> usize {
        self.operators
            .iter()
            .filter(|o| o.plan().is_cyclic())
            .count()
    }

    /// Solves `A_k x = S φ + L_k`.
    pub fn solve_direction(&self, k: usize, phi: &DVector<f64>) -> Result<DVector<f64>> {
        if k >= self.operators.len() {
            return invalid(format!("ordinate {k} out of range"));
        }
        if phi.len() != self.num_dofs() {
            return invalid("scalar flux has the wrong length");
        }
        let rhs = self.scatter.mul_vec(phi) + &self.loads[k];
        Ok(self.operators[k].solve(&rhs))
    }

    /// One transport sweep in every direction, returning Σ_k w_k A_k⁻¹ (S φ + L_k).
    pub fn sweep_scalar_flux(&self, phi: &DVector<f64>) -> Result<DVector<f64>> {
        if phi.len() != self.num_dofs() {
            return invalid("scalar flux has the wrong length");
        }
        let s_phi = self.scatter.mul_vec(phi);
        let parts: Vec<DVector<f64>> = self
            .operators
            .par_iter()
            .zip(&self.loads)
            .map(|(op, l)| op.solve(&(&s_phi + l)))
            .collect();
        let mut out = DVector::zeros(phi.len());
        for (w, part) in self.quad.weights.iter().zip(&parts) {
            out.axpy(*w, part, 1.0);
        }
        Ok(out)
    }

    /// Σ_k w_k A_k⁻¹ b for a block of right-hand sides shared by all directions.
    pub fn weighted_inverse(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let parts: Vec<DMatrix<f64>> = self
            .operators
            .par_iter()
            .map(|op| op.solve_matrix(b))
            .collect();
        let mut out = DMatrix::zeros(b.nrows(), b.ncols());
        for (w, part) in self.quad.weights.iter().zip(&parts) {
            out += part * *w;
        }
        out
    }

    /// Σ_k w_k A_k⁻¹ L_k, the uncollided scalar flux.
    pub fn uncollided_flux(&self) -> DVector<f64> {
        let parts: Vec<DVector<f64>> = self
            .operators
            .par_iter()
            .zip(&self.loads)
            .map(|(op, l)| op.solve(l))
            .collect();
        let mut out = DVector::zeros(self.num_dofs());
        for (w, part) in self.quad.weights.iter().zip(&parts) {
            out.axpy(*w, part, 1.0);
        }
        out
    }
}
