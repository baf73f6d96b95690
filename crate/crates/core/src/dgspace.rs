//! Broken polynomial spaces on polygonal meshes.
//!
//! On each cell the basis is the set of monomials `ξ^a η^b`, `a + b ≤ p`, in
//! coordinates centred on the cell's axis-aligned bounding box and scaled to
//! [-1, 1]. Degrees of freedom are numbered cell by cell.

use std::ops::Range;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geom::Point2;
use crate::mesh::PolyMesh;
use crate::quadrature::{polygon_rule, PolygonRule};

/// Extra quadrature exactness used when integrating non-polynomial data.
pub const DATA_EXTRA_EXACTNESS: usize = 6;

pub fn local_dim(p: usize) -> usize {
    (p + 1) * (p + 2) / 2
}

/// Monomial exponents `(a, b)` in basis order: by total degree, then decreasing `a`.
pub fn exponents(p: usize) -> Vec<(usize, usize)> {
    (0..=p)
        .flat_map(|d| (0..=d).rev().map(move |a| (a, d - a)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct DgSpace {
    mesh: Arc<PolyMesh>,
    degrees: Vec<usize>,
    offsets: Vec<usize>,
    centers: Vec<Point2>,
    scales: Vec<Point2>,
    mass: Vec<DMatrix<f64>>,
    mass_factor: Vec<Cholesky<f64, Dyn>>,
    mass_condition: Vec<f64>,
}

impl DgSpace {
    /// Space of uniform degree `p`.
    pub fn new(mesh: Arc<PolyMesh>, p: usize) -> Result<Self> {
        let n = mesh.num_cells();
        Self::with_degrees(mesh, vec![p; n])
    }

    pub fn with_degrees(mesh: Arc<PolyMesh>, degrees: Vec<usize>) -> Result<Self> {
        if degrees.len() != mesh.num_cells() {
            return invalid(format!(
                "{} degrees given for {} cells",
                degrees.len(),
                mesh.num_cells()
            ));
        }
        let mut offsets = Vec::with_capacity(degrees.len() + 1);
        offsets.push(0);
        for &p in &degrees {
            offsets.push(offsets.last().unwrap() + local_dim(p));
        }
        let centers = mesh
            .cells
            .iter()
            .map(|c| (c.aabb_min + c.aabb_max) * 0.5)
            .collect();
        let scales = mesh
            .cells
            .iter()
            .map(|c| {
                let d = c.aabb_max - c.aabb_min;
                Point2::new(2.0 / d.x, 2.0 / d.y)
            })
            .collect();
        let mut space = Self {
            mesh,
            degrees,
            offsets,
            centers,
            scales,
            mass: Vec::new(),
            mass_factor: Vec::new(),
            mass_condition: Vec::new(),
        };
        let blocks: Vec<_> = (0..space.num_cells())
            .into_par_iter()
            .map(|k| space.assemble_mass(k))
            .collect::<Result<_>>()?;
        for (m, chol, cond) in blocks {
            space.mass.push(m);
            space.mass_factor.push(chol);
            space.mass_condition.push(cond);
        }
        Ok(space)
    }

    fn assemble_mass(&self, cell: usize) -> Result<(DMatrix<f64>, Cholesky<f64, Dyn>, f64)> {
        let n = self.local_dim(cell);
        let rule = self.cell_rule(cell, 2 * self.degrees[cell])?;
        let mut m = DMatrix::zeros(n, n);
        let mut v = vec![0.0; n];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            self.values_into(cell, *p, &mut v);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += w * v[i] * v[j];
                }
            }
        }
        let eig = m.clone().symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        let chol = Cholesky::new(m.clone()).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "mass matrix of cell {cell} is not positive definite"
            ))
        })?;
        Ok((m, chol, cond))
    }

    pub fn mesh(&self) -> &PolyMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<PolyMesh> {
        &self.mesh
    }

    pub fn num_cells(&self) -> usize {
        self.degrees.len()
    }

    pub fn num_dofs(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn degree(&self, cell: usize) -> usize {
        self.degrees[cell]
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn local_dim(&self, cell: usize) -> usize {
        local_dim(self.degrees[cell])
    }

    pub fn offset(&self, cell: usize) -> usize {
        self.offsets[cell]
    }

    pub fn dofs(&self, cell: usize) -> Range<usize> {
        self.offsets[cell]..self.offsets[cell + 1]
    }

    pub fn mass(&self, cell: usize) -> &DMatrix<f64> {
        &self.mass[cell]
    }

    pub fn mass_factor(&self, cell: usize) -> &Cholesky<f64, Dyn> {
        &self.mass_factor[cell]
    }

    /// 2-norm condition number of the local mass matrix.
    pub fn mass_condition(&self, cell: usize) -> f64 {
        self.mass_condition[cell]
    }

    pub fn cell_rule(&self, cell: usize, exactness: usize) -> Result<PolygonRule> {
        polygon_rule(&self.mesh.cell_polygon(cell), exactness)
    }

    /// Basis values at `p`; `out` must have the local dimension.
    pub fn values_into(&self, cell: usize, p: Point2, out: &mut [f64]) {
        let deg = self.degrees[cell];
        let (xi, eta) = self.local_coords(cell, p);
        let mut k = 0;
        for d in 0..=deg {
            for a in (0..=d).rev() {
                out[k] = xi.powi(a as i32) * eta.powi((d - a) as i32);
                k += 1;
            }
        }
    }

    /// Basis values and Cartesian gradients at `p`.
    pub fn eval_into(&self, cell: usize, p: Point2, vals: &mut [f64], grads: &mut [Point2]) {
        let deg = self.degrees[cell];
        let (xi, eta) = self.local_coords(cell, p);
        let s = self.scales[cell];
        let pw = |x: f64, e: usize| if e == 0 { 1.0 } else { x.powi(e as i32) };
        let mut k = 0;
        for d in 0..=deg {
            for a in (0..=d).rev() {
                let b = d - a;
                vals[k] = pw(xi, a) * pw(eta, b);
                let gx = if a == 0 {
                    0.0
                } else {
                    a as f64 * pw(xi, a - 1) * pw(eta, b)
                };
                let gy = if b == 0 {
                    0.0
                } else {
                    b as f64 * pw(xi, a) * pw(eta, b - 1)
                };
                grads[k] = Point2::new(gx * s.x, gy * s.y);
                k += 1;
            }
        }
    }

    /// Checked evaluation returning freshly allocated values and gradients.
    pub fn eval_basis(&self, cell: usize, p: Point2) -> Result<(Vec<f64>, Vec<Point2>)> {
        if cell >= self.num_cells() {
            return invalid(format!(
                "cell {cell} out of range ({} cells)",
                self.num_cells()
            ));
        }
        let n = self.local_dim(cell);
        let mut v = vec![0.0; n];
        let mut g = vec![Point2::default(); n];
        self.eval_into(cell, p, &mut v, &mut g);
        Ok((v, g))
    }

    fn local_coords(&self, cell: usize, p: Point2) -> (f64, f64) {
        let c = self.centers[cell];
        let s = self.scales[cell];
        ((p.x - c.x) * s.x, (p.y - c.y) * s.y)
    }

    /// Value of the discrete function `coeffs` at `p` in `cell`.
    pub fn evaluate(&self, coeffs: &DVector<f64>, cell: usize, p: Point2) -> f64 {
        let mut v = vec![0.0; self.local_dim(cell)];
        self.values_into(cell, p, &mut v);
        let off = self.offset(cell);
        v.iter().enumerate().map(|(i, b)| b * coeffs[off + i]).sum()
    }

    /// Elementwise L² projection using a rule of exactness `2p + extra`.
    pub fn project_with<F>(&self, f: F, extra: usize) -> Result<DVector<f64>>
    where
        F: Fn(Point2) -> f64 + Sync,
    {
        let locals: Vec<DVector<f64>> = (0..self.num_cells())
            .into_par_iter()
            .map(|k| {
                let n = self.local_dim(k);
                let rule = self.cell_rule(k, 2 * self.degrees[k] + extra)?;
                let mut rhs = DVector::zeros(n);
                let mut v = vec![0.0; n];
                for (p, w) in rule.points.iter().zip(&rule.weights) {
                    self.values_into(k, *p, &mut v);
                    let fv = w * f(*p);
                    for i in 0..n {
                        rhs[i] += fv * v[i];
                    }
                }
                Ok(self.mass_factor[k].solve(&rhs))
            })
            .collect::<Result<_>>()?;
        let mut out = DVector::zeros(self.num_dofs());
        for (k, l) in locals.iter().enumerate() {
            out.rows_mut(self.offset(k), l.len()).copy_from(l);
        }
        Ok(out)
    }

    pub fn project<F>(&self, f: F) -> Result<DVector<f64>>
    where
        F: Fn(Point2) -> f64 + Sync,
    {
        self.project_with(f, DATA_EXTRA_EXACTNESS)
    }

    /// Broken L² inner product `Σ_κ a_κᵀ M_κ b_κ`.
    pub fn l2_inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (0..self.num_cells())
            .map(|k| {
                let r = self.dofs(k);
                let (ak, bk) = (a.rows(r.start, r.len()), b.rows(r.start, r.len()));
                ak.dot(&(&self.mass[k] * bk))
            })
            .sum()
    }

    pub fn l2_norm(&self, a: &DVector<f64>) -> f64 {
        self.l2_inner(a, a).max(0.0).sqrt()
    }

    /// Broken L² distance between the discrete function and `f`, integrated with exactness `2p + 6`.
    pub fn l2_error<F>(&self, coeffs: &DVector<f64>, f: F) -> Result<f64>
    where
        F: Fn(Point2) -> f64 + Sync,
    {
        let parts: Vec<f64> = (0..self.num_cells())
            .into_par_iter()
            .map(|k| {
                let rule = self.cell_rule(k, 2 * self.degrees[k] + DATA_EXTRA_EXACTNESS)?;
                Ok(rule.integrate(|p| (self.evaluate(coeffs, k, p) - f(p)).powi(2)))
            })
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum::<f64>().sqrt())
    }

    /// Global block-diagonal mass-weighted product `y_κ = scale_κ M_κ x_κ`.
    pub fn apply_mass(&self, x: &DVector<f64>, scale: impl Fn(usize) -> f64) -> DVector<f64> {
        let mut y = DVector::zeros(x.len());
        for k in 0..self.num_cells() {
            let r = self.dofs(k);
            let yk = (&self.mass[k] * x.rows(r.start, r.len())) * scale(k);
            y.rows_mut(r.start, r.len()).copy_from(&yk);
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;

    fn grid(n: usize) -> Arc<PolyMesh> {
        Arc::new(PolyMesh::rectangular_grid(Rect::square(1.0).unwrap(), n, n).unwrap())
    }

    #[test]
    fn layout() {
        let s = DgSpace::with_degrees(grid(2), vec![0, 1, 2, 3]).unwrap();
        assert_eq!(s.num_dofs(), 1 + 3 + 6 + 10);
        assert_eq!(s.dofs(2), 4..10);
        assert_eq!(
            exponents(2),
            vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        );
        assert!(DgSpace::with_degrees(grid(2), vec![1; 3]).is_err());
    }

    #[test]
    fn linear_basis_at_centre() {
        let m = Arc::new(
            PolyMesh::rectangular_grid(
                Rect::new(Point2::new(0.0, 0.0), Point2::new(2.0, 0.5)).unwrap(),
                1,
                1,
            )
            .unwrap(),
        );
        let s = DgSpace::new(m, 1).unwrap();
        let (v, g) = s.eval_basis(0, Point2::new(1.0, 0.25)).unwrap();
        assert_eq!(v, vec![1.0, 0.0, 0.0]);
        assert_eq!(
            g,
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(0.0, 4.0)
            ]
        );
        assert!(s.eval_basis(1, Point2::default()).is_err());
    }

    #[test]
    fn constants_and_linears_reproduced() {
        let s = DgSpace::new(grid(3), 2).unwrap();
        let one = s.project(|_| 1.0).unwrap();
        assert!(s.l2_error(&one, |_| 1.0).unwrap() < 1e-12);
        let lin = s.project(|p| 3.0 * p.x - p.y + 0.5).unwrap();
        assert!(s.l2_error(&lin, |p| 3.0 * p.x - p.y + 0.5).unwrap() < 1e-11);
        assert!((s.l2_norm(&one) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mass_condition_recorded() {
        let s = DgSpace::new(grid(2), 3).unwrap();
        for k in 0..4 {
            let c = s.mass_condition(k);
            assert!(c.is_finite() && c >= 1.0);
        }
    }
}
