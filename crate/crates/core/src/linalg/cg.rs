use nalgebra::DVector;

use super::SparseOperator;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone)]
pub struct CgResult {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Unpreconditioned conjugate gradients for symmetric positive definite `a`,
/// stopping when `‖b − A x‖ ≤ tol ‖b‖`. At most `10 n` iterations are taken.
pub fn cg_solve(a: &SparseOperator, b: &DVector<f64>, tol: f64) -> Result<CgResult> {
    let n = a.nrows();
    if !a.is_square() || b.len() != n {
        return invalid("conjugate gradients need a square matrix and matching right-hand side");
    }
    let defect = a.symmetry_defect();
    if defect > 1e-12 * a.max_abs() {
        return invalid(format!(
            "matrix is not symmetric (max |A - At| = {defect:e})"
        ));
    }
    let bnorm = b.norm();
    let mut x = DVector::zeros(n);
    if bnorm == 0.0 {
        return Ok(CgResult {
            x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    let cap = 10 * n.max(1);
    for it in 1..=cap {
        let ap = a.mul_vec(&p);
        let pap = p.dot(&ap);
        if pap <= 0.0 {
            return invalid("matrix is not positive definite");
        }
        let alpha = rr / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rr_new = r.dot(&r);
        let rel = rr_new.sqrt() / bnorm;
        if rel <= tol {
            return Ok(CgResult {
                x,
                iterations: it,
                relative_residual: rel,
            });
        }
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
    }
    Err(Error::NoConvergence {
        iterations: cap,
        residual: rr.sqrt() / bnorm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn identity_one_iteration() {
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let r = cg_solve(&SparseOperator::identity(3), &b, 1e-12).unwrap();
        assert_eq!(r.iterations, 1);
        assert!((r.x - b).norm() < 1e-15);
    }

    #[test]
    fn diagonal() {
        let a = SparseOperator::from_dense(&DMatrix::from_diagonal(&DVector::from_vec(vec![
            1.0, 10.0, 100.0,
        ])));
        let r = cg_solve(&a, &DVector::from_vec(vec![1.0, 10.0, 100.0]), 1e-12).unwrap();
        assert!((r.x - DVector::from_element(3, 1.0)).norm() < 1e-10);
        assert!(r.relative_residual <= 1e-12);
    }

    #[test]
    fn rejects_nonsymmetric() {
        let a = SparseOperator::from_dense(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]));
        assert!(matches!(
            cg_solve(&a, &DVector::from_element(2, 1.0), 1e-10),
            Err(Error::InvalidArgument(_))
        ));
    }
}
