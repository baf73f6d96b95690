use nalgebra::{DMatrix, DVector};

use super::{minimum_degree, SparseOperator};
use crate::error::{invalid, Error, Result};

/// Pivots are rejected when smaller than this fraction of the largest entry of
/// the original column.
const SINGULAR_REL_TOL: f64 = 1e-14;
/// A diagonal pivot is kept when it is at least this fraction of the column maximum.
const DIAGONAL_PREFERENCE: f64 = 0.1;

/// Sparse LU factorisation `P A Q = L U` by left-looking (Gilbert–Peierls)
/// elimination with threshold partial pivoting and a minimum-degree column order.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    /// column order: column `k` of the factor is column `q[k]` of A
    q: Vec<usize>,
    /// row permutation: original row `i` is row `pinv[i]` of the factor
    pinv: Vec<usize>,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
}

impl SparseLu {
    pub fn factor(a: &SparseOperator) -> Result<Self> {
        if !a.is_square() {
            return invalid(format!(
                "LU of a non-square {}x{} matrix",
                a.nrows(),
                a.ncols()
            ));
        }
        let n = a.nrows();
        let q = minimum_degree(a);
        // column access to A
        let at = a.transpose();
        let (c_ptr, c_idx, c_val) = (at.row_ptr(), at.col_idx(), at.values());

        const NONE: usize = usize::MAX;
        let mut pinv = vec![NONE; n];
        let mut l_ptr = vec![0usize; n + 1];
        let mut u_ptr = vec![0usize; n + 1];
        let cap = 4 * a.nnz() + n;
        let (mut l_idx, mut l_val) = (Vec::with_capacity(cap), Vec::with_capacity(cap));
        let (mut u_idx, mut u_val) = (Vec::with_capacity(cap), Vec::with_capacity(cap));
        let mut x = vec![0.0; n];
        let mut mark = vec![usize::MAX; n];
        let mut pattern: Vec<usize> = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::new();

        for k in 0..n {
            let col = q[k];
            // reach of A(:,col) in the graph of L, in topological order
            pattern.clear();
            let mut colmax: f64 = 0.0;
            for p in c_ptr[col]..c_ptr[col + 1] {
                let i = c_idx[p];
                colmax = colmax.max(c_val[p].abs());
                if mark[i] == k {
                    continue;
                }
                mark[i] = k;
                stack.push((i, 0));
                while let Some(&(j, next)) = stack.last() {
                    let jj = pinv[j];
                    let mut child = None;
                    let mut pos = next;
                    if jj != NONE {
                        let (start, end) = (l_ptr[jj] + 1, l_ptr[jj + 1]);
                        while start + pos < end {
                            let r = l_idx[start + pos];
                            pos += 1;
                            if mark[r] != k {
                                child = Some(r);
                                break;
                            }
                        }
                    }
                    stack.last_mut().unwrap().1 = pos;
                    match child {
                        Some(r) => {
                            mark[r] = k;
                            stack.push((r, 0));
                        }
                        None => {
                            pattern.push(j);
                            stack.pop();
                        }
                    }
                }
            }
            // pattern holds a reverse topological order
            for p in c_ptr[col]..c_ptr[col + 1] {
                x[c_idx[p]] = c_val[p];
            }
            for &j in pattern.iter().rev() {
                let jj = pinv[j];
                if jj == NONE {
                    continue;
                }
                let xj = x[j];
                for p in l_ptr[jj] + 1..l_ptr[jj + 1] {
                    x[l_idx[p]] -= l_val[p] * xj;
                }
            }
            let mut ipiv = NONE;
            let mut best = -1.0;
            for &i in pattern.iter().rev() {
                if pinv[i] == NONE {
                    if x[i].abs() > best {
                        best = x[i].abs();
                        ipiv = i;
                    }
                } else {
                    u_idx.push(pinv[i]);
                    u_val.push(x[i]);
                }
            }
            if ipiv == NONE || best <= SINGULAR_REL_TOL * colmax {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if pinv[col] == NONE && mark[col] == k && x[col].abs() >= DIAGONAL_PREFERENCE * best {
                ipiv = col;
            }
            let pivot = x[ipiv];
            u_idx.push(k);
            u_val.push(pivot);
            u_ptr[k + 1] = u_idx.len();
            pinv[ipiv] = k;
            l_idx.push(ipiv);
            l_val.push(1.0);
            for &i in pattern.iter().rev() {
                if pinv[i] == NONE {
                    l_idx.push(i);
                    l_val.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
            l_ptr[k + 1] = l_idx.len();
        }
        for r in l_idx.iter_mut() {
            *r = pinv[*r];
        }
        Ok(Self {
            n,
            q,
            pinv,
            l_ptr,
            l_idx,
            l_val,
            u_ptr,
            u_idx,
            u_val,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries in L and U together.
    pub fn fill(&self) -> usize {
        self.l_idx.len() + self.u_idx.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (i, &bi) in b.iter().enumerate() {
            y[self.pinv[i]] = bi;
        }
        for k in 0..self.n {
            let yk = y[k];
            if yk != 0.0 {
                for p in self.l_ptr[k] + 1..self.l_ptr[k + 1] {
                    y[self.l_idx[p]] -= self.l_val[p] * yk;
                }
            }
        }
        for k in (0..self.n).rev() {
            let last = self.u_ptr[k + 1] - 1;
            y[k] /= self.u_val[last];
            let yk = y[k];
            if yk != 0.0 {
                for p in self.u_ptr[k]..last {
                    y[self.u_idx[p]] -= self.u_val[p] * yk;
                }
            }
        }
        for k in 0..self.n {
            b[self.q[k]] = y[k];
        }
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = b.clone();
        self.solve_in_place(x.as_mut_slice());
        x
    }

    /// Solves for every column of `b`.
    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut x = b.clone();
        for mut c in x.column_iter_mut() {
            self.solve_in_place(c.as_mut_slice());
        }
        x
    }
}

/// Factors `a` and solves `a x = b`.
pub fn lu_solve(a: &SparseOperator, b: &DVector<f64>) -> Result<DVector<f64>> {
    if b.len() != a.nrows() {
        return invalid(format!(
            "right-hand side has {} rows, matrix {}",
            b.len(),
            a.nrows()
        ));
    }
    Ok(SparseLu::factor(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CooBuilder;

    #[test]
    fn identity_and_diagonal() {
        let b = DVector::from_vec(vec![3.0, -1.0, 2.0]);
        assert_eq!(lu_solve(&SparseOperator::identity(3), &b).unwrap(), b);
        let a = SparseOperator::from_dense(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]));
        let x = lu_solve(&a, &DVector::from_vec(vec![2.0, 8.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn needs_row_pivoting() {
        let a = SparseOperator::from_dense(&DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 4.0, -3.0, 8.0],
        ));
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = lu_solve(&a, &b).unwrap();
        let expect = a.to_dense().lu().solve(&b).unwrap();
        assert!((x - expect).norm() < 1e-13);
    }

    #[test]
    fn singular_reports_step() {
        let a = SparseOperator::from_dense(&DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 2.0, 0.0, 2.0, 4.0, 0.0, 0.0, 0.0, 1.0],
        ));
        assert!(matches!(
            SparseLu::factor(&a),
            Err(Error::SingularMatrix { .. })
        ));
        let mut b = CooBuilder::new(2, 2);
        b.push(0, 0, 1.0);
        assert!(matches!(
            SparseLu::factor(&b.build()),
            Err(Error::SingularMatrix { pivot: 1 })
        ));
    }
}
