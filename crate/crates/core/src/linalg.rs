//! Thin adapters onto nalgebra's dense decompositions.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::operator::Operator;

fn to_nalgebra(op: &Operator) -> DMatrix<C64> {
    let n = op.dim();
    DMatrix::from_fn(n, n, |i, j| op.get(i, j))
}

/// Eigen-decomposition of a Hermitian operator.
///
/// Eigenvalues are returned in ascending order; column `k` of the second
/// array is the eigenvector for eigenvalue `k`. Only the Hermitian part of
/// the input is used.
pub fn hermitian_eigen(op: &Operator) -> (Vec<f64>, Array2<C64>) {
    let n = op.dim();
    let m = to_nalgebra(op);
    let herm = (&m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(i, k)| eig.eigenvectors[(i, order[k])]);
    (values, vectors)
}

/// Eigen-decomposition of a real symmetric matrix, ascending eigenvalues.
pub fn symmetric_eigen(m: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.len();
    let mat = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[i][j] + m[j][i]));
    let eig = SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = (0..n)
        .map(|i| order.iter().map(|&k| eig.eigenvectors[(i, k)]).collect())
        .collect();
    (values, vectors)
}

/// Least-squares solution of `a x = b` with the 2-norm condition number of `a`.
///
/// Returns `None` when the SVD fails to converge.
pub fn least_squares(a: &[Vec<f64>], b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mat = DMatrix::from_fn(rows, cols, |i, j| a[i][j]);
    let rhs = nalgebra::DVector::from_column_slice(b);
    let svd = mat.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let eps = smax * f64::EPSILON * rows.max(cols) as f64;
    let x = svd.solve(&rhs, eps).ok()?;
    Some((x.iter().copied().collect(), condition))
}
