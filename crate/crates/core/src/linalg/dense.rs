use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, SymmetricEigen};

use super::{fix_sign, residual_norm, Eigenpair, SymmetricOperator};

/// Materializes a symmetric operator column by column.
pub fn operator_to_dense<A: SymmetricOperator + ?Sized>(op: &A) -> DMatrix<f64> {
    let n = op.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    // exact symmetrization removes round-off asymmetry from the stencil sums
    let t = m.transpose();
    (m + t) * 0.5
}

/// Lowest eigenpair by full dense diagonalization.
pub fn dense_lowest<A: SymmetricOperator + ?Sized>(op: &A) -> Eigenpair {
    dense_eigenpair(op, 0)
}

/// All eigenvalues in ascending order.
pub fn dense_eigenvalues<A: SymmetricOperator + ?Sized>(op: &A) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(operator_to_dense(op)).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// The `index`-th eigenpair (ascending) by full dense diagonalization.
pub fn dense_eigenpair<A: SymmetricOperator + ?Sized>(op: &A, index: usize) -> Eigenpair {
    let m = operator_to_dense(op);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let imin = order[index.min(order.len() - 1)];
    let value = eig.eigenvalues[imin];
    let mut vector: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    fix_sign(&mut vector);
    let residual = residual_norm(op, &vector, value);
    Eigenpair {
        value,
        vector,
        residual,
        iterations: 1,
    }
}
