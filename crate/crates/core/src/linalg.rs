use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
///
/// The input is symmetrized first. Returns `None` if the QR iteration does
/// not converge.
pub(crate) fn sorted_symmetric_eigen(mat: &DMatrix<f64>) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let n = mat.nrows();
    if n == 0 {
        return Some((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let sym = (mat + mat.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 1000 * n.max(10))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Some((values, vectors))
}
