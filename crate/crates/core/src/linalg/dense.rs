use nalgebra::{DMatrix, DVector};

/// Eigendecomposition of a symmetric matrix with eigenvalues ascending and
/// eigenvector columns in matching order. Used for dense cross-checks and
/// the semigroup certificate, not for production solves.
pub fn sym_eigen_sorted(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    let se = nalgebra::SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (c, &i) in idx.iter().enumerate() {
        vecs.set_column(c, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// exp(t M) for symmetric M, via eigendecomposition.
pub fn sym_expm(m: DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen_sorted(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&l| (t * l).exp()));
    &vecs * DMatrix::from_diagonal(&d) * vecs.transpose()
}
