//! Small dense complex solves.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Condition numbers above this are treated as exactly singular.
pub const SINGULAR_CONDITION: f64 = 1e15;
/// Condition numbers above this flag a result as ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e12;

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Right singular vector of the smallest singular value.
pub fn null_vector(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    v_t.row(k).iter().map(|c| c.conj()).collect()
}

/// Solves `m x = b` by partially pivoted LU. Returns the solution and the
/// condition number of `m`.
pub fn solve(m: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<(DVector<Complex64>, f64)> {
    let condition = condition_number(m);
    if !(condition < SINGULAR_CONDITION) {
        return Err(Error::SingularResponseMatrix {
            condition,
            dark_state: null_vector(m),
        });
    }
    match m.clone().lu().solve(b) {
        Some(x) => Ok((x, condition)),
        None => Err(Error::SingularResponseMatrix {
            condition: f64::INFINITY,
            dark_state: null_vector(m),
        }),
    }
}

/// Eigenpairs of the Hermitian part `(m + m†)/2`, eigenvalues ascending.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}
