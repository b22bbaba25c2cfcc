//! Thin wrappers over the dense linear-algebra backend.
//!
//! All decompositions run with sequential backend parallelism so that results
//! are bit-identical regardless of how many worker threads drive the sweeps;
//! concurrency lives at the sweep-point level instead.

use std::sync::Once;

use faer::{c64, Mat, Par, Side};

use crate::error::{Error, Result};

static DETERMINISTIC: Once = Once::new();

fn ensure_deterministic() {
    DETERMINISTIC.call_once(|| {
        faer::set_global_parallelism(Par::Seq);
    });
}

/// Singular values of `m`, descending.
pub fn singular_values(m: &Mat<c64>) -> Result<Vec<f64>> {
    ensure_deterministic();
    m.singular_values()
        .map_err(|e| Error::Contract(format!("SVD failed to converge: {e:?}")))
}

/// Full SVD `m = U S V^H`; returns (U, S, V).
pub fn svd(m: &Mat<c64>) -> Result<(Mat<c64>, Vec<f64>, Mat<c64>)> {
    ensure_deterministic();
    let svd = m
        .svd()
        .map_err(|e| Error::Contract(format!("SVD failed to converge: {e:?}")))?;
    let k = m.nrows().min(m.ncols());
    let s = (0..k).map(|i| svd.S()[i].re).collect();
    Ok((svd.U().to_owned(), s, svd.V().to_owned()))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    ensure_deterministic();
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Contract(format!("eigendecomposition failed: {e:?}")))
}

/// Matrix product helper that keeps backend parallelism sequential.
pub fn matmul(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    ensure_deterministic();
    a * b
}
