//! Small dense complex linear-algebra helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::rng::SampleStream;
use crate::state::{inner, norm_sqr};

pub type CMatrix = DMatrix<Complex64>;

/// Residual norm below which a vector counts as linearly dependent.
pub const DEPENDENCE_TOLERANCE: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues of a Hermitian matrix, in no particular order.
///
/// The 2x2 case uses the closed form with the small root taken from the
/// determinant, which keeps tiny eigenvalues accurate to absolute rounding.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    match m.nrows() {
        0 => vec![],
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let c = m[(1, 1)].re;
            let b = m[(0, 1)].norm_sqr();
            eig2(a, c, b).to_vec()
        }
        _ => m.clone().symmetric_eigenvalues().iter().copied().collect(),
    }
}

/// Eigenvalues of `[[a, b], [b*, c]]` given `|b|^2`.
pub(crate) fn eig2(a: f64, c: f64, b_sqr: f64) -> [f64; 2] {
    let half = 0.5 * (a - c);
    let disc = (half * half + b_sqr).sqrt();
    let mean = 0.5 * (a + c);
    let big = mean + disc;
    let det = a * c - b_sqr;
    let small = if big > 0.0 { det / big } else { mean - disc };
    [big, small]
}

/// Eigen-decomposition `m = V diag(w) V^†` of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Orthogonalizes `v` against the orthonormal `basis` (two passes of
/// modified Gram–Schmidt) and returns the projection coefficients.
pub(crate) fn orthogonalize(v: &mut [Complex64], basis: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut coeffs = vec![ZERO; basis.len()];
    for _ in 0..2 {
        for (c, b) in coeffs.iter_mut().zip(basis) {
            let p = inner(b, v);
            *c += p;
            for (x, y) in v.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
    }
    coeffs
}

/// Extends the orthonormal `basis` of `C^dim` to `target` vectors by
/// Gram–Schmidt over the canonical basis in index order, skipping candidates
/// whose residual falls below [`DEPENDENCE_TOLERANCE`].
pub fn complete_basis(basis: &mut Vec<Vec<Complex64>>, dim: usize, target: usize) {
    let mut e = 0;
    while basis.len() < target && e < dim {
        let mut v = vec![ZERO; dim];
        v[e] = ONE;
        e += 1;
        orthogonalize(&mut v, basis);
        let n = norm_sqr(&v).sqrt();
        if n < DEPENDENCE_TOLERANCE {
            continue;
        }
        for x in &mut v {
            *x /= n;
        }
        basis.push(v);
    }
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(columns: &[Vec<Complex64>], rows: usize) -> CMatrix {
    CMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r])
}

/// Haar-random unitary: Gram–Schmidt on the columns of a complex Gaussian
/// matrix (equivalent to QR with a positive diagonal of R).
pub fn haar_unitary(dim: usize, stream: &mut SampleStream) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| stream.complex_normal()).collect();
        orthogonalize(&mut v, &cols);
        let n = norm_sqr(&v).sqrt();
        if n < 1e-8 {
            continue;
        }
        for x in &mut v {
            *x /= n;
        }
        cols.push(v);
    }
    from_columns(&cols, dim)
}

/// Largest entrywise deviation of `U^† U` from the identity.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

pub fn apply(u: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let n = u.nrows();
    let mut out = vec![ZERO; n];
    for (j, x) in v.iter().enumerate() {
        if *x == ZERO {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += u[(i, j)] * x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RunSeed;

    #[test]
    fn eig2_matches_nalgebra() {
        let mut s = RunSeed::new(3, 0).stream();
        for _ in 0..50 {
            let a = s.normal();
            let c = s.normal();
            let b = s.complex_normal();
            let m = CMatrix::from_row_slice(2, 2, &[a.into(), b, b.conj(), c.into()]);
            let mut mine = hermitian_eigenvalues(&m);
            let mut reference: Vec<f64> =
                m.clone().symmetric_eigenvalues().iter().copied().collect();
            mine.sort_by(f64::total_cmp);
            reference.sort_by(f64::total_cmp);
            for (x, y) in mine.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut s = RunSeed::new(9, 0).stream();
        for d in [2, 4, 9] {
            let u = haar_unitary(d, &mut s);
            assert!(unitarity_residual(&u) < 1e-13);
        }
    }

    #[test]
    fn completion_gives_orthonormal_basis() {
        let v = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), ZERO];
        let mut basis = vec![v];
        complete_basis(&mut basis, 3, 3);
        assert_eq!(basis.len(), 3);
        let m = from_columns(&basis, 3);
        assert!(unitarity_residual(&m) < 1e-14);
    }

    #[test]
    fn kron_of_identities() {
        let a = CMatrix::identity(2, 2);
        let b = CMatrix::identity(3, 3);
        assert_eq!(kron(&a, &b), CMatrix::identity(6, 6));
    }
}
