//! Lower-triangular presentation of an ordered state set.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{complete_basis, orthogonalize, CMatrix, DEPENDENCE_TOLERANCE, ZERO};
use crate::state::{norm_sqr, PureState};

/// `φ_i = Σ_{j ≤ i} c_ij ξ_j` with orthonormal `ξ` obtained by Gram–Schmidt
/// in the given order. Diagonal entries are real and nonnegative.
#[derive(Debug, Clone)]
pub struct TriangularForm {
    pub coeffs: CMatrix,
    pub basis: Vec<PureState>,
    /// Number of nonzero diagonal entries.
    pub residual_rank: usize,
    /// `dependent[i]` is set when state `i` lies in the span of its
    /// predecessors; its basis vector is then an arbitrary completion.
    pub dependent: Vec<bool>,
}

impl TriangularForm {
    pub fn len(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.nrows() == 0
    }

    pub fn c(&self, i: usize, j: usize) -> Complex64 {
        self.coeffs[(i, j)]
    }

    /// `Σ_j c_ij ξ_j`.
    pub fn reconstruct(&self, i: usize) -> Vec<Complex64> {
        let dim = self.basis[0].dim();
        let mut out = vec![ZERO; dim];
        for j in 0..=i {
            let c = self.coeffs[(i, j)];
            for (o, x) in out.iter_mut().zip(self.basis[j].amplitudes()) {
                *o += c * x;
            }
        }
        out
    }
}

pub fn triangularize(states: &[PureState]) -> Result<TriangularForm> {
    let n = states.len();
    let first = states.first().ok_or(Error::InvalidCount(0, 1))?;
    let dim = first.dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: bad.dim(),
        });
    }
    if n > dim {
        return Err(Error::TooManyStates { states: n, dim });
    }

    let mut coeffs = CMatrix::zeros(n, n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut dependent = vec![false; n];
    for (i, s) in states.iter().enumerate() {
        let mut v = s.amplitudes().to_vec();
        let proj = orthogonalize(&mut v, &basis);
        for (j, c) in proj.into_iter().enumerate() {
            coeffs[(i, j)] = c;
        }
        let r = norm_sqr(&v).sqrt();
        if r < DEPENDENCE_TOLERANCE {
            dependent[i] = true;
            complete_basis(&mut basis, dim, i + 1);
        } else {
            for x in &mut v {
                *x /= r;
            }
            coeffs[(i, i)] = Complex64::new(r, 0.0);
            basis.push(v);
        }
    }
    let residual_rank = dependent.iter().filter(|d| !**d).count();
    Ok(TriangularForm {
        coeffs,
        basis: basis.into_iter().map(PureState::from_unit).collect(),
        residual_rank,
        dependent,
    })
}
