//! Product-state tests and the constructive disentangling unitary.
//!
//! A pure state is product across a cut iff its reshaped amplitude matrix
//! has rank one. The numerical test uses the second-largest Schmidt
//! coefficient (singular value) of the reshape. The cross-ratio form
//! `a_{r c} a_{n j} = a_{r j} a_{n c}` is available as
//! [`cross_ratio_residual`]; both vanish on exactly the same states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    apply, complete_basis, from_columns, haar_unitary, kron, unitarity_residual, CMatrix,
    ONE, ZERO,
};
use crate::rng::RunSeed;
use crate::state::{norm_sqr, Partition, PureState, StateSet};
use crate::triangular::triangularize;

/// Default tolerance on the Schmidt residual.
pub const PRODUCT_TOLERANCE: f64 = 1e-9;

/// Entrywise tolerance on `U^† U = I`.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// A `d x d` unitary matrix. Global phase is irrelevant everywhere it is used.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: CMatrix,
}

impl Unitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let r = unitarity_residual(&matrix);
        if !(r <= UNITARITY_TOLERANCE) {
            return Err(Error::NotUnitary(r));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    /// Haar-random unitary drawn from `seed`.
    pub fn haar(dim: usize, seed: RunSeed) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            matrix: haar_unitary(dim, &mut seed.stream()),
        })
    }

    /// Random product of Haar-random local unitaries `V_1 ⊗ ... ⊗ V_k`.
    pub fn haar_local(p: &Partition, seed: RunSeed) -> Self {
        let mut stream = seed.stream();
        let matrix = p
            .factors()
            .iter()
            .map(|&d| haar_unitary(d, &mut stream))
            .reduce(|a, b| kron(&a, &b))
            .expect("partition has factors");
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &Unitary) -> Unitary {
        Unitary {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: state.dim(),
            });
        }
        PureState::normalized(apply(&self.matrix, state.amplitudes()))
    }

    pub fn apply_set(&self, set: &StateSet) -> Result<StateSet> {
        StateSet::new(set.iter().map(|s| self.apply(s)).collect::<Result<Vec<_>>>()?)
    }
}

/// Outcome of a product-state test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductVerdict {
    pub is_product: bool,
    /// Second-largest Schmidt coefficient (largest over cuts for
    /// multipartitions).
    pub residual: f64,
}

impl ProductVerdict {
    fn from_residual(residual: f64, tol: f64) -> Self {
        Self {
            is_product: residual < tol,
            residual,
        }
    }
}

/// Singular values of the `rows x cols` reshape, largest first.
pub fn schmidt_coefficients(amps: &[Complex64], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert_eq!(amps.len(), rows * cols);
    let m = CMatrix::from_fn(rows, cols, |i, j| amps[i * cols + j]);
    let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn second_schmidt(amps: &[Complex64], rows: usize, cols: usize) -> f64 {
    schmidt_coefficients(amps, rows, cols)
        .get(1)
        .copied()
        .unwrap_or(0.0)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    Ok(())
}

pub fn is_product_bipartite(
    state: &PureState,
    d1: usize,
    d2: usize,
    tol: f64,
) -> Result<ProductVerdict> {
    check_tol(tol)?;
    Partition::bipartite(d1, d2)?.check_dim(state.dim())?;
    Ok(ProductVerdict::from_residual(
        second_schmidt(state.amplitudes(), d1, d2),
        tol,
    ))
}

/// Largest violation of the 2x2-minor conditions of the `d1 x d2` reshape
/// anchored at the largest-magnitude amplitude. With the anchor at the first
/// amplitude these are `a_1 a_{n d2 + k} = a_k a_{n d2 + 1}`.
pub fn cross_ratio_residual(state: &PureState, d1: usize, d2: usize) -> Result<f64> {
    Partition::bipartite(d1, d2)?.check_dim(state.dim())?;
    let a = state.amplitudes();
    let (pivot, _) = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
        .expect("nonempty state");
    let (r, c) = (pivot / d2, pivot % d2);
    let mut worst = 0.0f64;
    for n in 0..d1 {
        for j in 0..d2 {
            let v = a[r * d2 + c] * a[n * d2 + j] - a[r * d2 + j] * a[n * d2 + c];
            worst = worst.max(v.norm());
        }
    }
    Ok(worst)
}

/// Schmidt residual of each contiguous cut `(d_1..d_m | d_{m+1}..d_k)`.
///
/// A state is fully product iff it is product across every such cut: the
/// first cut splits off `d_1`, the next splits `d_2` from the remainder, and
/// so on.
pub fn cut_residuals(state: &PureState, p: &Partition) -> Result<Vec<f64>> {
    p.check_dim(state.dim())?;
    let f = p.factors();
    let mut left = 1;
    Ok((0..f.len() - 1)
        .map(|m| {
            left *= f[m];
            second_schmidt(state.amplitudes(), left, p.dim() / left)
        })
        .collect())
}

pub fn is_fully_product(state: &PureState, p: &Partition, tol: f64) -> Result<ProductVerdict> {
    check_tol(tol)?;
    let residual = cut_residuals(state, p)?.into_iter().fold(0.0, f64::max);
    Ok(ProductVerdict::from_residual(residual, tol))
}

/// Product basis ket with 0-based `digits` except that factor `slot` holds
/// the vector `local` instead of a basis ket.
fn embed(p: &Partition, digits: &[usize], slot: usize, local: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; p.dim()];
    let mut dg = digits.to_vec();
    for (i, &x) in local.iter().enumerate() {
        dg[slot] = i;
        out[p.flat_index(&dg)] = x;
    }
    out
}

/// Global unitary mapping every state of a set of at most `d' + 1` states
/// (`d'` the largest factor) to a fully product state.
///
/// The first `d'` states are expanded in a Gram–Schmidt basis `ξ_j`; `ξ_j`
/// is sent to `|j⟩` on the largest factor with `|1⟩` everywhere else. The
/// last state is `αΨ + βξ_{d'+1}` with `Ψ` in the span of the earlier `ξ`;
/// `ξ_{d'+1}` is sent to `|ψ⟩|2⟩|1…1⟩` where `|ψ⟩` is the image of `Ψ` on the
/// largest factor and `|2⟩` sits on one other factor, so the last image is
/// `|ψ⟩(α|1⟩ + β|2⟩)|1…1⟩`. The remaining basis vectors are completed
/// arbitrarily.
pub fn disentangling_unitary(set: &StateSet, p: &Partition) -> Result<Unitary> {
    p.check_dim(set.dim())?;
    let f = p.factors();
    let (big, &dmax) = f
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("partition has factors");
    let n = set.len();
    if n > dmax + 1 {
        return Err(Error::BoundExceeded {
            states: n,
            bound: dmax + 1,
        });
    }
    let other = if big == 0 { 1 } else { 0 };
    let dim = p.dim();

    let tf = triangularize(set.states())?;
    let mut sources: Vec<Vec<Complex64>> =
        tf.basis.iter().map(|b| b.amplitudes().to_vec()).collect();
    let zeros = vec![0usize; f.len()];
    let mut targets: Vec<Vec<Complex64>> = (0..n.min(dmax))
        .map(|j| {
            let mut dg = zeros.clone();
            dg[big] = j;
            let mut v = vec![ZERO; dim];
            v[p.flat_index(&dg)] = ONE;
            v
        })
        .collect();
    if n == dmax + 1 {
        let last = n - 1;
        let head: Vec<Complex64> = (0..dmax).map(|j| tf.c(last, j)).collect();
        let alpha = norm_sqr(&head).sqrt();
        let psi: Vec<Complex64> = if alpha < 1e-12 {
            // Ψ arbitrary: take ξ_1, whose image is |1⟩ on the big factor
            let mut e = vec![ZERO; dmax];
            e[0] = ONE;
            e
        } else {
            head.iter().map(|c| c / alpha).collect()
        };
        let mut dg = zeros.clone();
        dg[other] = 1;
        targets.push(embed(p, &dg, big, &psi));
    }

    complete_basis(&mut sources, dim, dim);
    complete_basis(&mut targets, dim, dim);
    let x = from_columns(&sources, dim);
    let t = from_columns(&targets, dim);
    Unitary::new(t * x.adjoint())
}

/// For a fully product `v = v_1 ⊗ … ⊗ v_k`, the local factors (up to phase).
pub fn product_factors(v: &[Complex64], p: &Partition) -> Vec<Vec<Complex64>> {
    let (pivot, _) = v
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
        .expect("nonempty vector");
    let base = p.digits(pivot);
    p.factors()
        .iter()
        .enumerate()
        .map(|(m, &d)| {
            let mut dg = base.clone();
            let mut u: Vec<Complex64> = (0..d)
                .map(|i| {
                    dg[m] = i;
                    v[p.flat_index(&dg)]
                })
                .collect();
            let n = norm_sqr(&u).sqrt();
            for x in &mut u {
                *x /= n;
            }
            u
        })
        .collect()
}

/// Local unitary `W = W_1 ⊗ … ⊗ W_k` with `W · state = e^{iθ} |1…1⟩` for a
/// fully product `state`.
pub fn local_alignment(state: &PureState, p: &Partition) -> Result<Unitary> {
    p.check_dim(state.dim())?;
    let verdict = is_fully_product(state, p, PRODUCT_TOLERANCE)?;
    if !verdict.is_product {
        return Err(Error::Degenerate(format!(
            "state is not fully product (residual {:e})",
            verdict.residual
        )));
    }
    let matrix = product_factors(state.amplitudes(), p)
        .into_iter()
        .map(|u| {
            let d = u.len();
            let mut basis = vec![u];
            complete_basis(&mut basis, d, d);
            from_columns(&basis, d).adjoint()
        })
        .reduce(|a, b| kron(&a, &b))
        .expect("partition has factors");
    Ok(Unitary::from_matrix_unchecked(matrix))
}
