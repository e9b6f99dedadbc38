//! Pure states, tensor-factor partitions and ordered state sets.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Allowed deviation of the squared norm from one.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Unit-norm amplitude vector over the flat computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps `amplitudes`, rejecting vectors that are not unit norm within
    /// [`NORM_TOLERANCE`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(amplitudes.len()));
        }
        let n2 = norm_sqr(&amplitudes);
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes` and wraps them.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(amplitudes.len()));
        }
        let n = norm_sqr(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis ket with flat index `index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index + 1,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Unchecked constructor for vectors that are unit norm by construction.
    pub(crate) fn from_unit(amplitudes: Vec<Complex64>) -> Self {
        debug_assert!((norm_sqr(&amplitudes) - 1.0).abs() < 1e-9);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        PureState::from_unit(out)
    }
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// `<a|b>` with the first argument conjugated.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

/// Ordered tensor factorization `(d_1, ..., d_k)` of a Hilbert space.
///
/// Basis kets are indexed mixed-radix with subsystem 1 most significant:
/// digits `(i_1, ..., i_k)` (0-based here) map to
/// `sum_m i_m * prod_{m' > m} d_{m'}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    factors: Vec<usize>,
}

impl Partition {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "need at least two factors, got {factors:?}"
            )));
        }
        if let Some(&f) = factors.iter().find(|&&f| f < 2) {
            return Err(Error::InvalidPartition(format!(
                "factor {f} < 2 in {factors:?}"
            )));
        }
        factors
            .iter()
            .try_fold(1usize, |acc, &f| acc.checked_mul(f))
            .ok_or_else(|| Error::InvalidPartition("dimension overflows".into()))?;
        Ok(Self { factors })
    }

    pub fn bipartite(d1: usize, d2: usize) -> Result<Self> {
        Self::new(vec![d1, d2])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().product()
    }

    /// Product of the factors after position `m` (0-based).
    pub fn tail_product(&self, m: usize) -> usize {
        self.factors[m + 1..].iter().product()
    }

    /// Flat index of the basis ket with 0-based `digits`.
    pub fn flat_index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.factors.len());
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Inverse of [`Partition::flat_index`].
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &d) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: dim,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses `d1xd2x...`, e.g. `2x2x8`.
    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .split(['x', 'X'])
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidPartition(format!("cannot parse {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(factors)
    }
}

/// Ordered list of pure states of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    dim: usize,
    states: Vec<PureState>,
}

impl StateSet {
    pub fn new(states: Vec<PureState>) -> Result<Self> {
        let first = states.first().ok_or(Error::InvalidCount(0, 1))?;
        let dim = first.dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        Ok(Self { dim, states })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn get(&self, i: usize) -> Option<&PureState> {
        self.states.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PureState> {
        self.states.iter()
    }

    /// New set made of the states at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<StateSet> {
        let states = indices
            .iter()
            .map(|&i| {
                self.states.get(i).cloned().ok_or(Error::IndexOutOfRange { index: i, len: self.states.len() })
            })
            .collect::<Result<Vec<_>>>()?;
        StateSet::new(states)
    }

    pub fn into_states(self) -> Vec<PureState> {
        self.states
    }
}

impl<'a> IntoIterator for &'a StateSet {
    type Item = &'a PureState;
    type IntoIter = std::slice::Iter<'a, PureState>;

    fn into_iter(self) -> Self::IntoIter {
        self.states.iter()
    }
}
