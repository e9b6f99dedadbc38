//! Schmidt spectra and entanglement entropies.
//!
//! Spectra are taken as eigenvalues of the smaller of the two reduced
//! density matrices of a cut; the squared Schmidt coefficients are the same
//! on either side.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig2, hermitian_eigenvalues, CMatrix, ZERO};
use crate::state::{Partition, PureState};

/// Eigenvalues below this contribute nothing to an entropy.
pub const SPECTRUM_FLOOR: f64 = 1e-15;

/// `-sum λ log2 λ` over the spectrum, ignoring entries below [`SPECTRUM_FLOOR`].
pub fn entropy_from_spectrum(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum
        .iter()
        .filter(|&&l| l >= SPECTRUM_FLOOR)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Reduced spectrum of the middle factor of a `hi x mid x lo` tensor view.
pub(crate) fn cut_spectrum(amps: &[Complex64], hi: usize, mid: usize, lo: usize) -> Vec<f64> {
    debug_assert_eq!(amps.len(), hi * mid * lo);
    let rest = hi * lo;
    let idx = |h: usize, i: usize, l: usize| (h * mid + i) * lo + l;
    if mid <= rest {
        if mid == 2 {
            let (mut a, mut c, mut b) = (0.0, 0.0, ZERO);
            for h in 0..hi {
                for l in 0..lo {
                    let x = amps[idx(h, 0, l)];
                    let y = amps[idx(h, 1, l)];
                    a += x.norm_sqr();
                    c += y.norm_sqr();
                    b += x * y.conj();
                }
            }
            return eig2(a, c, b.norm_sqr()).to_vec();
        }
        let rho = CMatrix::from_fn(mid, mid, |i, j| {
            let mut acc = ZERO;
            for h in 0..hi {
                for l in 0..lo {
                    acc += amps[idx(h, i, l)] * amps[idx(h, j, l)].conj();
                }
            }
            acc
        });
        hermitian_eigenvalues(&rho)
    } else {
        let rho = CMatrix::from_fn(rest, rest, |r, s| {
            let (h, l) = (r / lo, r % lo);
            let (h2, l2) = (s / lo, s % lo);
            let mut acc = ZERO;
            for i in 0..mid {
                acc += amps[idx(h, i, l)] * amps[idx(h2, i, l2)].conj();
            }
            acc
        });
        hermitian_eigenvalues(&rho)
    }
}

fn check_bipartite(state: &PureState, d1: usize, d2: usize) -> Result<()> {
    if d1 < 2 || d2 < 2 {
        return Err(Error::InvalidPartition(format!("({d1},{d2})")));
    }
    if d1 * d2 != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            actual: state.dim(),
        });
    }
    Ok(())
}

/// Squared Schmidt coefficients across the `(d1 | d2)` cut.
pub fn schmidt_spectrum(state: &PureState, d1: usize, d2: usize) -> Result<Vec<f64>> {
    check_bipartite(state, d1, d2)?;
    Ok(cut_spectrum(state.amplitudes(), 1, d1, d2))
}

/// Entanglement entropy in bits across the `(d1 | d2)` cut.
pub fn entanglement_entropy(state: &PureState, d1: usize, d2: usize) -> Result<f64> {
    Ok(entropy_from_spectrum(&schmidt_spectrum(state, d1, d2)?))
}

/// Purity `Tr ρ²` of either reduced state across the `(d1 | d2)` cut.
pub fn reduced_purity(state: &PureState, d1: usize, d2: usize) -> Result<f64> {
    Ok(schmidt_spectrum(state, d1, d2)?.iter().map(|l| l * l).sum())
}

/// Entropy of each subsystem against the rest of the system.
pub fn subsystem_entropies(state: &PureState, p: &Partition) -> Result<Vec<f64>> {
    p.check_dim(state.dim())?;
    Ok(subsystem_entropies_raw(state.amplitudes(), p))
}

pub(crate) fn subsystem_entropies_raw(amps: &[Complex64], p: &Partition) -> Vec<f64> {
    let f = p.factors();
    (0..f.len())
        .map(|m| {
            let hi: usize = f[..m].iter().product();
            let lo: usize = f[m + 1..].iter().product();
            entropy_from_spectrum(&cut_spectrum(amps, hi, f[m], lo))
        })
        .collect()
}

/// Sum of [`subsystem_entropies`] without validation; the optimizer's hot path.
pub(crate) fn subsystem_entropy_sum(amps: &[Complex64], p: &Partition) -> f64 {
    let f = p.factors();
    if f.len() == 2 {
        // both sides share one spectrum
        return 2.0 * entropy_from_spectrum(&cut_spectrum(amps, 1, f[0], f[1]));
    }
    subsystem_entropies_raw(amps, p).iter().sum()
}

/// Sum over subsystems of the linear entropy `1 - Tr ρ_m²`; smooth and
/// zero exactly on fully product states.
pub(crate) fn linear_entropy_sum(amps: &[Complex64], p: &Partition) -> f64 {
    let f = p.factors();
    let cuts = if f.len() == 2 { 1 } else { f.len() };
    let mut total = 0.0;
    for m in 0..cuts {
        let hi: usize = f[..m].iter().product();
        let lo: usize = f[m + 1..].iter().product();
        let spec = cut_spectrum(amps, hi, f[m], lo);
        let purity: f64 = spec.iter().map(|l| l * l).sum();
        total += 1.0 - purity;
    }
    if f.len() == 2 {
        2.0 * total
    } else {
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_random_state;
    use crate::linalg::{apply, haar_unitary, kron};
    use crate::rng::RunSeed;

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![h.into(), ZERO, ZERO, h.into()]).unwrap()
    }

    fn ghz3() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![ZERO; 8];
        v[0] = h.into();
        v[7] = h.into();
        PureState::new(v).unwrap()
    }

    /// SVD of the d1 x d2 reshape, independent of the reduced-state route.
    fn svd_entropy(state: &PureState, d1: usize, d2: usize) -> f64 {
        let m = CMatrix::from_fn(d1, d2, |i, j| state.amplitudes()[i * d2 + j]);
        let sv = m.svd(false, false).singular_values;
        let spec: Vec<f64> = sv.iter().map(|s| s * s).collect();
        entropy_from_spectrum(&spec)
    }

    #[test]
    fn product_and_bell() {
        let prod = PureState::basis(4, 0).unwrap();
        assert_eq!(entanglement_entropy(&prod, 2, 2).unwrap(), 0.0);
        assert!((entanglement_entropy(&bell(), 2, 2).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mismatched_dims() {
        let s = PureState::basis(6, 0).unwrap();
        assert!(entanglement_entropy(&s, 2, 2).is_err());
        let p: Partition = "2x2".parse().unwrap();
        assert!(subsystem_entropies(&s, &p).is_err());
    }

    #[test]
    fn matches_svd_oracle() {
        for (d1, d2) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 8), (4, 2)] {
            for i in 0..20 {
                let s = haar_random_state(d1 * d2, RunSeed::new(11, i)).unwrap();
                let a = entanglement_entropy(&s, d1, d2).unwrap();
                let b = svd_entropy(&s, d1, d2);
                assert!((a - b).abs() < 1e-12, "{d1}x{d2}: {a} vs {b}");
                assert!(a <= (d1.min(d2) as f64).log2() + 1e-12);
            }
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut stream = RunSeed::new(5, 0).stream();
        for (d1, d2) in [(2, 2), (2, 3), (3, 3)] {
            for i in 0..20 {
                let s = haar_random_state(d1 * d2, RunSeed::new(6, i)).unwrap();
                let v = kron(&haar_unitary(d1, &mut stream), &haar_unitary(d2, &mut stream));
                let t = PureState::from_unit(apply(&v, s.amplitudes()));
                let before = entanglement_entropy(&s, d1, d2).unwrap();
                let after = entanglement_entropy(&t, d1, d2).unwrap();
                assert!((before - after).abs() < 1e-10);
                assert!((after - svd_entropy(&t, d1, d2)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn subsystem_entropies_examples() {
        let p: Partition = "2x2x2".parse().unwrap();
        let prod = PureState::basis(8, 0).unwrap();
        assert_eq!(subsystem_entropies(&prod, &p).unwrap(), vec![0.0; 3]);
        for e in subsystem_entropies(&ghz3(), &p).unwrap() {
            assert!((e - 1.0).abs() < 1e-14);
        }
        let q: Partition = "2x2".parse().unwrap();
        for i in 0..20 {
            let s = haar_random_state(4, RunSeed::new(8, i)).unwrap();
            let e = subsystem_entropies(&s, &q).unwrap();
            assert!((e[0] - e[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn middle_subsystem_uses_both_routes() {
        // (3 | 2 x 2): subsystem 0 has d=3 < rest=4, subsystem of size 4 in
        // 2x4 partitions uses the complement route.
        let p: Partition = "2x4".parse().unwrap();
        for i in 0..10 {
            let s = haar_random_state(8, RunSeed::new(12, i)).unwrap();
            let e = subsystem_entropies(&s, &p).unwrap();
            assert!((e[0] - e[1]).abs() < 1e-10);
            assert!((e[0] - svd_entropy(&s, 2, 4)).abs() < 1e-10);
        }
    }

    #[test]
    fn linear_entropy_zero_on_products() {
        let p: Partition = "2x3x2".parse().unwrap();
        let s = PureState::basis(12, 5).unwrap();
        assert!(linear_entropy_sum(s.amplitudes(), &p).abs() < 1e-15);
        assert!(linear_entropy_sum(ghz3().amplitudes(), &"2x2x2".parse().unwrap()) > 0.4);
    }
}
