//! Sufficient test for four two-qubit states to form an absolutely entangled
//! set, with the scan over orderings and the subset scan for larger sets.
//!
//! For an ordering `φ_1..φ_4` with triangular coefficients `c_ij`, the set is
//! certified when `c = min_{i=2,3,4} |c_i1|` exceeds `1 - 2/(L + 1)`, where
//!
//! ```text
//! L = 1 + (r32 + sqrt(r32² + 1))²
//!       + (r42 + r43 (r32 + sqrt(r32² + 1)) + sqrt(1 + r42² + r43²))²,
//! r_ij = |c_ij| / |c_ii|,
//! ```
//!
//! and `c_22 ≠ 0`. A failed test says nothing about the set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{inner, PureState, StateSet};
use crate::triangular::{triangularize, TriangularForm};

/// Diagonal magnitudes below this are treated as zero.
pub const DIAGONAL_TOLERANCE: f64 = 1e-12;

/// Below this pivot the Gram/Cholesky fast path defers to Gram–Schmidt.
const CHOLESKY_FALLBACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub detected: bool,
    /// Input indices in the order used (0-based).
    pub permutation: Vec<usize>,
    pub c: f64,
    #[serde(rename = "L", with = "crate::io::finite_or_inf")]
    pub l: f64,
    pub threshold: f64,
}

impl CriterionVerdict {
    /// `c - threshold`; positive exactly when the inequality holds.
    pub fn margin(&self) -> f64 {
        self.c - self.threshold
    }
}

type Moduli = [[f64; 4]; 4];

fn l_from_moduli(m: &Moduli) -> f64 {
    let (c33, c44) = (m[2][2], m[3][3]);
    if c33 < DIAGONAL_TOLERANCE || c44 < DIAGONAL_TOLERANCE {
        return f64::INFINITY;
    }
    let r32 = m[2][1] / c33;
    let r42 = m[3][1] / c44;
    let r43 = m[3][2] / c44;
    let x = r32 + (r32 * r32 + 1.0).sqrt();
    let y = r42 + r43 * x + (1.0 + r42 * r42 + r43 * r43).sqrt();
    1.0 + x * x + y * y
}

fn threshold_for(l: f64) -> f64 {
    if l.is_infinite() {
        1.0
    } else {
        1.0 - 2.0 / (l + 1.0)
    }
}

fn verdict_from_moduli(m: &Moduli, permutation: Vec<usize>) -> CriterionVerdict {
    let c = m[1][0].min(m[2][0]).min(m[3][0]);
    let l = l_from_moduli(m);
    let threshold = threshold_for(l);
    CriterionVerdict {
        detected: c > threshold && m[1][1] > DIAGONAL_TOLERANCE,
        permutation,
        c,
        l,
        threshold,
    }
}

fn moduli_of(tf: &TriangularForm) -> Moduli {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate().take(i + 1) {
            *x = tf.c(i, j).norm();
        }
    }
    m
}

/// `L` for a four-row triangular form; `+inf` when `c33` or `c44` vanishes.
pub fn compute_l(tf: &TriangularForm) -> Result<f64> {
    if tf.len() != 4 {
        return Err(Error::WrongRowCount {
            expected: 4,
            actual: tf.len(),
        });
    }
    Ok(l_from_moduli(&moduli_of(tf)))
}

fn check_four_in_c4(states: &[PureState]) -> Result<()> {
    if states.len() != 4 {
        return Err(Error::WrongRowCount {
            expected: 4,
            actual: states.len(),
        });
    }
    if let Some(bad) = states.iter().find(|s| s.dim() != 4) {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: bad.dim(),
        });
    }
    Ok(())
}

/// Evaluates the criterion for the states in the given order.
pub fn theorem1_check_ordering(states: &[PureState]) -> Result<CriterionVerdict> {
    check_four_in_c4(states)?;
    let tf = triangularize(states)?;
    Ok(verdict_from_moduli(&moduli_of(&tf), vec![0, 1, 2, 3]))
}

/// The 24 orderings of four items in lexicographic order.
pub fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Triangular moduli of one ordering via Cholesky of the permuted Gram
/// matrix; `None` when a pivot is too small to trust.
fn cholesky_moduli(gram: &[[num_complex::Complex64; 4]; 4], perm: &[usize; 4]) -> Option<Moduli> {
    use num_complex::Complex64;
    let mut ch = [[Complex64::new(0.0, 0.0); 4]; 4];
    let mut diag = [0.0f64; 4];
    for i in 0..4 {
        for j in 0..i {
            let mut acc = gram[perm[i]][perm[j]];
            for l in 0..j {
                acc -= ch[i][l] * ch[j][l].conj();
            }
            ch[i][j] = acc / diag[j];
        }
        let mut pivot = gram[perm[i]][perm[i]].re;
        for l in 0..i {
            pivot -= ch[i][l].norm_sqr();
        }
        let d = pivot.max(0.0).sqrt();
        if d < CHOLESKY_FALLBACK {
            return None;
        }
        diag[i] = d;
        ch[i][i] = Complex64::new(d, 0.0);
    }
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            m[i][j] = ch[i][j].norm();
        }
    }
    Some(m)
}

/// Runs the criterion over all 24 orderings (lexicographic). Returns the
/// first detecting verdict, otherwise the one with the largest margin
/// (first on ties).
pub fn theorem1_scan(states: &[PureState]) -> Result<CriterionVerdict> {
    check_four_in_c4(states)?;
    // gram[i][j] = <φ_j|φ_i>
    let mut gram = [[num_complex::Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            gram[i][j] = inner(states[j].amplitudes(), states[i].amplitudes());
        }
    }
    let mut best: Option<CriterionVerdict> = None;
    for perm in permutations4() {
        let verdict = match cholesky_moduli(&gram, &perm) {
            Some(m) => verdict_from_moduli(&m, perm.to_vec()),
            None => {
                let ordered: Vec<PureState> = perm.iter().map(|&i| states[i].clone()).collect();
                let tf = triangularize(&ordered)?;
                verdict_from_moduli(&moduli_of(&tf), perm.to_vec())
            }
        };
        if verdict.detected {
            return Ok(verdict);
        }
        if best.as_ref().is_none_or(|b| verdict.margin() > b.margin()) {
            best = Some(verdict);
        }
    }
    Ok(best.expect("24 orderings evaluated"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetReport {
    /// Strictly increasing 0-based indices into the set.
    pub subset: [usize; 4],
    pub verdict: CriterionVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetScan {
    pub reports: Vec<SubsetReport>,
    /// Every 4-subset certified; then at least `N - 3` states stay entangled
    /// under any global unitary.
    pub all_subsets_certified: bool,
}

impl SubsetScan {
    pub fn certified(&self) -> impl Iterator<Item = &SubsetReport> {
        self.reports.iter().filter(|r| r.verdict.detected)
    }
}

/// All 4-element index subsets of `0..n` in lexicographic order.
pub fn four_subsets(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

fn check_c4_set(set: &StateSet) -> Result<()> {
    if set.len() < 4 {
        return Err(Error::InvalidCount(set.len(), 4));
    }
    if set.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: set.dim(),
        });
    }
    Ok(())
}

fn subset_report(set: &StateSet, subset: [usize; 4]) -> Result<SubsetReport> {
    let states: Vec<PureState> = subset.iter().map(|&i| set.states()[i].clone()).collect();
    let mut verdict = theorem1_scan(&states)?;
    verdict.permutation = verdict.permutation.iter().map(|&i| subset[i]).collect();
    Ok(SubsetReport { subset, verdict })
}

/// Runs [`theorem1_scan`] on every 4-subset of a set in `C^4`. Reported
/// permutations index into the full set.
pub fn maximal_entangled_scan(set: &StateSet) -> Result<SubsetScan> {
    check_c4_set(set)?;
    let reports = four_subsets(set.len())
        .into_iter()
        .map(|s| subset_report(set, s))
        .collect::<Result<Vec<_>>>()?;
    let all_subsets_certified = reports.iter().all(|r| r.verdict.detected);
    Ok(SubsetScan {
        reports,
        all_subsets_certified,
    })
}

/// First certified 4-subset, if any. A set containing a certified subset
/// is itself absolutely entangled.
pub fn first_certified_subset(set: &StateSet) -> Result<Option<SubsetReport>> {
    check_c4_set(set)?;
    for s in four_subsets(set.len()) {
        let r = subset_report(set, s)?;
        if r.verdict.detected {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_random_state_set;
    use crate::linalg::{CMatrix, ZERO};
    use crate::rng::RunSeed;
    use num_complex::Complex64;

    fn special_set(c: f64) -> Vec<PureState> {
        let s = (1.0 - c * c).sqrt();
        let mut out = vec![PureState::basis(4, 0).unwrap()];
        for k in 1..4 {
            let mut v = vec![ZERO; 4];
            v[0] = c.into();
            v[k] = s.into();
            out.push(PureState::new(v).unwrap());
        }
        out
    }

    fn tf_with(entries: &[(usize, usize, f64)]) -> TriangularForm {
        let mut coeffs = CMatrix::zeros(4, 4);
        for &(i, j, x) in entries {
            coeffs[(i, j)] = Complex64::new(x, 0.0);
        }
        TriangularForm {
            coeffs,
            basis: (0..4).map(|i| PureState::basis(4, i).unwrap()).collect(),
            residual_rank: 4,
            dependent: vec![false; 4],
        }
    }

    #[test]
    fn l_of_zero_ratios_is_three() {
        let tf = tf_with(&[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0)]);
        assert!((compute_l(&tf).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn l_matches_hand_evaluation() {
        // r32 = 0.75, r42 = 0.5, r43 = 1: x = 0.75 + 1.25 = 2,
        // y = 0.5 + 2 + 1.5 = 4, L = 1 + 4 + 16
        let tf = tf_with(&[
            (0, 0, 1.0),
            (1, 1, 1.0),
            (2, 1, 0.6),
            (2, 2, 0.8),
            (3, 1, 0.2),
            (3, 2, 0.4),
            (3, 3, 0.4),
        ]);
        assert!((compute_l(&tf).unwrap() - 21.0).abs() < 1e-12);
    }

    #[test]
    fn l_infinite_when_c44_vanishes() {
        let tf = tf_with(&[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 2, 1.0)]);
        assert!(compute_l(&tf).unwrap().is_infinite());
        let mut states = special_set(0.9);
        states[3] = states[2].clone();
        let v = theorem1_check_ordering(&states).unwrap();
        assert!(v.l.is_infinite());
        assert_eq!(v.threshold, 1.0);
        assert!(!v.detected);
    }

    #[test]
    fn wrong_shapes() {
        let tf = crate::triangular::triangularize(&special_set(0.9)[..3]).unwrap();
        assert!(matches!(compute_l(&tf), Err(Error::WrongRowCount { .. })));
        let set = haar_random_state_set(6, 4, RunSeed::new(0, 0)).unwrap();
        assert!(theorem1_scan(set.states()).is_err());
        assert!(theorem1_check_ordering(&special_set(0.9)[..3]).is_err());
    }

    #[test]
    fn special_set_thresholds() {
        for (c, expect) in [(0.4, false), (0.51, true), (0.9, true)] {
            let v = theorem1_check_ordering(&special_set(c)).unwrap();
            assert!((v.l - 3.0).abs() < 1e-12);
            assert!((v.threshold - 0.5).abs() < 1e-12);
            assert_eq!(v.detected, expect, "c = {c}");
        }
    }

    #[test]
    fn orthogonal_and_product_bases_not_detected() {
        let basis: Vec<_> = (0..4).map(|i| PureState::basis(4, i).unwrap()).collect();
        let v = theorem1_check_ordering(&basis).unwrap();
        assert_eq!(v.c, 0.0);
        assert!(!v.detected);
        assert!(!theorem1_scan(&basis).unwrap().detected);
    }

    #[test]
    fn scan_detects_shuffled_special_set() {
        let s = special_set(0.9);
        let shuffled = vec![s[2].clone(), s[3].clone(), s[0].clone(), s[1].clone()];
        let v = theorem1_scan(&shuffled).unwrap();
        assert!(v.detected);
        assert_eq!(v.permutation[0], 2);
    }

    #[test]
    fn fast_scan_agrees_with_gram_schmidt_route() {
        for seed in 0..300 {
            let set = haar_random_state_set(4, 4, RunSeed::new(seed, 5)).unwrap();
            let fast = theorem1_scan(set.states()).unwrap();
            let ordered: Vec<PureState> =
                fast.permutation.iter().map(|&i| set.states()[i].clone()).collect();
            let slow = theorem1_check_ordering(&ordered).unwrap();
            assert_eq!(fast.detected, slow.detected);
            assert!((fast.c - slow.c).abs() < 1e-12);
            assert!((fast.l - slow.l).abs() < 1e-9 * slow.l);
            let brute = permutations4()
                .iter()
                .map(|p| {
                    let o: Vec<PureState> = p.iter().map(|&i| set.states()[i].clone()).collect();
                    theorem1_check_ordering(&o).unwrap().detected
                })
                .any(|d| d);
            assert_eq!(brute, fast.detected);
        }
    }

    #[test]
    fn permutation_list() {
        let p = permutations4();
        assert_eq!(p.len(), 24);
        assert_eq!(p[0], [0, 1, 2, 3]);
        assert_eq!(p[23], [3, 2, 1, 0]);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(four_subsets(5).len(), 5);
        assert_eq!(four_subsets(4), vec![[0, 1, 2, 3]]);
    }

    #[test]
    fn subset_scan_of_four_is_plain_scan() {
        let set = StateSet::new(special_set(0.9)).unwrap();
        let scan = maximal_entangled_scan(&set).unwrap();
        assert_eq!(scan.reports.len(), 1);
        assert!(scan.all_subsets_certified);
        assert_eq!(scan.reports[0].verdict, theorem1_scan(set.states()).unwrap());
        let three = set.select(&[0, 1, 2]).unwrap();
        assert!(matches!(
            maximal_entangled_scan(&three),
            Err(Error::InvalidCount(3, 4))
        ));
    }
}
