//! Explicit absolutely entangled families and their overlap thresholds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criterion::{four_subsets, theorem1_scan};
use crate::error::{Error, Result};
use crate::linalg::ZERO;
use crate::rng::RunSeed;
use crate::state::{Partition, PureState, StateSet};

fn check_open_unit(name: &'static str, a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter {
            name,
            value: a,
            range: "(0, 1)",
        });
    }
    Ok(())
}

/// `d_1 + … + d_k - k + 2`.
pub fn theorem4_size(p: &Partition) -> usize {
    p.factors().iter().sum::<usize>() - p.k() + 2
}

/// `φ_1 = |ξ_1⟩`, `φ_i = a|ξ_1⟩ + sqrt(1 - a²)|ξ_i⟩` for `i = 2..N` with
/// `N = Σ d_i - k + 2` and `ξ` the computational basis.
pub fn theorem4_states(p: &Partition, a: f64) -> Result<StateSet> {
    check_open_unit("a", a)?;
    let n = theorem4_size(p);
    let d = p.dim();
    if n > d {
        return Err(Error::TooManyStates { states: n, dim: d });
    }
    overlap_family(d, n, a)
}

/// The `d_1 + d_2` state family for a bipartition.
pub fn special_set(d1: usize, d2: usize, c: f64) -> Result<StateSet> {
    theorem4_states(&Partition::bipartite(d1, d2)?, c)
}

fn overlap_family(d: usize, n: usize, a: f64) -> Result<StateSet> {
    let s = (1.0 - a * a).sqrt();
    let mut states = vec![PureState::basis(d, 0)?];
    for i in 1..n {
        let mut v = vec![ZERO; d];
        v[0] = a.into();
        v[i] = s.into();
        states.push(PureState::normalized(v)?);
    }
    StateSet::new(states)
}

/// Overlap threshold data for one partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AminReport {
    pub partition: Vec<usize>,
    pub n: usize,
    /// `D_i = Σ_{j>i} (d_j - 1) + (k - 1 - i)/(k - 1)` for `i = 1..k-1`.
    pub d: Vec<f64>,
    /// `sqrt((d_i - 1) D_i / ((d_i - 1 + 1/(k-1)) (D_i + 1/(k-1))))`.
    pub terms: Vec<f64>,
    /// Largest term: the guaranteed threshold.
    pub amin_max: f64,
    /// Smallest term.
    pub amin_min: f64,
}

pub fn theorem4_amin(p: &Partition) -> AminReport {
    let f = p.factors();
    let k = f.len();
    let e = 1.0 / (k - 1) as f64;
    let mut ds = Vec::with_capacity(k - 1);
    let mut terms = Vec::with_capacity(k - 1);
    for i in 1..k {
        let tail: usize = f[i..].iter().map(|d| d - 1).sum();
        let di = tail as f64 + (k - 1 - i) as f64 * e;
        let m = (f[i - 1] - 1) as f64;
        ds.push(di);
        terms.push((m * di / ((m + e) * (di + e))).sqrt());
    }
    let amin_max = terms.iter().copied().fold(f64::MIN, f64::max);
    let amin_min = terms.iter().copied().fold(f64::MAX, f64::min);
    AminReport {
        partition: f.to_vec(),
        n: theorem4_size(p),
        d: ds,
        terms,
        amin_max,
        amin_min,
    }
}

/// All factorizations of `d` into at least two factors `≥ 2`, each in
/// nondecreasing order; sorted by length, then lexicographically.
pub fn multiplicative_partitions(d: usize) -> Result<Vec<Vec<usize>>> {
    fn rec(rest: usize, min: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 1 {
            if prefix.len() >= 2 {
                out.push(prefix.clone());
            }
            return;
        }
        let mut f = min;
        while f <= rest {
            if rest % f == 0 {
                prefix.push(f);
                rec(rest / f, f, prefix, out);
                prefix.pop();
            }
            f += 1;
        }
    }
    let mut out = Vec::new();
    if d >= 4 {
        rec(d, 2, &mut Vec::new(), &mut out);
    }
    if out.is_empty() {
        return Err(Error::NoPartition(d));
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AminTable {
    pub d: usize,
    pub rows: Vec<AminReport>,
    /// Largest set size over all partitions.
    pub all_n: usize,
    /// Largest `amin_max` over all partitions.
    pub all_amin_max: f64,
    /// Largest `amin_min` over all partitions.
    pub all_amin_min: f64,
}

/// One [`AminReport`] per factorization of `d`, plus the figures for a set
/// that works for every partition at once.
pub fn amin_table(d: usize) -> Result<AminTable> {
    let rows: Vec<AminReport> = multiplicative_partitions(d)?
        .into_iter()
        .map(|f| Partition::new(f).map(|p| theorem4_amin(&p)))
        .collect::<Result<_>>()?;
    Ok(AminTable {
        d,
        all_n: rows.iter().map(|r| r.n).max().unwrap_or(0),
        all_amin_max: rows.iter().map(|r| r.amin_max).fold(0.0, f64::max),
        all_amin_min: rows.iter().map(|r| r.amin_min).fold(0.0, f64::max),
        rows,
    })
}

/// Bipartite overlap bound for a family of `n` states: the smallest `a` at
/// which the block-sum condition can still be met,
/// `sqrt((d1 - 1)(d2 - 1) / ((n - d1)(n - d2)))`. Equals the `a_min` of
/// [`theorem4_amin`] at `n = d1 + d2` and `1/sqrt(d)` at `n = d1 d2`.
pub fn bipartite_bound_for_size(d1: usize, d2: usize, n: usize) -> Result<f64> {
    if d1 < 2 || d2 < 2 {
        return Err(Error::InvalidDimension(d1.min(d2)));
    }
    if n < d1 + d2 || n > d1 * d2 {
        return Err(Error::Unsupported(format!(
            "set size {n} outside [{}, {}]",
            d1 + d2,
            d1 * d2
        )));
    }
    let num = ((d1 - 1) * (d2 - 1)) as f64;
    let den = ((n - d1) * (n - d2)) as f64;
    Ok((num / den).sqrt())
}

/// Default tolerance on `|det|` for coplanarity of four sphere points.
pub const COPLANARITY_TOLERANCE: f64 = 1e-3;

/// Points on the unit sphere, every four of which span a tetrahedron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoints {
    pub points: Vec<[f64; 3]>,
    pub min_tetra_det: f64,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `|det|` of the 4x4 matrix with rows `(x, y, z, 1)`.
pub fn tetra_det(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> f64 {
    dot(sub(b, a), cross(sub(c, a), sub(d, a))).abs()
}

impl SpherePoints {
    /// Validates unit norms (1e-12) and general position at `tol`.
    pub fn new(points: Vec<[f64; 3]>, tol: f64) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::InvalidCount(points.len(), 4));
        }
        if let Some(p) = points.iter().find(|p| (dot(**p, **p).sqrt() - 1.0).abs() > 1e-12) {
            return Err(Error::Degenerate(format!("point {p:?} is not on the unit sphere")));
        }
        let mut min = f64::INFINITY;
        for [a, b, c, d] in four_subsets(points.len()) {
            min = min.min(tetra_det(points[a], points[b], points[c], points[d]));
        }
        if min < tol {
            return Err(Error::Degenerate(format!(
                "four points are coplanar (|det| = {min:e} < {tol:e})"
            )));
        }
        Ok(Self {
            points,
            min_tetra_det: min,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Consecutive rejected candidates after which the point search gives up.
const MAX_REJECTIONS: usize = 100_000;

/// `n` uniform points on the unit sphere (normalized 3D Gaussians); a
/// candidate that would make any four points nearly coplanar is redrawn.
pub fn sphere_points_general_position(n: usize, seed: RunSeed, tol: f64) -> Result<SpherePoints> {
    if n < 4 {
        return Err(Error::InvalidCount(n, 4));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    let mut stream = seed.stream();
    let mut pts: Vec<[f64; 3]> = Vec::with_capacity(n);
    let mut rejected = 0;
    while pts.len() < n {
        if rejected >= MAX_REJECTIONS {
            return Err(Error::Degenerate(format!(
                "no position for point {} with |det| >= {tol:e}",
                pts.len() + 1
            )));
        }
        let g = [stream.normal(), stream.normal(), stream.normal()];
        let r = dot(g, g).sqrt();
        if r < 1e-12 {
            continue;
        }
        let cand = [g[0] / r, g[1] / r, g[2] / r];
        let m = pts.len();
        let mut ok = true;
        'outer: for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    if tetra_det(pts[i], pts[j], pts[k], cand) < tol {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            pts.push(cand);
            rejected = 0;
        } else {
            rejected += 1;
        }
    }
    SpherePoints::new(pts, tol)
}

/// `φ_i = a|ξ_0⟩ + sqrt(1 - a²)(v_i1|ξ_1⟩ + v_i2|ξ_2⟩ + v_i3|ξ_3⟩)` in `C^4`.
pub fn theorem2_states(pts: &SpherePoints, a: f64) -> Result<StateSet> {
    check_open_unit("a", a)?;
    let s = (1.0 - a * a).sqrt();
    let states = pts
        .points
        .iter()
        .map(|v| {
            PureState::normalized(vec![
                a.into(),
                (s * v[0]).into(),
                (s * v[1]).into(),
                (s * v[2]).into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    StateSet::new(states)
}

/// Five two-qubit states; the fifth is `b|ξ_1⟩ + sqrt((1 - b²)/3)(|ξ_2⟩ + |ξ_3⟩ + |ξ_4⟩)`.
pub fn n5_symmetric_set(b: f64) -> Result<StateSet> {
    check_open_unit("b", b)?;
    let mut states = overlap_family(4, 4, b)?.into_states();
    let t = ((1.0 - b * b) / 3.0).sqrt();
    states.push(PureState::normalized(vec![
        b.into(),
        t.into(),
        t.into(),
        t.into(),
    ])?);
    StateSet::new(states)
}

/// Default bisection resolution.
pub const DEFAULT_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetCritical {
    pub subset: [usize; 4],
    pub critical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSearch {
    pub per_subset: Vec<SubsetCritical>,
    /// Smallest parameter at which every requested subset is certified.
    pub critical: f64,
    pub resolution: f64,
}

fn certified<F>(family: &F, subset: &[usize; 4], a: f64) -> Result<bool>
where
    F: Fn(f64) -> Result<StateSet>,
{
    let set = family(a)?;
    let states: Vec<PureState> = subset
        .iter()
        .map(|&i| {
            set.get(i).cloned().ok_or(Error::IndexOutOfRange { index: i, len: set.len() })
        })
        .collect::<Result<_>>()?;
    Ok(theorem1_scan(&states)?.detected)
}

/// Bisection for the smallest parameter in `(0, 1)` at which each subset of
/// the family passes [`theorem1_scan`]. Assumes detection is monotone in
/// the parameter.
pub fn critical_a_search<F>(family: F, subsets: &[[usize; 4]], resolution: f64) -> Result<CriticalSearch>
where
    F: Fn(f64) -> Result<StateSet>,
{
    if !(resolution > 0.0 && resolution < 0.5) {
        return Err(Error::InvalidParameter {
            name: "resolution",
            value: resolution,
            range: "(0, 0.5)",
        });
    }
    if subsets.is_empty() {
        return Err(Error::InvalidCount(0, 1));
    }
    let mut per_subset = Vec::with_capacity(subsets.len());
    for subset in subsets {
        let mut hi = 1.0 - resolution;
        if !certified(&family, subset, hi)? {
            return Err(Error::NotFound(hi));
        }
        let mut lo = resolution;
        let critical = if certified(&family, subset, lo)? {
            lo
        } else {
            while hi - lo > resolution {
                let mid = 0.5 * (lo + hi);
                if certified(&family, subset, mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        per_subset.push(SubsetCritical {
            subset: *subset,
            critical,
        });
    }
    let critical = per_subset.iter().map(|s| s.critical).fold(0.0, f64::max);
    Ok(CriticalSearch {
        per_subset,
        critical,
        resolution,
    })
}

/// Limit of the criterion threshold `1 - 2/(L + 1)` for the tetrahedron
/// family as `a → 1`, for the four points of `subset` taken in that order.
///
/// With `u_i = v_i - v_0` normalized and `U_ij = ⟨u'_j|u_i⟩` from
/// Gram–Schmidt on `u_1, u_2, u_3`,
/// `L' = 1 + ((|U21| + 1)/|U22|)² + (|U31|/|U33| + |U32|/|U33| (|U21| + 1)/|U22| + 1/|U33|)²`.
pub fn theorem2_asymptotic_threshold(pts: &SpherePoints, subset: [usize; 4]) -> Result<f64> {
    let p = |i: usize| pts.points.get(i).copied().ok_or(Error::IndexOutOfRange { index: i, len: pts.len() });
    let v0 = p(subset[0])?;
    let mut u = Vec::with_capacity(3);
    for &i in &subset[1..] {
        let w = sub(p(i)?, v0);
        let n = dot(w, w).sqrt();
        if n < 1e-12 {
            return Err(Error::Degenerate("repeated point".into()));
        }
        u.push([w[0] / n, w[1] / n, w[2] / n]);
    }
    let scale = |a: [f64; 3], s: f64| [a[0] * s, a[1] * s, a[2] * s];
    let e1 = u[0];
    let u21 = dot(e1, u[1]);
    let r2 = sub(u[1], scale(e1, u21));
    let u22 = dot(r2, r2).sqrt();
    if u22 < 1e-12 {
        return Err(Error::Degenerate("U22 vanishes".into()));
    }
    let e2 = scale(r2, 1.0 / u22);
    let u31 = dot(e1, u[2]);
    let u32 = dot(e2, u[2]);
    let r3 = sub(sub(u[2], scale(e1, u31)), scale(e2, u32));
    let u33 = dot(r3, r3).sqrt();
    if u33 < 1e-12 {
        return Err(Error::Degenerate("U33 vanishes".into()));
    }
    let x = (u21.abs() + 1.0) / u22;
    let y = u31.abs() / u33 + u32.abs() / u33 * x + 1.0 / u33;
    let l = 1.0 + x * x + y * y;
    Ok(1.0 - 2.0 / (l + 1.0))
}

/// Complex helper used in tests and the CLI: `⟨φ_i|φ_j⟩`.
pub fn overlap(set: &StateSet, i: usize, j: usize) -> Complex64 {
    set.states()[i].inner(&set.states()[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::{maximal_entangled_scan, theorem1_check_ordering};

    #[test]
    fn theorem4_states_shapes() {
        let p: Partition = "2x2".parse().unwrap();
        let set = theorem4_states(&p, 0.9).unwrap();
        assert_eq!(set.len(), 4);
        let s = (1.0 - 0.81f64).sqrt();
        assert!((overlap(&set, 1, 2).re - 0.81).abs() < 1e-15);
        assert!((set.states()[3].amplitudes()[3].re - s).abs() < 1e-15);
        let p5: Partition = "2x2x2x2x2".parse().unwrap();
        let big = theorem4_states(&p5, 0.9).unwrap();
        assert_eq!((big.len(), big.dim()), (7, 32));
        assert!(theorem4_states(&p, 1.0).is_err());
        assert!(theorem4_states(&p, 0.0).is_err());
    }

    #[test]
    fn amin_examples() {
        let r = theorem4_amin(&"2x16".parse().unwrap());
        assert!((r.amin_max - (15.0f64 / 32.0).sqrt()).abs() < 1e-15);
        assert!((r.amin_max - 0.685).abs() < 5e-4);
        let r = theorem4_amin(&"4x8".parse().unwrap());
        assert!((r.amin_max - (21.0f64 / 32.0).sqrt()).abs() < 1e-15);
        assert_eq!(theorem4_amin(&"2x2".parse().unwrap()).amin_max, 0.5);
        let r = theorem4_amin(&"2x2x8".parse().unwrap());
        assert_eq!(r.d, vec![8.5, 7.0]);
        assert_eq!(r.n, 11);
    }

    #[test]
    fn partitions_enumeration() {
        assert_eq!(
            multiplicative_partitions(32).unwrap(),
            vec![
                vec![2, 16],
                vec![4, 8],
                vec![2, 2, 8],
                vec![2, 4, 4],
                vec![2, 2, 2, 4],
                vec![2, 2, 2, 2, 2]
            ]
        );
        assert_eq!(multiplicative_partitions(4).unwrap(), vec![vec![2, 2]]);
        assert_eq!(
            multiplicative_partitions(12).unwrap(),
            vec![vec![2, 6], vec![3, 4], vec![2, 2, 3]]
        );
        assert_eq!(multiplicative_partitions(7), Err(Error::NoPartition(7)));
        assert_eq!(multiplicative_partitions(2), Err(Error::NoPartition(2)));
    }

    /// Brute force: every nondecreasing tuple of divisors with product d.
    fn brute_partitions(d: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(t) = stack.pop() {
            let prod: usize = t.iter().product();
            if prod == d && t.len() >= 2 {
                out.push(t.clone());
            }
            let start = *t.last().unwrap_or(&2);
            for f in start..=d {
                if prod * f <= d && d % (prod * f) == 0 {
                    let mut u = t.clone();
                    u.push(f);
                    stack.push(u);
                }
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    #[test]
    fn partitions_match_brute_force() {
        for d in 4..=96 {
            let brute = brute_partitions(d);
            match multiplicative_partitions(d) {
                Ok(p) => assert_eq!(p, brute, "d = {d}"),
                Err(_) => assert!(brute.is_empty(), "d = {d}"),
            }
        }
    }

    #[test]
    fn small_tables() {
        let t = amin_table(4).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!((t.rows[0].n, t.rows[0].amin_max), (4, 0.5));
        let t = amin_table(6).unwrap();
        assert_eq!(t.rows[0].partition, vec![2, 3]);
        assert_eq!(t.rows[0].n, 5);
        assert!((t.rows[0].amin_max - (2.0f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!(amin_table(13).is_err());
    }

    #[test]
    fn bipartite_bound_decreases_to_inverse_sqrt_d() {
        for (d1, d2) in [(2, 3), (3, 3), (2, 8), (4, 5)] {
            let amin = theorem4_amin(&Partition::bipartite(d1, d2).unwrap()).amin_max;
            let first = bipartite_bound_for_size(d1, d2, d1 + d2).unwrap();
            assert!((first - amin).abs() < 1e-12);
            let mut prev = first;
            for n in d1 + d2 + 1..=d1 * d2 {
                let b = bipartite_bound_for_size(d1, d2, n).unwrap();
                assert!(b < prev);
                prev = b;
            }
            assert!((prev - 1.0 / ((d1 * d2) as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_points() {
        let pts = sphere_points_general_position(10, RunSeed::new(1, 0), 1e-3).unwrap();
        assert_eq!(pts.len(), 10);
        let mut count = 0;
        for [a, b, c, d] in four_subsets(10) {
            assert!(tetra_det(pts.points[a], pts.points[b], pts.points[c], pts.points[d]) >= 1e-3);
            count += 1;
        }
        assert_eq!(count, 210);
        for p in &pts.points {
            assert!((dot(*p, *p) - 1.0).abs() < 1e-12);
        }
        let four = sphere_points_general_position(4, RunSeed::new(2, 0), 1e-3).unwrap();
        assert!(four.min_tetra_det >= 1e-3);
    }

    #[test]
    fn unattainable_tolerance_fails() {
        // |det| is at most 16/(3 sqrt 3), about 3.08, for the regular tetrahedron
        let r = sphere_points_general_position(5, RunSeed::new(1, 0), 3.5);
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn coplanar_points_rejected() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // four points on the equator
        let pts = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [h, -h, 0.0]];
        assert!(matches!(SpherePoints::new(pts, 1e-3), Err(Error::Degenerate(_))));
        assert!(SpherePoints::new(vec![[2.0, 0.0, 0.0]; 4], 1e-3).is_err());
    }

    #[test]
    fn theorem2_overlaps() {
        let pts = sphere_points_general_position(6, RunSeed::new(3, 0), 1e-3).unwrap();
        let a = 0.7;
        let set = theorem2_states(&pts, a).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = a * a + (1.0 - a * a) * dot(pts.points[i], pts.points[j]);
                assert!((overlap(&set, i, j).re - expect).abs() < 1e-14);
            }
        }
        let near = theorem2_states(&pts, 1.0 - 1e-9).unwrap();
        assert!((overlap(&near, 0, 5).norm() - 1.0).abs() < 1e-8);
        assert!(theorem2_states(&pts, 1.5).is_err());
    }

    #[test]
    fn n5_set() {
        let b = 0.9;
        let set = n5_symmetric_set(b).unwrap();
        assert_eq!(set.len(), 5);
        let expect = b * b + (1.0 - b * b) / 3f64.sqrt();
        assert!((overlap(&set, 1, 4).re - expect).abs() < 1e-14);
        assert!(maximal_entangled_scan(&set).unwrap().all_subsets_certified);
        assert!(n5_symmetric_set(1.0).is_err());
    }

    #[test]
    fn critical_search_for_special_set() {
        let r = critical_a_search(|c| special_set(2, 2, c), &[[0, 1, 2, 3]], 1e-3).unwrap();
        assert!((r.critical - 0.5).abs() < 0.005, "{}", r.critical);
    }

    #[test]
    fn critical_search_not_found() {
        // the computational basis never passes
        let basis = |_a: f64| {
            StateSet::new((0..4).map(|i| PureState::basis(4, i).unwrap()).collect())
        };
        assert!(matches!(
            critical_a_search(basis, &[[0, 1, 2, 3]], 1e-2),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn regular_tetrahedron_limit() {
        let s = 1.0 / 3f64.sqrt();
        let pts = SpherePoints::new(
            vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]],
            1e-3,
        )
        .unwrap();
        let o = theorem2_asymptotic_threshold(&pts, [0, 1, 2, 3]).unwrap();
        assert!(o > 0.0 && o < 1.0);
        // criterion L at a close to 1 approaches L'
        let delta: f64 = 1e-4;
        let set = theorem2_states(&pts, (1.0 - delta * delta).sqrt()).unwrap();
        let v = theorem1_check_ordering(set.states()).unwrap();
        assert!((v.threshold - o).abs() < 1e-5, "{} vs {o}", v.threshold);
    }

    #[test]
    fn asymptotic_threshold_consistent_with_search() {
        let pts = sphere_points_general_position(5, RunSeed::new(8, 0), 1e-2).unwrap();
        for subset in four_subsets(5) {
            let o = theorem2_asymptotic_threshold(&pts, subset).unwrap();
            assert!(o > 0.0 && o < 1.0);
            let r = critical_a_search(|a| theorem2_states(&pts, a), &[subset], 1e-4).unwrap();
            assert!(r.critical < 1.0);
        }
    }
}
