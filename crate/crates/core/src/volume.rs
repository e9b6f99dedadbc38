//! Monte-Carlo relative volume of absolutely entangled sets, the size
//! threshold above which they are generic, and the block-sum diagnostic
//! behind the overlap family's threshold.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{theorem4_amin, theorem4_size};
use crate::criterion::{first_certified_subset, theorem1_scan};
use crate::error::{Error, Result};
use crate::haar::haar_random_state_set;
use crate::linalg::unitarity_residual;
use crate::optimizer::{minimize_total_entropy, OptimizerConfig};
use crate::rng::RunSeed;
use crate::separability::{is_fully_product, local_alignment, Unitary, PRODUCT_TOLERANCE};
use crate::state::{Partition, StateSet};

/// Size threshold for bipartite sets together with the counting argument
/// behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeThreshold {
    /// `⌊(d1 + 1)(d2 + 1)/2⌋`: sets with more states are absolutely
    /// entangled with probability one.
    pub threshold: usize,
    /// Real parameters of the global unitary modulo local unitaries,
    /// `(d1² - 1)(d2² - 1)`.
    pub parameter_count: usize,
    /// Real constraints `2N(d1 - 1)(d2 - 1)` for making `N` states product,
    /// when `N` is given.
    pub constraint_count: Option<usize>,
}

pub fn theorem3_threshold(d1: usize, d2: usize, n: Option<usize>) -> Result<SizeThreshold> {
    if d1 < 2 || d2 < 2 {
        return Err(Error::InvalidDimension(d1.min(d2)));
    }
    Ok(SizeThreshold {
        threshold: (d1 + 1) * (d2 + 1) / 2,
        parameter_count: (d1 * d1 - 1) * (d2 * d2 - 1),
        constraint_count: n.map(|n| 2 * n * (d1 - 1) * (d2 - 1)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Four-state criterion only: a lower-bound estimator.
    #[serde(rename = "criterion-only")]
    CriterionOnly,
    /// Criterion where it applies, then entropy minimization.
    #[serde(rename = "criterion-then-optimizer")]
    CriterionThenOptimizer,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::CriterionOnly => "criterion-only",
            Method::CriterionThenOptimizer => "criterion-then-optimizer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub partition: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: u64,
    pub detected: u64,
    pub fraction: f64,
    /// Binomial standard deviation of `detected`, `sqrt(samples f (1 - f))`.
    pub stddev_counts: f64,
    pub method: Method,
    pub seed: RunSeed,
    /// Detections whose minimal entropy fell in the near-floor band.
    pub band_warnings: u64,
}

impl VolumeEstimate {
    pub fn from_counts(p: &Partition, n: usize, samples: u64, detected: u64, method: Method, seed: RunSeed) -> Self {
        let f = if samples == 0 {
            0.0
        } else {
            detected as f64 / samples as f64
        };
        Self {
            partition: p.to_string(),
            n,
            samples,
            detected,
            fraction: f,
            stddev_counts: (samples as f64 * f * (1.0 - f)).sqrt(),
            method,
            seed,
            band_warnings: 0,
        }
    }
}

/// The random set of sample `index`.
pub fn sample_set(dim: usize, n: usize, seed: RunSeed, index: u64) -> Result<StateSet> {
    haar_random_state_set(dim, n, seed.derive(index).derive(0))
}

/// Optimizer settings for sample `index`: `base` with its seed replaced by
/// one derived from the run seed and the index.
pub fn sample_config(base: &OptimizerConfig, seed: RunSeed, index: u64) -> OptimizerConfig {
    OptimizerConfig {
        seed: seed.derive(index).derive(1),
        ..*base
    }
}

fn is_two_qubits(p: &Partition) -> bool {
    p.factors() == [2, 2]
}

/// Outcome of classifying one set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub aes: bool,
    pub band_warning: bool,
}

/// Classifies one set: certified by the four-state criterion (on some
/// four-element subset for larger two-qubit sets), or, with
/// [`Method::CriterionThenOptimizer`], by entropy minimization.
pub fn classify(set: &StateSet, p: &Partition, method: Method, cfg: &OptimizerConfig) -> Result<Classification> {
    if is_two_qubits(p) && set.len() >= 4 {
        let certified = if set.len() == 4 {
            theorem1_scan(set.states())?.detected
        } else {
            first_certified_subset(set)?.is_some()
        };
        if certified {
            return Ok(Classification {
                aes: true,
                band_warning: false,
            });
        }
    } else if method == Method::CriterionOnly {
        return Err(Error::Unsupported(format!(
            "the four-state criterion needs partition 2x2 and at least 4 states, got {p} with {}",
            set.len()
        )));
    }
    if method == Method::CriterionOnly {
        return Ok(Classification {
            aes: false,
            band_warning: false,
        });
    }
    let r = minimize_total_entropy(set, p, cfg)?;
    Ok(Classification {
        aes: r.classified_aes,
        band_warning: r.classified_aes && r.entropy_band_warning,
    })
}

fn run<F>(samples: u64, workers: usize, job: F) -> Result<(u64, u64)>
where
    F: Fn(u64) -> Result<Classification> + Sync,
{
    let sum = || {
        (0..samples)
            .into_par_iter()
            .map(|i| job(i).map(|c| (c.aes as u64, c.band_warning as u64)))
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
    };
    if workers == 0 {
        return sum();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(e.to_string()))?;
    pool.install(sum)
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < 1 {
        return Err(Error::InvalidCount(0, 1));
    }
    Ok(())
}

/// Fraction of Haar-random four-state two-qubit sets certified by
/// [`theorem1_scan`]. `workers = 0` uses the global thread pool; the count
/// does not depend on the number of workers.
pub fn estimate_volume_lower(p: &Partition, n: usize, samples: u64, seed: RunSeed, workers: usize) -> Result<VolumeEstimate> {
    check_samples(samples)?;
    if !is_two_qubits(p) || n != 4 {
        return Err(Error::Unsupported(format!(
            "the criterion estimate needs partition 2x2 and N = 4, got {p} and N = {n}"
        )));
    }
    let cfg = OptimizerConfig::default();
    let (detected, _) = run(samples, workers, |i| {
        classify(&sample_set(4, 4, seed, i)?, p, Method::CriterionOnly, &cfg)
    })?;
    Ok(VolumeEstimate::from_counts(p, n, samples, detected, Method::CriterionOnly, seed))
}

/// Fraction of Haar-random `n`-state sets classified absolutely entangled
/// by [`classify`] with [`Method::CriterionThenOptimizer`]. Sample `i` uses
/// the set of [`sample_set`] and the optimizer seed of [`sample_config`].
pub fn estimate_volume(
    p: &Partition,
    n: usize,
    samples: u64,
    seed: RunSeed,
    cfg: &OptimizerConfig,
    workers: usize,
) -> Result<VolumeEstimate> {
    check_samples(samples)?;
    cfg.validate()?;
    if n < 1 {
        return Err(Error::InvalidCount(n, 1));
    }
    let d = p.dim();
    let method = Method::CriterionThenOptimizer;
    let (detected, band) = run(samples, workers, |i| {
        classify(&sample_set(d, n, seed, i)?, p, method, &sample_config(cfg, seed, i))
    })?;
    let mut est = VolumeEstimate::from_counts(p, n, samples, detected, method, seed);
    est.band_warnings = band;
    Ok(est)
}

/// Squared-modulus sums over the blocks of the rows of `U` that hold the
/// images of `ξ_2 … ξ_N`, once `U ξ_1 = |1…1⟩`.
///
/// With `r_i = d_{i+1} ⋯ d_k` and columns counted from the second basis
/// ket: `S⁽ⁱ⁾` covers columns `1 … r_i - 1`, `B⁽ⁱ⁾` the columns `m r_i`
/// and `T⁽ⁱ⁾` the columns `m r_i + j` (`m = 1 … d_i - 1`, `j = 1 … r_i - 1`).
/// Together they make up `S⁽ⁱ⁻¹⁾`, with `S⁽⁰⁾ = I = N - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSums {
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    #[serde(rename = "I")]
    pub total: f64,
}

/// Tolerance on unitarity and on `|⟨1…1|U|ξ_1⟩| = 1`.
pub const BLOCK_TOLERANCE: f64 = 1e-10;

pub fn block_sums(u: &Unitary, p: &Partition, n: usize) -> Result<BlockSums> {
    let m = u.matrix();
    let d = p.dim();
    if m.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: m.nrows(),
        });
    }
    if n < 2 || n > d {
        return Err(Error::Unsupported(format!("N = {n} outside [2, {d}]")));
    }
    let r = unitarity_residual(m);
    if r > BLOCK_TOLERANCE {
        return Err(Error::NotUnitary(r));
    }
    let fixed = m[(0, 0)].norm();
    if (fixed - 1.0).abs() > BLOCK_TOLERANCE {
        return Err(Error::Degenerate(format!(
            "U does not send the first basis ket to |1…1⟩ (overlap {fixed})"
        )));
    }
    // column c of the reduced matrix is basis ket c, row j is ξ_{j+1}
    let w = |c: usize| -> f64 { (1..n).map(|j| m[(c, j)].norm_sqr()).sum() };
    let f = p.factors();
    let mut s = Vec::with_capacity(f.len() - 1);
    let mut b = Vec::with_capacity(f.len() - 1);
    let mut t = Vec::with_capacity(f.len() - 1);
    for i in 0..f.len() - 1 {
        let ri = p.tail_product(i);
        s.push((1..ri).map(w).sum());
        b.push((1..f[i]).map(|k| w(k * ri)).sum());
        t.push((1..f[i]).flat_map(|k| (1..ri).map(move |j| k * ri + j)).map(w).sum());
    }
    Ok(BlockSums {
        s,
        b,
        t,
        total: (1..d).map(w).sum(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainCondition {
    /// 1-based level `i`.
    pub level: usize,
    pub s: f64,
    pub d: f64,
    /// `S⁽ⁱ⁾ > D_i`.
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    /// `U φ_1` is not fully product, so `U` already fails.
    FirstStateEntangled,
    /// The condition at this 1-based level fails.
    Level(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub a: f64,
    pub amin: f64,
    /// `a ≤ amin`: the conditions are not implied and may all hold.
    pub inconclusive: bool,
    pub sums: Option<BlockSums>,
    pub conditions: Vec<ChainCondition>,
    pub first_violation: Option<Violation>,
}

/// Evaluates the conditions `S⁽ⁱ⁾ > D_i` (`i = 1 … k-1`) that every
/// unitary making all states of the overlap family product would have to
/// meet. `U` is first composed with the local unitary that sends the image
/// of `φ_1` to `|1…1⟩`; this leaves productness unchanged.
pub fn necessary_condition_chain(set: &StateSet, u: &Unitary, p: &Partition) -> Result<ChainReport> {
    p.check_dim(set.dim())?;
    if u.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            actual: u.dim(),
        });
    }
    let n = theorem4_size(p);
    if set.len() != n {
        return Err(Error::WrongRowCount {
            expected: n,
            actual: set.len(),
        });
    }
    let first = &set.states()[0];
    if (first.amplitudes()[0].norm() - 1.0).abs() > BLOCK_TOLERANCE {
        return Err(Error::Degenerate("first state is not the first basis ket".into()));
    }
    let a = first.inner(&set.states()[1]).norm();
    let report = theorem4_amin(p);
    let amin = report.amin_max;
    let mut out = ChainReport {
        a,
        amin,
        inconclusive: a <= amin,
        sums: None,
        conditions: Vec::new(),
        first_violation: None,
    };
    let image = u.apply(first)?;
    if !is_fully_product(&image, p, PRODUCT_TOLERANCE)?.is_product {
        out.first_violation = Some(Violation::FirstStateEntangled);
        return Ok(out);
    }
    let aligned = local_alignment(&image, p)?.compose(u);
    let sums = block_sums(&aligned, p, n)?;
    for (i, (&s, &d)) in sums.s.iter().zip(&report.d).enumerate() {
        let holds = s > d + BLOCK_TOLERANCE;
        out.conditions.push(ChainCondition {
            level: i + 1,
            s,
            d,
            holds,
        });
        if !holds && out.first_violation.is_none() {
            out.first_violation = Some(Violation::Level(i + 1));
        }
    }
    out.sums = Some(sums);
    Ok(out)
}
