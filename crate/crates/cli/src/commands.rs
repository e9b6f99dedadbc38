use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use aeset::constructions::{
    amin_table, critical_a_search, n5_symmetric_set, special_set, sphere_points_general_position,
    theorem2_asymptotic_threshold, theorem2_states, theorem4_states, SpherePoints,
};
use aeset::criterion::{four_subsets, maximal_entangled_scan, theorem1_scan};
use aeset::haar::haar_random_state_set;
use aeset::io::{
    state_set_from_json, state_set_to_json, unitary_to_json, write_amin_table_csv,
    write_volume_csv_header, write_volume_csv_row, ParseError,
};
use aeset::optimizer::{minimize_total_entropy, OptimizerConfig};
use aeset::separability::{cut_residuals, disentangling_unitary};
use aeset::volume::{estimate_volume, estimate_volume_lower};
use aeset::{Error, Partition, RunSeed, StateSet};
use serde::Serialize;
use serde_json::json;

use crate::{Command, CriticalFamily, Family, OptArgs, VolumeMethod};

/// Failure with its exit code: 2 for bad input, 3 for numeric failures.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotFound(_) | Error::NotUnitary(_) | Error::Degenerate(_) => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Stdout,
    File(PathBuf),
    Append(PathBuf),
}

#[derive(Debug, Clone)]
pub struct Output {
    pub target: Target,
    pub bytes: Vec<u8>,
    /// Part of the result, so digested in the manifest. A CSV header
    /// written only because the file was new is not.
    pub recorded: bool,
}

impl Output {
    fn main(out: &Option<PathBuf>, text: String) -> Self {
        Output {
            target: match out {
                Some(p) => Target::File(p.clone()),
                None => Target::Stdout,
            },
            bytes: text.into_bytes(),
            recorded: true,
        }
    }

    pub fn file(&self) -> Option<&Path> {
        match &self.target {
            Target::File(p) | Target::Append(p) => Some(p),
            Target::Stdout => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.target {
            Target::Stdout => "stdout".into(),
            Target::File(p) => p.display().to_string(),
            Target::Append(p) => format!("{} (appended)", p.display()),
        }
    }
}

pub fn write_outputs(outputs: &[Output]) -> Result<(), Failure> {
    for o in outputs {
        match &o.target {
            Target::Stdout => {
                let mut s = std::io::stdout().lock();
                s.write_all(&o.bytes)
                    .and_then(|_| s.flush())
                    .map_err(|e| Failure::Usage(format!("stdout: {e}")))?;
            }
            Target::File(p) => fs::write(p, &o.bytes).map_err(|e| io_failure(p, e))?,
            Target::Append(p) => {
                let mut f = fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(p)
                    .map_err(|e| io_failure(p, e))?;
                f.write_all(&o.bytes).map_err(|e| io_failure(p, e))?;
            }
        }
    }
    Ok(())
}

fn fresh_seed() -> u64 {
    let t = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    t ^ (u64::from(std::process::id())).rotate_left(32)
}

/// Generates a seed for a randomized command that was given none and
/// stores it in the arguments. Returns the generated seed.
pub fn fill_seed(cmd: &mut Command) -> Option<u64> {
    let slot = match cmd {
        Command::Check(a) if a.optimize => &mut a.seed,
        Command::Construct(c) => match &mut c.family {
            Family::Theorem2 { seed, .. } | Family::Haar { seed, .. } => seed,
            _ => return None,
        },
        Command::Volume(a) => &mut a.seed,
        Command::Minimize(a) => &mut a.seed,
        Command::CriticalA(a) if matches!(a.family, CriticalFamily::Theorem2) => &mut a.seed,
        _ => return None,
    };
    if slot.is_some() {
        return None;
    }
    let s = fresh_seed();
    *slot = Some(s);
    Some(s)
}

fn seed_of(seed: Option<u64>) -> RunSeed {
    RunSeed::new(seed.expect("seed filled before execution"), 0)
}

fn partition(text: &str) -> Result<Partition, Failure> {
    Ok(text.parse::<Partition>()?)
}

fn read_states(path: &Path, normalize: bool) -> Result<StateSet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    state_set_from_json(&text, normalize).map_err(|e: ParseError| {
        Failure::Usage(format!("{}: {e}", path.display()))
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

fn optimizer_config(o: &OptArgs, seed: RunSeed) -> OptimizerConfig {
    OptimizerConfig {
        restarts: o.restarts,
        max_iterations: o.max_iterations,
        product_threshold: o.product_threshold,
        ..OptimizerConfig::new(seed)
    }
}

pub fn execute(cmd: &Command) -> Result<Vec<Output>, Failure> {
    match cmd {
        Command::Check(a) => {
            let set = read_states(&a.states, a.normalize)?;
            let p = match &a.partition {
                Some(t) => partition(t)?,
                None if set.dim() == 4 => Partition::bipartite(2, 2)?,
                None => {
                    return Err(Failure::Usage(format!(
                        "--partition is required for dimension {}",
                        set.dim()
                    )))
                }
            };
            if p.dim() != set.dim() {
                return Err(Error::DimensionMismatch {
                    expected: p.dim(),
                    actual: set.dim(),
                }
                .into());
            }
            let two_qubits = p.factors() == [2, 2];
            let verdict = if two_qubits && set.len() == 4 {
                Some(theorem1_scan(set.states())?)
            } else {
                None
            };
            let subsets = if two_qubits && set.len() > 4 {
                Some(maximal_entangled_scan(&set)?)
            } else {
                None
            };
            let certified = verdict.as_ref().is_some_and(|v| v.detected)
                || subsets.as_ref().is_some_and(|s| s.certified().next().is_some());
            let optimizer = if a.optimize {
                Some(minimize_total_entropy(&set, &p, &optimizer_config(&a.opt, seed_of(a.seed)))?)
            } else {
                None
            };
            let aes = if certified {
                Some(true)
            } else {
                optimizer.as_ref().map(|r| r.classified_aes)
            };
            let report = json!({
                "states": set.len(),
                "d": set.dim(),
                "partition": p.to_string(),
                "criterion": verdict,
                "subsets": subsets,
                "certified": certified,
                "optimizer": optimizer,
                "aes": aes,
            });
            Ok(vec![Output::main(&a.out.out, to_json(&report))])
        }
        Command::Construct(c) => {
            let (set, out) = match &c.family {
                Family::Theorem4 { partition: t, a, out } => (theorem4_states(&partition(t)?, *a)?, out),
                Family::Theorem2 { n, a, seed, tol, out } => {
                    let pts = sphere_points_general_position(*n, seed_of(*seed), *tol)?;
                    (theorem2_states(&pts, *a)?, out)
                }
                Family::N5 { b, out } => (n5_symmetric_set(*b)?, out),
                Family::Eq1 { d1, d2, c, out } => (special_set(*d1, *d2, *c)?, out),
                Family::Haar { dim, n, seed, out } => {
                    (haar_random_state_set(*dim, *n, seed_of(*seed))?, out)
                }
            };
            Ok(vec![Output::main(&out.out, state_set_to_json(&set))])
        }
        Command::AminTable(a) => {
            let table = amin_table(a.d)?;
            let text = if a.json {
                to_json(&table)
            } else {
                let mut buf = Vec::new();
                write_amin_table_csv(&table, &mut buf)?;
                String::from_utf8(buf).expect("csv output is utf-8")
            };
            Ok(vec![Output::main(&a.out.out, text)])
        }
        Command::Volume(a) => {
            let p = partition(&a.partition)?;
            let seed = seed_of(a.seed);
            let est = match a.method {
                VolumeMethod::Lower => estimate_volume_lower(&p, a.n, a.samples, seed, a.workers)?,
                VolumeMethod::Full => {
                    let cfg = optimizer_config(&a.opt, seed);
                    estimate_volume(&p, a.n, a.samples, seed, &cfg, a.workers)?
                }
            };
            let mut outputs = vec![Output::main(&a.out.out, to_json(&est))];
            if let Some(path) = &a.csv {
                if fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true) {
                    let mut header = Vec::new();
                    write_volume_csv_header(&mut header)?;
                    outputs.push(Output {
                        target: Target::Append(path.clone()),
                        bytes: header,
                        recorded: false,
                    });
                }
                let mut row = Vec::new();
                write_volume_csv_row(&est, &mut row)?;
                outputs.push(Output {
                    target: Target::Append(path.clone()),
                    bytes: row,
                    recorded: true,
                });
            }
            Ok(outputs)
        }
        Command::Minimize(a) => {
            let set = read_states(&a.states, a.normalize)?;
            let p = partition(&a.partition)?;
            let r = minimize_total_entropy(&set, &p, &optimizer_config(&a.opt, seed_of(a.seed)))?;
            let mut outputs = vec![Output::main(&a.out.out, to_json(&r))];
            if let Some(path) = &a.unitary_out {
                outputs.push(Output {
                    target: Target::File(path.clone()),
                    bytes: unitary_to_json(&r.best_unitary).into_bytes(),
                    recorded: true,
                });
            }
            Ok(outputs)
        }
        Command::Disentangle(a) => {
            let set = read_states(&a.states, a.normalize)?;
            let p = partition(&a.partition)?;
            let u = disentangling_unitary(&set, &p)?;
            let images = u.apply_set(&set)?;
            let residuals = images
                .iter()
                .map(|s| cut_residuals(s, &p).map(|r| r.into_iter().fold(0.0, f64::max)))
                .collect::<aeset::Result<Vec<f64>>>()?;
            let unitary_text = unitary_to_json(&u);
            let report = json!({
                "partition": p.to_string(),
                "states": set.len(),
                "residuals": residuals,
                "max_residual": residuals.iter().copied().fold(0.0, f64::max),
                "unitarity_residual": u.unitarity_residual(),
                "unitary": serde_json::from_str::<serde_json::Value>(&unitary_text)
                    .expect("unitary JSON parses"),
            });
            let mut outputs = vec![Output::main(&a.out.out, to_json(&report))];
            if let Some(path) = &a.unitary_out {
                outputs.push(Output {
                    target: Target::File(path.clone()),
                    bytes: unitary_text.into_bytes(),
                    recorded: true,
                });
            }
            Ok(outputs)
        }
        Command::CriticalA(a) => {
            let size = match a.family {
                CriticalFamily::Eq1 => a.d1 + a.d2,
                CriticalFamily::N5 => 5,
                CriticalFamily::Theorem2 => a.n,
            };
            let subsets = parse_subsets(&a.subsets, size)?;
            let report = match a.family {
                CriticalFamily::Eq1 => {
                    let r = critical_a_search(|c| special_set(a.d1, a.d2, c), &subsets, a.resolution)?;
                    json!({ "family": "eq1", "search": r })
                }
                CriticalFamily::N5 => {
                    let r = critical_a_search(n5_symmetric_set, &subsets, a.resolution)?;
                    json!({ "family": "n5", "search": r })
                }
                CriticalFamily::Theorem2 => {
                    let pts: SpherePoints = sphere_points_general_position(a.n, seed_of(a.seed), a.tol)?;
                    let r = critical_a_search(|x| theorem2_states(&pts, x), &subsets, a.resolution)?;
                    let limits = subsets
                        .iter()
                        .map(|s| theorem2_asymptotic_threshold(&pts, *s))
                        .collect::<aeset::Result<Vec<f64>>>()?;
                    json!({ "family": "theorem2", "points": pts, "search": r, "asymptotic_thresholds": limits })
                }
            };
            Ok(vec![Output::main(&a.out.out, to_json(&report))])
        }
        Command::Replay(_) => unreachable!("replay is handled before execution"),
    }
}

fn parse_subsets(text: &str, n: usize) -> Result<Vec<[usize; 4]>, Failure> {
    if text.trim() == "all" {
        return Ok(four_subsets(n));
    }
    text.split(';')
        .map(|group| {
            let idx: Vec<usize> = group
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Usage(format!("subset {group:?}: {e}")))?;
            let arr: [usize; 4] = idx
                .try_into()
                .map_err(|_| Failure::Usage(format!("subset {group:?} must have four indices")))?;
            if arr.iter().any(|&i| i >= n) {
                return Err(Failure::Usage(format!("subset {group:?} out of range for {n} states")));
            }
            Ok(arr)
        })
        .collect()
}
