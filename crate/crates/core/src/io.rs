//! File formats.
//!
//! State set: `{"d": 4, "states": [[[re, im], ...], ...]}`, amplitudes in
//! flat-index order.
//! Unitary: `{"d": 4, "rows": [[[re, im], ...], ...]}`, row-major.
//!
//! Tables: CSV with list-valued cells joined by `;`.
//!
//! Writers print every real with 17 significant digits (`{:.16e}`), which
//! parses back to the identical `f64`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::constructions::AminTable;
use crate::linalg::CMatrix;
use crate::separability::Unitary;
use crate::state::{PureState, StateSet};
use crate::volume::VolumeEstimate;

/// Serde adapter writing non-finite reals as the string `"inf"`.
pub mod finite_or_inf {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str("inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {t:?}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct StateSetFile {
    d: usize,
    states: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct UnitaryFile {
    d: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

/// Parse failure with position information.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line > 0 {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

impl std::error::Error for ParseError {}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

impl From<Error> for ParseError {
    fn from(e: Error) -> Self {
        ParseError {
            line: 0,
            column: 0,
            message: e.to_string(),
        }
    }
}

fn push_real(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("write to string");
}

fn push_complex_row(out: &mut String, row: impl Iterator<Item = Complex64>) {
    out.push('[');
    for (i, z) in row.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('[');
        push_real(out, z.re);
        out.push_str(", ");
        push_real(out, z.im);
        out.push(']');
    }
    out.push(']');
}

pub fn state_set_to_json(set: &StateSet) -> String {
    let mut out = format!("{{\"d\": {}, \"states\": [\n", set.dim());
    for (i, s) in set.iter().enumerate() {
        out.push_str("  ");
        push_complex_row(&mut out, s.amplitudes().iter().copied());
        out.push_str(if i + 1 < set.len() { ",\n" } else { "\n" });
    }
    out.push_str("]}\n");
    out
}

/// Parses a state-set file. With `normalize`, amplitudes are rescaled to
/// unit norm; otherwise each state must already be normalized.
pub fn state_set_from_json(text: &str, normalize: bool) -> std::result::Result<StateSet, ParseError> {
    let file: StateSetFile = serde_json::from_str(text)?;
    let states = file
        .states
        .into_iter()
        .enumerate()
        .map(|(i, amps)| {
            if amps.len() != file.d {
                return Err(ParseError::from(Error::DimensionMismatch {
                    expected: file.d,
                    actual: amps.len(),
                }))
                .map_err(|mut e| {
                    e.message = format!("state {i}: {}", e.message);
                    e
                });
            }
            let v: Vec<Complex64> = amps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            let s = if normalize {
                PureState::normalized(v)
            } else {
                PureState::new(v)
            };
            s.map_err(|e| ParseError {
                line: 0,
                column: 0,
                message: format!("state {i}: {e}"),
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(StateSet::new(states)?)
}

pub fn unitary_to_json(u: &Unitary) -> String {
    let m = u.matrix();
    let mut out = format!("{{\"d\": {}, \"rows\": [\n", m.nrows());
    for r in 0..m.nrows() {
        out.push_str("  ");
        push_complex_row(&mut out, (0..m.ncols()).map(|c| m[(r, c)]));
        out.push_str(if r + 1 < m.nrows() { ",\n" } else { "\n" });
    }
    out.push_str("]}\n");
    out
}

pub fn unitary_from_json(text: &str) -> std::result::Result<Unitary, ParseError> {
    let file: UnitaryFile = serde_json::from_str(text)?;
    if file.rows.len() != file.d || file.rows.iter().any(|r| r.len() != file.d) {
        return Err(Error::WrongRowCount {
            expected: file.d,
            actual: file.rows.len(),
        }
        .into());
    }
    let m = CMatrix::from_fn(file.d, file.d, |r, c| {
        let [re, im] = file.rows[r][c];
        Complex64::new(re, im)
    });
    Ok(Unitary::new(m)?)
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(";")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Unsupported(format!("csv: {e}"))
}

/// One row per partition, then an `all` row with the set size and the
/// overlap parameters that work for every partition.
pub fn write_amin_table_csv<W: std::io::Write>(table: &AminTable, out: W) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["partition", "N", "D", "terms", "amin_max", "amin_min"])
        .map_err(csv_error)?;
    for r in &table.rows {
        let part = r.partition.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x");
        w.write_record([
            part,
            r.n.to_string(),
            join(&r.d),
            join(&r.terms),
            format!("{:.6}", r.amin_max),
            format!("{:.6}", r.amin_min),
        ])
        .map_err(csv_error)?;
    }
    w.write_record([
        "all".to_string(),
        table.all_n.to_string(),
        String::new(),
        String::new(),
        format!("{:.6}", table.all_amin_max),
        format!("{:.6}", table.all_amin_min),
    ])
    .map_err(csv_error)?;
    w.flush().map_err(|e| Error::Unsupported(format!("csv: {e}")))
}

const VOLUME_COLUMNS: [&str; 10] = [
    "partition",
    "N",
    "samples",
    "detected",
    "fraction",
    "stddev_counts",
    "method",
    "seed",
    "stream",
    "band_warnings",
];

pub fn write_volume_csv_header<W: std::io::Write>(out: W) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VOLUME_COLUMNS).map_err(csv_error)?;
    w.flush().map_err(|e| Error::Unsupported(format!("csv: {e}")))
}

/// Writes one estimate as a CSV row under [`write_volume_csv_header`]'s
/// columns. Sweep tables are built by appending rows to one file.
pub fn write_volume_csv_row<W: std::io::Write>(est: &VolumeEstimate, out: W) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        est.partition.clone(),
        est.n.to_string(),
        est.samples.to_string(),
        est.detected.to_string(),
        format!("{:e}", est.fraction),
        format!("{:e}", est.stddev_counts),
        est.method.to_string(),
        est.seed.seed.to_string(),
        est.seed.stream.to_string(),
        est.band_warnings.to_string(),
    ])
    .map_err(csv_error)?;
    w.flush().map_err(|e| Error::Unsupported(format!("csv: {e}")))
}
