//! Sampled signals: the discrete piecewise linear functions everything else
//! in this crate consumes.
//!
//! A [`Signal`] is a finite, time-ordered list of `(time, value)` samples.
//! Consecutive samples are joined by straight segments, so a signal is a PL
//! function on a subdivided line. Construction enforces the invariants (at
//! least one sample, strictly increasing times, finite values); every other
//! operation can rely on them.

use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Relative tolerance when comparing the time grids of two signals.
pub const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SignalError {
    #[error("a signal needs at least one sample")]
    Empty,
    #[error("duplicate sample time {time}")]
    DuplicateTime { time: f64 },
    #[error("non-finite sample ({time}, {value})")]
    NonFinite { time: f64, value: f64 },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid JSON signal: {0}")]
    Json(String),
    #[error("signals are on different time grids: {0}")]
    Incompatible(String),
    #[error("perturbation size must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("I/O error: {0}")]
    Io(String),
}

/// One sample of a signal. Serializes as the two-element array `[t, v]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64)", into = "(f64, f64)")]
pub struct Sample {
    pub time: f64,
    pub value: f64,
}

impl Sample {
    pub fn new(time: f64, value: f64) -> Self {
        Sample { time, value }
    }
}

impl From<(f64, f64)> for Sample {
    fn from((time, value): (f64, f64)) -> Self {
        Sample { time, value }
    }
}

impl From<Sample> for (f64, f64) {
    fn from(s: Sample) -> Self {
        (s.time, s.value)
    }
}

/// Input encodings understood by [`load_signal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Two columns `time,value`, optional header line.
    Csv,
    /// `{"id": "...", "samples": [[t, v], ...]}`
    Json,
}

impl Format {
    /// Guess the format from a file extension (`.json` or anything else as CSV).
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// A validated, time-ordered sampled signal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signal {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    samples: Vec<Sample>,
}

#[derive(Deserialize)]
struct RawSignal {
    #[serde(default)]
    id: Option<String>,
    samples: Vec<Sample>,
}

impl<'de> Deserialize<'de> for Signal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSignal::deserialize(deserializer)?;
        let signal = Signal::new(raw.samples).map_err(serde::de::Error::custom)?;
        Ok(signal.with_id_opt(raw.id))
    }
}

impl Signal {
    /// Builds a signal from samples in any order. Samples are sorted by time;
    /// duplicate times and non-finite coordinates are rejected.
    pub fn new(mut samples: Vec<Sample>) -> Result<Signal, SignalError> {
        if samples.is_empty() {
            return Err(SignalError::Empty);
        }
        if let Some(s) = samples
            .iter()
            .find(|s| !s.time.is_finite() || !s.value.is_finite())
        {
            return Err(SignalError::NonFinite {
                time: s.time,
                value: s.value,
            });
        }
        samples.sort_by(|a, b| a.time.total_cmp(&b.time));
        if let Some(w) = samples.windows(2).find(|w| w[0].time == w[1].time) {
            return Err(SignalError::DuplicateTime { time: w[0].time });
        }
        Ok(Signal { id: None, samples })
    }

    /// Signal sampled at the integer times `0, 1, 2, ...`.
    pub fn from_values(values: &[f64]) -> Result<Signal, SignalError> {
        Signal::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| Sample::new(i as f64, v))
                .collect(),
        )
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Signal, SignalError> {
        Signal::new(pairs.iter().copied().map(Sample::from).collect())
    }

    pub fn with_id(self, id: impl Into<String>) -> Signal {
        self.with_id_opt(Some(id.into()))
    }

    fn with_id_opt(mut self, id: Option<String>) -> Signal {
        self.id = id;
        self
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for the `len`/`is_empty` pairing.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.time)
    }

    pub fn values(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.value)
    }

    /// Writes the signal as `time,value` CSV with a header line.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<(), SignalError> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| SignalError::Io(e.to_string());
        w.write_record(["time", "value"]).map_err(io)?;
        for s in &self.samples {
            w.write_record([s.time.to_string(), s.value.to_string()])
                .map_err(io)?;
        }
        w.flush().map_err(|e| SignalError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("signal serialization is infallible")
    }
}

/// Reads a signal from `source` in the given format.
///
/// CSV input may carry a header line (`time,value` or any non-numeric first
/// row). Rows may arrive in any time order; they are sorted on load.
pub fn load_signal<R: Read>(source: R, format: Format) -> Result<Signal, SignalError> {
    match format {
        Format::Json => {
            serde_json::from_reader(source).map_err(|e| SignalError::Json(e.to_string()))
        }
        Format::Csv => load_csv(source),
    }
}

fn load_csv<R: Read>(source: R) -> Result<Signal, SignalError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| SignalError::Parse {
            line: e.position().map_or(row as u64 + 1, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(SignalError::Parse {
                line,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(time), Ok(value)) => samples.push(Sample::new(time, value)),
            // header
            _ if row == 0 && !looks_numeric(&record[0]) && !looks_numeric(&record[1]) => {}
            _ => {
                return Err(SignalError::Parse {
                    line,
                    message: format!("cannot parse '{}' as a time,value pair", join(&record)),
                })
            }
        }
    }
    Signal::new(samples)
}

fn looks_numeric(field: &str) -> bool {
    field
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'))
}

fn join(record: &csv::StringRecord) -> String {
    record.iter().collect::<Vec<_>>().join(",")
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= GRID_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn check_grid(f: &Signal, g: &Signal) -> Result<(), SignalError> {
    if f.len() != g.len() {
        return Err(SignalError::Incompatible(format!(
            "{} samples vs {} samples",
            f.len(),
            g.len()
        )));
    }
    if let Some((a, b)) = f.times().zip(g.times()).find(|&(a, b)| !same_time(a, b)) {
        return Err(SignalError::Incompatible(format!("time {a} vs {b}")));
    }
    Ok(())
}

/// `max_i |f_i − g_i|` for two signals sampled on the same time grid.
pub fn sup_distance(f: &Signal, g: &Signal) -> Result<f64, SignalError> {
    check_grid(f, g)?;
    Ok(f.values()
        .zip(g.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Translates every sample by `(dx, dy)`.
pub fn shift(f: &Signal, dx: f64, dy: f64) -> Result<Signal, SignalError> {
    let samples = f
        .samples
        .iter()
        .map(|s| Sample::new(s.time + dx, s.value + dy))
        .collect::<Vec<_>>();
    if let Some(s) = samples
        .iter()
        .find(|s| !s.time.is_finite() || !s.value.is_finite())
    {
        return Err(SignalError::NonFinite {
            time: s.time,
            value: s.value,
        });
    }
    // a huge dx can collapse neighbouring times
    if let Some(w) = samples.windows(2).find(|w| w[0].time >= w[1].time) {
        return Err(SignalError::DuplicateTime { time: w[1].time });
    }
    Ok(Signal {
        id: f.id.clone(),
        samples,
    })
}

/// Adds i.i.d. uniform noise in `[-delta, delta]` to every value, drawn from
/// a ChaCha8 stream seeded with `seed`. The result satisfies
/// `sup_distance(f, g) <= delta` exactly, including after rounding.
pub fn perturb(f: &Signal, delta: f64, seed: u64) -> Result<Signal, SignalError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(SignalError::InvalidDelta(delta));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = f
        .samples
        .iter()
        .map(|s| {
            let noise: f64 = rng.random_range(-delta..=delta);
            Sample::new(s.time, offset_within(s.value, noise, delta))
        })
        .collect();
    Ok(Signal {
        id: f.id.clone(),
        samples,
    })
}

/// `value + noise`, pulled back toward `value` one ulp at a time if rounding
/// pushed it outside the `delta` ball.
fn offset_within(value: f64, noise: f64, delta: f64) -> f64 {
    let mut out = value + noise;
    while (out - value).abs() > delta {
        out = step_toward(out, value);
    }
    out
}

fn step_toward(x: f64, target: f64) -> f64 {
    if x == target {
        return x;
    }
    let bits = x.to_bits();
    // for finite non-zero x, moving the magnitude down is bits - 1
    let toward_zero = (x > target) == (x > 0.0);
    if x == 0.0 {
        return if target > 0.0 {
            f64::from_bits(1)
        } else {
            -f64::from_bits(1)
        };
    }
    f64::from_bits(if toward_zero { bits - 1 } else { bits + 1 })
}
