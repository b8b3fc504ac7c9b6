//! Reproducible two-class synthetic corpus.
//!
//! "Good" signals are smooth quasi-periodic waveforms with light broadband
//! noise. "Faulty" signals carry heavier broadband noise plus sparse
//! impulsive spikes. Broadband noise multiplies local extrema and evens out
//! bar lengths, which raises normalized persistent entropy, so the faulty
//! class scores higher.
//!
//! Generation only uses the ChaCha8 stream and `libm`, so a given spec
//! produces bit-identical samples on every platform.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::Label;
use crate::signal::{Sample, Signal};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid corpus spec: {0}")]
    InvalidSpec(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid manifest: {0}")]
    Manifest(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub good_count: usize,
    pub faulty_count: usize,
    /// Samples per signal.
    pub length: usize,
    /// Cycles per sample of the fundamental.
    pub base_frequency: f64,
    /// Half-width of the uniform broadband noise.
    pub noise_level_good: f64,
    pub noise_level_faulty: f64,
    /// Probability per sample of an impulsive spike in faulty signals.
    pub spike_rate: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            good_count: 23,
            faulty_count: 23,
            length: 10_000,
            base_frequency: 0.005,
            noise_level_good: 0.02,
            noise_level_faulty: 0.04,
            spike_rate: 0.002,
            seed: 2016,
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidSpec(m.to_string()));
        if self.length == 0 {
            return bad("length must be positive");
        }
        if self.good_count + self.faulty_count == 0 {
            return bad("corpus must contain at least one signal");
        }
        if !(self.base_frequency.is_finite() && self.base_frequency > 0.0) {
            return bad("base_frequency must be positive");
        }
        if !(self.noise_level_good >= 0.0 && self.noise_level_faulty >= 0.0)
            || !self.noise_level_good.is_finite()
            || !self.noise_level_faulty.is_finite()
        {
            return bad("noise levels must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.spike_rate) {
            return bad("spike_rate must lie in [0, 1]");
        }
        Ok(())
    }

    /// The classes differ in kind only when faulty noise is strictly larger.
    pub fn is_separable(&self) -> bool {
        self.noise_level_faulty > self.noise_level_good
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSignal {
    pub signal: Signal,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub spec: CorpusSpec,
    pub signals: Vec<LabeledSignal>,
}

impl Corpus {
    /// False for degenerate specs whose classes are drawn alike.
    pub fn separable(&self) -> bool {
        self.spec.is_separable()
    }
}

/// Per-signal seed: a ChaCha8 stream keyed on the corpus seed, one draw per
/// signal, so signals can be generated independently.
fn signal_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random()).collect()
}

fn waveform(spec: &CorpusSpec, label: Label, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = 2.0 * std::f64::consts::PI;
    let amplitude = rng.random_range(0.8..1.2);
    let frequency = spec.base_frequency * rng.random_range(0.9..1.1);
    let phase = rng.random_range(0.0..tau);
    let harmonic = rng.random_range(0.1..0.4);
    let harmonic_phase = rng.random_range(0.0..tau);
    let (noise, spikes) = match label {
        Label::Good => (spec.noise_level_good, 0.0),
        Label::Faulty => (spec.noise_level_faulty, spec.spike_rate),
    };
    let noise = noise * rng.random_range(0.75..1.25);

    (0..spec.length)
        .map(|i| {
            let t = i as f64;
            let mut v = amplitude
                * (libm::sin(tau * frequency * t + phase)
                    + harmonic * libm::sin(2.0 * tau * frequency * t + harmonic_phase));
            if noise > 0.0 {
                v += rng.random_range(-noise..=noise);
            }
            if spikes > 0.0 && rng.random_bool(spikes) {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                v += sign * rng.random_range(2.0..4.0) * noise;
            }
            v
        })
        .collect()
}

/// Generates the corpus: good signals first, then faulty, ids `good-000`,
/// `faulty-000`, ... Sample times are the sample indices.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Corpus, SynthError> {
    spec.validate()?;
    let total = spec.good_count + spec.faulty_count;
    let seeds = signal_seeds(spec.seed, total);
    let signals = seeds
        .iter()
        .enumerate()
        .map(|(k, &seed)| {
            let (label, index) = if k < spec.good_count {
                (Label::Good, k)
            } else {
                (Label::Faulty, k - spec.good_count)
            };
            let values = waveform(spec, label, seed);
            let samples = values
                .into_iter()
                .enumerate()
                .map(|(i, v)| Sample::new(i as f64, v))
                .collect();
            let signal = Signal::new(samples)
                .expect("generated samples are finite with increasing times")
                .with_id(format!("{label}-{index:03}"));
            LabeledSignal { signal, label }
        })
        .collect();
    Ok(Corpus {
        spec: spec.clone(),
        signals,
    })
}

/// `manifest.json` written next to the corpus CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: Option<CorpusSpec>,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub label: Label,
    /// Path relative to the manifest's directory.
    pub file: String,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn io_err(path: &Path, e: impl ToString) -> SynthError {
    SynthError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes one `<id>.csv` per signal plus `manifest.json` into `dir`.
pub fn write_corpus(corpus: &Corpus, dir: &Path) -> Result<Manifest, SynthError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut entries = Vec::with_capacity(corpus.signals.len());
    for item in &corpus.signals {
        let id = item.signal.id().unwrap_or("signal").to_string();
        let file = format!("{id}.csv");
        let path = dir.join(&file);
        let out = std::fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        item.signal
            .write_csv(std::io::BufWriter::new(out))
            .map_err(|e| io_err(&path, e))?;
        entries.push(ManifestEntry {
            id,
            label: item.label,
            file,
        });
    }
    let manifest = Manifest {
        spec: Some(corpus.spec.clone()),
        entries,
    };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, SynthError> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    serde_json::from_str(&text).map_err(|e| SynthError::Manifest(e.to_string()))
}
