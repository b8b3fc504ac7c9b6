//! Persistent entropy of sampled signals.
//!
//! A signal is read as a piecewise linear function on a path, turned into
//! its lower-star filtration, and summarized by the Shannon entropy of its
//! zero-dimensional barcode. Around that pipeline the crate provides the
//! pieces needed to trust and use the number:
//!
//! * [`signal`]: loading, sup distance, shifts and seeded perturbations;
//! * [`filtration`]: the lower-star filtration and its simplex order;
//! * [`persistence`]: the elder-rule union-find sweep, plus a boundary-matrix
//!   reduction used as an oracle;
//! * [`entropy`]: persistent entropy, raw and normalized;
//! * [`stability`]: bottleneck distance and the entropy stability bound;
//! * [`classify`]: ROC/AUC, threshold fitting and stratified cross-validation;
//! * [`synth`]: a reproducible two-class corpus for exercising all of it.
//!
//! ```
//! use pentropy::{signal_entropy, Signal};
//!
//! let f = Signal::from_pairs(&[(1.0, 0.0), (2.0, 2.0), (3.0, 1.0)])?;
//! let h = signal_entropy(&f)?;
//! assert_eq!(h.lengths, vec![1.0, 3.0]);
//! assert!((h.raw_entropy - 0.5623).abs() < 1e-4);
//! # Ok::<(), pentropy::Error>(())
//! ```

pub mod classify;
pub mod entropy;
pub mod filtration;
pub mod persistence;
pub mod signal;
pub mod stability;
pub mod synth;

pub use classify::{cross_validate, roc_curve, CvReport, Label, LabeledScore, RocCurve};
pub use entropy::{persistent_entropy, signal_entropy, EntropyResult};
pub use filtration::{lower_star_filtration, schedule, FilteredComplex, SimplexSchedule};
pub use persistence::{compute_barcode, oracle_barcode, Barcode, Interval};
pub use signal::{load_signal, perturb, shift, sup_distance, Format, Signal};
pub use stability::{
    bottleneck_distance, entropy_stability_bound, verify_stability, Diagram, StabilityReport,
};
pub use synth::{generate_corpus, Corpus, CorpusSpec};

/// Any error raised by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Signal(#[from] signal::SignalError),
    #[error(transparent)]
    Persistence(#[from] persistence::PersistenceError),
    #[error(transparent)]
    Entropy(#[from] entropy::EntropyError),
    #[error(transparent)]
    Stability(#[from] stability::StabilityError),
    #[error(transparent)]
    Classify(#[from] classify::ClassifyError),
    #[error(transparent)]
    Synth(#[from] synth::SynthError),
}
