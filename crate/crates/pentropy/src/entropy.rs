//! Persistent entropy: the Shannon entropy of a barcode's normalized bar
//! lengths.
//!
//! For bars `[x_i, y_i)` with lengths `ℓ_i = y_i − x_i` and total `L`, the
//! entropy is `H = −Σ p_i ln p_i` with `p_i = ℓ_i / L`. The bar that never
//! dies is cut at `m = max F + 1`, one past the largest filter value.
//!
//! `H` is at most `ln n` for `n` bars, reached exactly when all bars have the
//! same length, so [`EntropyResult::normalized_entropy`] reports `H / ln n`
//! in `[0, 1]` (and `0` for a single bar).

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::filtration::lower_star_filtration;
use crate::persistence::{compute_barcode, Barcode};
use crate::signal::Signal;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EntropyError {
    #[error("persistent entropy of an empty barcode is undefined")]
    EmptyBarcode,
    #[error("bar {index} has non-positive length {length} after substitution")]
    NonPositiveLength { index: usize, length: f64 },
}

/// `h(x) = −x ln x` on `[0, 1]`, with `h(0) = 0`.
pub fn entropy_term(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Persistent entropy together with the quantities it was computed from.
///
/// `lengths` and `probabilities` are in ascending length order, the order
/// they were summed in.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    pub raw_entropy: f64,
    pub normalized_entropy: f64,
    pub bar_count: usize,
    pub total_length: f64,
    pub lengths: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub substituted_m: f64,
}

impl Serialize for EntropyResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("EntropyResult", 5)?;
        s.serialize_field("H", &self.raw_entropy)?;
        s.serialize_field("H_norm", &self.normalized_entropy)?;
        s.serialize_field("bars", &self.bar_count)?;
        s.serialize_field("L", &self.total_length)?;
        s.serialize_field("m", &self.substituted_m)?;
        s.end()
    }
}

impl EntropyResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("entropy serialization is infallible")
    }
}

/// Bar lengths after cutting unbounded bars at `max_filter + 1`, in barcode order.
pub fn substituted_lengths(barcode: &Barcode) -> Vec<f64> {
    let m = barcode.max_filter() + 1.0;
    barcode
        .intervals()
        .iter()
        .map(|i| i.death.unwrap_or(m) - i.birth)
        .collect()
}

/// Persistent entropy of `barcode`, natural log.
pub fn persistent_entropy(barcode: &Barcode) -> Result<EntropyResult, EntropyError> {
    if barcode.is_empty() {
        return Err(EntropyError::EmptyBarcode);
    }
    let mut lengths = substituted_lengths(barcode);
    if let Some((index, &length)) = lengths
        .iter()
        .enumerate()
        .find(|(_, &l)| l.is_nan() || l <= 0.0)
    {
        return Err(EntropyError::NonPositiveLength { index, length });
    }
    lengths.sort_by(f64::total_cmp);

    let total_length: f64 = lengths.iter().sum();
    let probabilities: Vec<f64> = lengths.iter().map(|l| l / total_length).collect();
    let raw_entropy: f64 = probabilities.iter().map(|&p| entropy_term(p)).sum();
    let bar_count = lengths.len();
    let normalized_entropy = if bar_count == 1 {
        0.0
    } else {
        raw_entropy / (bar_count as f64).ln()
    };

    Ok(EntropyResult {
        raw_entropy,
        normalized_entropy,
        bar_count,
        total_length,
        lengths,
        probabilities,
        substituted_m: barcode.max_filter() + 1.0,
    })
}

/// Lower-star filtration, barcode and entropy of a signal in one call.
pub fn signal_entropy(f: &Signal) -> Result<EntropyResult, EntropyError> {
    persistent_entropy(&compute_barcode(&lower_star_filtration(f)))
}
