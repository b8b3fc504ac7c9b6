//! Independent oracles and generators shared by the integration tests.
//!
//! Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use pentropy::classify::{Label, LabeledScore};
use pentropy::Signal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lattice step for generated values. Values and vertical shifts on this
/// lattice add exactly in f64 while magnitudes stay below 2^42.
pub const LATTICE: f64 = 1.0 / 1024.0;

pub fn lattice_value(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> f64 {
    rng.random_range(lo..=hi) as f64 * LATTICE
}

/// Random values of one of three kinds: generic lattice values, values drawn
/// from a tiny set (many ties), or a constant run.
pub fn random_values(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    match rng.random_range(0..4) {
        0 | 1 => (0..len).map(|_| lattice_value(rng, -8192, 8192)).collect(),
        2 => (0..len).map(|_| rng.random_range(0..4) as f64).collect(),
        _ => vec![rng.random_range(-3..=3) as f64; len],
    }
}

pub fn random_signal(rng: &mut ChaCha8Rng, min_len: usize, max_len: usize) -> Signal {
    let len = rng.random_range(min_len..=max_len);
    Signal::from_values(&random_values(rng, len)).unwrap()
}

/// Signal with generic (almost surely distinct) values in `[0, 1)`.
pub fn generic_signal(rng: &mut ChaCha8Rng, len: usize) -> Signal {
    Signal::from_values(&(0..len).map(|_| rng.random::<f64>()).collect::<Vec<_>>()).unwrap()
}

/// Number of bars the zero-dimensional barcode must have: maximal runs of
/// equal values whose neighbouring runs are all strictly higher.
pub fn strict_local_minimum_count(values: &[f64]) -> usize {
    let mut runs: Vec<f64> = Vec::new();
    for &v in values {
        if runs.last() != Some(&v) {
            runs.push(v);
        }
    }
    (0..runs.len())
        .filter(|&i| {
            let left = i == 0 || runs[i - 1] > runs[i];
            let right = i + 1 == runs.len() || runs[i + 1] > runs[i];
            left && right
        })
        .count()
}

/// Two-sum error-free transformation.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Sum carried in double-double precision.
pub fn extended_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for x in xs {
        let (s, e) = two_sum(hi, x);
        hi = s;
        lo += e;
    }
    hi + lo
}

/// Entropy of a list of positive lengths, summed in descending order with
/// extended precision, using `H = ln L − (Σ ℓ ln ℓ) / L`.
pub fn entropy_oracle(lengths: &[f64]) -> f64 {
    let mut sorted = lengths.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let total = extended_sum(sorted.iter().copied());
    let weighted = extended_sum(sorted.iter().map(|&l| l * l.ln()));
    total.ln() - weighted / total
}

/// Bottleneck distance by exhaustive search over partial injections from
/// the first diagram into the second; unmatched points go to the diagonal.
pub fn brute_force_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn diag(p: (f64, f64)) -> f64 {
        (p.1 - p.0) / 2.0
    }
    fn search(
        i: usize,
        a: &[(f64, f64)],
        b: &[(f64, f64)],
        used: &mut Vec<bool>,
        cost: f64,
        best: &mut f64,
    ) {
        if cost >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&q, _)| diag(q))
                .fold(cost, f64::max);
            if rest < *best {
                *best = rest;
            }
            return;
        }
        search(i + 1, a, b, used, cost.max(diag(a[i])), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let d = (a[i].0 - b[j].0).abs().max((a[i].1 - b[j].1).abs());
                search(i + 1, a, b, used, cost.max(d), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    search(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

pub fn random_diagram(rng: &mut ChaCha8Rng, max_points: usize) -> Vec<(f64, f64)> {
    let n = rng.random_range(0..=max_points);
    (0..n)
        .map(|_| {
            let birth = rng.random_range(0.0..10.0);
            (birth, birth + rng.random_range(0.01..5.0))
        })
        .collect()
}

/// Mann–Whitney AUC by counting all (positive, negative) pairs.
pub fn pair_counting_auc(scores: &[LabeledScore], positive: Label) -> f64 {
    let pos: Vec<f64> = scores
        .iter()
        .filter(|s| s.label == positive)
        .map(|s| s.score)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .filter(|s| s.label != positive)
        .map(|s| s.score)
        .collect();
    let mut wins = 0.0;
    for &p in &pos {
        for &n in &neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

/// Random labeled scores with both classes present; scores on a coarse
/// grid so ties occur.
pub fn random_scores(rng: &mut ChaCha8Rng) -> Vec<LabeledScore> {
    let good = rng.random_range(1..=20);
    let faulty = rng.random_range(1..=20);
    // integer grid then one division, so equal scores are bit-identical
    let shift = 2 * rng.random_range(0..10);
    let mut out = Vec::new();
    for i in 0..good {
        out.push(LabeledScore::new(
            format!("g{i}"),
            rng.random_range(0..40) as f64 / 40.0,
            Label::Good,
        ));
    }
    for i in 0..faulty {
        let s = (rng.random_range(0..40) + shift) as f64 / 40.0;
        out.push(LabeledScore::new(format!("f{i}"), s, Label::Faulty));
    }
    out
}

/// Best accuracy of `score > θ ⇒ faulty` over every distinct partition.
pub fn best_accuracy_by_enumeration(scores: &[LabeledScore]) -> f64 {
    let mut cuts: Vec<f64> = scores.iter().map(|s| s.score).collect();
    cuts.push(f64::NEG_INFINITY);
    cuts.into_iter()
        .map(|theta| {
            scores
                .iter()
                .filter(|s| (s.score > theta) == (s.label == Label::Faulty))
                .count() as f64
                / scores.len() as f64
        })
        .fold(0.0, f64::max)
}
