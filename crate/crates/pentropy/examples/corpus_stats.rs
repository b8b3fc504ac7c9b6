//! Prints per-class normalized entropy statistics and cross-validation
//! results for the default synthetic corpus.
//!
//! `cargo run --release -p pentropy --example corpus_stats [length] [seed]`

use pentropy::classify::{cross_validate, Label, LabeledScore};
use pentropy::signal_entropy;
use pentropy::synth::{generate_corpus, CorpusSpec};

fn main() -> Result<(), pentropy::Error> {
    let mut args = std::env::args().skip(1);
    let mut spec = CorpusSpec::default();
    if let Some(length) = args.next() {
        spec.length = length.parse().expect("length");
    }
    if let Some(seed) = args.next() {
        spec.seed = seed.parse().expect("seed");
    }
    let corpus = generate_corpus(&spec)?;
    let mut scores = Vec::new();
    for item in &corpus.signals {
        let h = signal_entropy(&item.signal)?;
        let id = item.signal.id().unwrap_or_default();
        println!(
            "{id}\tbars={}\tH={:.4}\tH_norm={:.4}",
            h.bar_count, h.raw_entropy, h.normalized_entropy
        );
        scores.push(LabeledScore::new(id, h.normalized_entropy, item.label));
    }
    for label in [Label::Good, Label::Faulty] {
        let xs: Vec<f64> = scores
            .iter()
            .filter(|s| s.label == label)
            .map(|s| s.score)
            .collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1).max(1) as f64;
        println!("{label}: mean {mean:.4} sd {:.4}", var.sqrt());
    }
    let report = cross_validate(&scores, 7, spec.seed)?;
    println!("{}", report.to_json());
    Ok(())
}
