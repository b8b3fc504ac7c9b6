//! Single-feature threshold classification with ROC/AUC evaluation and
//! stratified k-fold cross-validation.
//!
//! Scores are ranked with "higher score ⇒ predicted positive" when building
//! ROC curves, and classified with the fixed rule `score > θ ⇒ faulty`.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ClassifyError {
    #[error("need at least one score of each label, found {good} good and {faulty} faulty")]
    DegenerateLabels { good: usize, faulty: usize },
    #[error("fold {fold}: training data lacks the {missing} class")]
    Stratification { fold: usize, missing: Label },
    #[error("k must satisfy 2 <= k <= {n}, got {k}")]
    InvalidFoldCount { k: usize, n: usize },
    #[error("score for '{id}' is not finite")]
    NonFiniteScore { id: String },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Good,
    Faulty,
}

impl Label {
    pub fn other(self) -> Label {
        match self {
            Label::Good => Label::Faulty,
            Label::Faulty => Label::Good,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Good => "good",
            Label::Faulty => "faulty",
        })
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "good" => Ok(Label::Good),
            "faulty" => Ok(Label::Faulty),
            other => Err(format!("unknown label '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScore {
    pub id: String,
    pub score: f64,
    pub label: Label,
}

impl LabeledScore {
    pub fn new(id: impl Into<String>, score: f64, label: Label) -> LabeledScore {
        LabeledScore {
            id: id.into(),
            score,
            label,
        }
    }
}

/// Reads `id,score,label` rows; a header row is skipped if present.
pub fn read_scores<R: Read>(source: R) -> Result<Vec<LabeledScore>, ClassifyError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ClassifyError::Parse {
            line: e.position().map_or(row as u64 + 1, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 3 {
            return Err(ClassifyError::Parse {
                line,
                message: format!("expected 3 columns, found {}", record.len()),
            });
        }
        if row == 0 && record[1].eq_ignore_ascii_case("score") {
            continue;
        }
        let score = record[1].parse::<f64>().map_err(|e| ClassifyError::Parse {
            line,
            message: format!("score '{}': {e}", &record[1]),
        })?;
        let label = record[2]
            .parse::<Label>()
            .map_err(|message| ClassifyError::Parse { line, message })?;
        out.push(LabeledScore::new(&record[0], score, label));
    }
    check_finite(&out)?;
    Ok(out)
}

pub fn write_scores<W: std::io::Write>(scores: &[LabeledScore], writer: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "score", "label"])?;
    for s in scores {
        w.write_record([s.id.clone(), s.score.to_string(), s.label.to_string()])?;
    }
    w.flush()
}

fn check_finite(scores: &[LabeledScore]) -> Result<(), ClassifyError> {
    match scores.iter().find(|s| !s.score.is_finite()) {
        Some(s) => Err(ClassifyError::NonFiniteScore { id: s.id.clone() }),
        None => Ok(()),
    }
}

fn class_counts(scores: &[LabeledScore]) -> (usize, usize) {
    let good = scores.iter().filter(|s| s.label == Label::Good).count();
    (good, scores.len() - good)
}

fn require_both_classes(scores: &[LabeledScore]) -> Result<(), ClassifyError> {
    match class_counts(scores) {
        (good, faulty) if good == 0 || faulty == 0 => {
            Err(ClassifyError::DegenerateLabels { good, faulty })
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub false_positive_rate: f64,
    pub true_positive_rate: f64,
}

/// ROC curve for "predict positive when score ≥ threshold".
///
/// The first point has threshold `+∞` and sits at `(0, 0)`; each following
/// point lowers the threshold to the next distinct score, so equal scores
/// move the curve diagonally and count half in the area.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub positive_label: Label,
}

impl RocCurve {
    /// Distinct finite thresholds, descending.
    pub fn thresholds(&self) -> impl Iterator<Item = f64> + '_ {
        self.points
            .iter()
            .map(|p| p.threshold)
            .filter(|t| t.is_finite())
    }

    /// Writes `threshold,fpr,tpr` rows.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["threshold", "fpr", "tpr"])?;
        for p in &self.points {
            w.write_record([
                p.threshold.to_string(),
                p.false_positive_rate.to_string(),
                p.true_positive_rate.to_string(),
            ])?;
        }
        w.flush()
    }
}

pub fn roc_curve(scores: &[LabeledScore], positive: Label) -> Result<RocCurve, ClassifyError> {
    check_finite(scores)?;
    require_both_classes(scores)?;
    let mut sorted: Vec<&LabeledScore> = scores.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));

    let positives = scores.iter().filter(|s| s.label == positive).count() as u64;
    let negatives = scores.len() as u64 - positives;

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        false_positive_rate: 0.0,
        true_positive_rate: 0.0,
    }];
    // twice the area, in units of 1 / (P·N), accumulated exactly
    let mut doubled_area: u128 = 0;
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].score;
        let (prev_tp, prev_fp) = (tp, fp);
        while i < sorted.len() && sorted[i].score == threshold {
            if sorted[i].label == positive {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        doubled_area += (fp - prev_fp) as u128 * (tp + prev_tp) as u128;
        points.push(RocPoint {
            threshold,
            false_positive_rate: fp as f64 / negatives as f64,
            true_positive_rate: tp as f64 / positives as f64,
        });
    }
    let auc = doubled_area as f64 / (2 * positives as u128 * negatives as u128) as f64;
    Ok(RocCurve {
        points,
        auc,
        positive_label: positive,
    })
}

/// Mann–Whitney AUC: `P(pos > neg) + ½ P(pos = neg)`.
pub fn auc(scores: &[LabeledScore], positive: Label) -> Result<f64, ClassifyError> {
    roc_curve(scores, positive).map(|c| c.auc)
}

/// Fraction of scores classified correctly by `score > threshold ⇒ faulty`.
pub fn accuracy(scores: &[LabeledScore], threshold: f64) -> f64 {
    let correct = scores
        .iter()
        .filter(|s| (s.score > threshold) == (s.label == Label::Faulty))
        .count();
    correct as f64 / scores.len() as f64
}

/// Accuracy-maximizing threshold for `score > θ ⇒ faulty`.
///
/// Candidate cuts lie between consecutive distinct curve thresholds (θ is
/// the midpoint), below the smallest score, or at the largest score. When
/// several cuts reach the best accuracy the lowest one wins, which keeps the
/// chosen partition unchanged under any strictly increasing rescaling of the
/// scores.
pub fn best_threshold(curve: &RocCurve, scores: &[LabeledScore]) -> (f64, f64) {
    let mut distinct: Vec<f64> = curve.thresholds().collect();
    distinct.reverse();
    if distinct.is_empty() {
        return (0.0, accuracy(scores, 0.0));
    }

    let lowest = distinct[0];
    let highest = distinct[distinct.len() - 1];
    let mut cuts = vec![next_below(lowest)];
    cuts.extend(distinct.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0));
    cuts.push(highest);

    let mut best = (cuts[0], accuracy(scores, cuts[0]));
    for &threshold in &cuts[1..] {
        let acc = accuracy(scores, threshold);
        if acc > best.1 {
            best = (threshold, acc);
        }
    }
    best
}

fn next_below(x: f64) -> f64 {
    if x == 0.0 {
        -f64::from_bits(1)
    } else if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}

/// Full-data threshold fit: ROC with faulty as positive, then
/// [`best_threshold`].
pub fn fit_threshold(scores: &[LabeledScore]) -> Result<(f64, f64), ClassifyError> {
    let curve = roc_curve(scores, Label::Faulty)?;
    Ok(best_threshold(&curve, scores))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub size: usize,
    /// `None` when the held-out fold holds a single class.
    pub auc: Option<f64>,
    /// Fit on the other `k − 1` folds.
    pub threshold: f64,
    /// On the held-out fold.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub per_fold: Vec<FoldResult>,
    /// AUC over all held-out scores.
    pub pooled_auc: f64,
    /// Accuracy of each held-out score under its own fold's threshold.
    pub pooled_accuracy: f64,
    pub mean_fold_threshold: f64,
    /// Threshold fit on the full data set.
    pub recommended_threshold: f64,
    pub full_data_accuracy: f64,
}

impl CvReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// Assigns each score a fold in `0..k`. Each class is shuffled with a
/// ChaCha8 stream seeded by `seed` and dealt round-robin; the faulty class
/// continues where the good class stopped, so fold sizes differ by at most
/// one.
pub fn stratified_folds(scores: &[LabeledScore], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; scores.len()];
    let mut next = 0;
    for label in [Label::Good, Label::Faulty] {
        let mut members: Vec<usize> = (0..scores.len())
            .filter(|&i| scores[i].label == label)
            .collect();
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    fold_of
}

/// Stratified k-fold cross-validation of the threshold classifier.
///
/// Each fold's threshold is fit on the remaining folds and scored on the
/// held-out one. A fold whose training complement lacks a class cannot be
/// fit and is reported as a stratification failure.
pub fn cross_validate(
    scores: &[LabeledScore],
    k: usize,
    seed: u64,
) -> Result<CvReport, ClassifyError> {
    check_finite(scores)?;
    require_both_classes(scores)?;
    if k < 2 || k > scores.len() {
        return Err(ClassifyError::InvalidFoldCount { k, n: scores.len() });
    }

    let fold_of = stratified_folds(scores, k, seed);
    let mut per_fold = Vec::with_capacity(k);
    let mut correct = 0usize;
    for fold in 0..k {
        let (held, train): (Vec<_>, Vec<_>) =
            scores.iter().zip(&fold_of).partition(|(_, &f)| f == fold);
        let held: Vec<LabeledScore> = held.into_iter().map(|(s, _)| s.clone()).collect();
        let train: Vec<LabeledScore> = train.into_iter().map(|(s, _)| s.clone()).collect();

        let (threshold, _) = match fit_threshold(&train) {
            Ok(fit) => fit,
            Err(ClassifyError::DegenerateLabels { good, .. }) => {
                let missing = if good == 0 {
                    Label::Good
                } else {
                    Label::Faulty
                };
                return Err(ClassifyError::Stratification { fold, missing });
            }
            Err(e) => return Err(e),
        };
        let acc = accuracy(&held, threshold);
        correct += held
            .iter()
            .filter(|s| (s.score > threshold) == (s.label == Label::Faulty))
            .count();
        per_fold.push(FoldResult {
            fold,
            size: held.len(),
            auc: auc(&held, Label::Faulty).ok(),
            threshold,
            accuracy: acc,
        });
    }

    let (recommended_threshold, full_data_accuracy) = fit_threshold(scores)?;
    Ok(CvReport {
        k,
        seed,
        pooled_auc: auc(scores, Label::Faulty)?,
        pooled_accuracy: correct as f64 / scores.len() as f64,
        mean_fold_threshold: per_fold.iter().map(|f| f.threshold).sum::<f64>() / k as f64,
        per_fold,
        recommended_threshold,
        full_data_accuracy,
    })
}
