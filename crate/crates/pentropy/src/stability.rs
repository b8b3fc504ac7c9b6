//! Empirical certification of entropy stability.
//!
//! Two facts are checked on concrete signal pairs `f`, `g` sampled on the
//! same grid:
//!
//! * diagram stability, `d_B(D(f), D(g)) ≤ ‖f − g‖∞`, using an exact
//!   bottleneck distance;
//! * entropy stability, `|H(f) − H(g)| ≤ ε`, where `ε` is built from the
//!   constants of the continuity argument: with `n` bars and total length
//!   `L′`, a sup-norm perturbation of size `δ` moves every normalized length
//!   `p_i` by at most `δ′ = 4nδ / L′`, and every entropy term `h(p) = −p ln p`
//!   then moves by at most `ω(δ′)`, so `ε = n·ω(δ′)`.
//!
//! The modulus shipped here is `ω(t) = 2t(1 − ln 2t)`, valid for
//! `t ≤ 1/(2e)`. The true modulus of `h` on `[0, 1]` is `h(t)` itself for
//! small `t`, so `ω` is loose but safe.

use std::collections::VecDeque;

use serde::Serialize;

use crate::entropy::{persistent_entropy, substituted_lengths, EntropyError};
use crate::filtration::lower_star_filtration;
use crate::persistence::{compute_barcode, Barcode};
use crate::signal::{sup_distance, Signal, SignalError};

/// Largest `δ′` for which [`modulus`] is a valid modulus of continuity.
pub const MODULUS_LIMIT: f64 = 1.0 / (2.0 * std::f64::consts::E);

/// Slack allowed when comparing a bottleneck distance to a sup distance.
pub const DIAGRAM_BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StabilityError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("diagram point ({birth}, {death}) does not satisfy birth < death")]
    InvalidPoint { birth: f64, death: f64 },
    #[error("perturbation size must be non-negative and finite, got {0}")]
    InvalidDelta(f64),
    #[error("entropy bound inapplicable: δ′ = {delta_prime} exceeds 1/(2e)")]
    BoundInapplicable { delta_prime: f64 },
}

/// A persistence diagram with every death finite (unbounded bars cut at
/// `max F + 1`, as for entropy).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagram {
    points: Vec<(f64, f64)>,
}

impl Diagram {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Diagram, StabilityError> {
        if let Some(&(birth, death)) = points
            .iter()
            .find(|(b, d)| b.is_nan() || d.is_nan() || b >= d)
        {
            return Err(StabilityError::InvalidPoint { birth, death });
        }
        Ok(Diagram { points })
    }

    pub fn from_barcode(barcode: &Barcode) -> Result<Diagram, StabilityError> {
        let points = barcode
            .intervals()
            .iter()
            .zip(substituted_lengths(barcode))
            .map(|(i, len)| (i.birth, i.birth + len))
            .collect();
        Diagram::new(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|(b, d)| d - b)
    }

    pub fn total_length(&self) -> f64 {
        self.lengths().sum()
    }
}

/// `max(|x − x′|, |y − y′|)`
pub fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// L∞ distance from a point to the diagonal.
pub fn diagonal_cost(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// How one point is matched in an optimal bottleneck bijection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchedPair {
    Points { first: usize, second: usize },
    FirstToDiagonal(usize),
    SecondToDiagonal(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BottleneckMatching {
    pub distance: f64,
    pub pairs: Vec<MatchedPair>,
}

/// Bipartite graph for the feasibility test at one radius. Left side: points
/// of the first diagram, then diagonal copies of the second. Right side:
/// points of the second, then diagonal copies of the first.
fn feasibility_graph(a: &Diagram, b: &Diagram, radius: f64) -> Vec<Vec<usize>> {
    let (n1, n2) = (a.len(), b.len());
    let mut adj = vec![Vec::new(); n1 + n2];
    for (i, &p) in a.points.iter().enumerate() {
        for (j, &q) in b.points.iter().enumerate() {
            if linf(p, q) <= radius {
                adj[i].push(j);
            }
        }
        if diagonal_cost(p) <= radius {
            adj[i].push(n2 + i);
        }
    }
    for (j, &q) in b.points.iter().enumerate() {
        let row = &mut adj[n1 + j];
        if diagonal_cost(q) <= radius {
            row.push(j);
        }
        row.extend(n2..n2 + n1);
    }
    adj
}

const FREE: usize = usize::MAX;

/// Hopcroft–Karp maximum matching. Returns `match_left[u] = v` or `FREE`.
fn hopcroft_karp(adj: &[Vec<usize>], right_count: usize) -> (usize, Vec<usize>) {
    let left_count = adj.len();
    let mut match_left = vec![FREE; left_count];
    let mut match_right = vec![FREE; right_count];
    let mut dist = vec![0usize; left_count];
    let mut size = 0;

    loop {
        // layer free left vertices
        let mut queue = VecDeque::new();
        let mut found = false;
        for u in 0..left_count {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_right[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next_edge = vec![0usize; left_count];
        for u in 0..left_count {
            if match_left[u] == FREE
                && augment(
                    u,
                    adj,
                    &mut match_left,
                    &mut match_right,
                    &mut dist,
                    &mut next_edge,
                )
            {
                size += 1;
            }
        }
    }
    (size, match_left)
}

fn augment(
    root: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    // iterative DFS along the layered graph
    let mut stack = vec![root];
    let mut path: Vec<(usize, usize)> = Vec::new();
    while let Some(&u) = stack.last() {
        if next_edge[u] == adj[u].len() {
            dist[u] = usize::MAX;
            stack.pop();
            path.pop();
            continue;
        }
        let v = adj[u][next_edge[u]];
        next_edge[u] += 1;
        let w = match_right[v];
        if w == FREE {
            path.push((u, v));
            for &(pu, pv) in &path {
                match_left[pu] = pv;
                match_right[pv] = pu;
            }
            return true;
        }
        if dist[w] == dist[u].wrapping_add(1) {
            path.push((u, v));
            stack.push(w);
        }
    }
    false
}

fn perfect_matching(a: &Diagram, b: &Diagram, radius: f64) -> Option<Vec<usize>> {
    let adj = feasibility_graph(a, b, radius);
    let total = a.len() + b.len();
    let (size, matching) = hopcroft_karp(&adj, total);
    (size == total).then_some(matching)
}

/// Exact bottleneck distance and an optimal matching.
///
/// The optimum is one of finitely many values (a pairwise L∞ distance or a
/// distance to the diagonal), so a binary search over the sorted candidates
/// with a perfect-matching test finds it exactly.
pub fn bottleneck_matching(a: &Diagram, b: &Diagram) -> BottleneckMatching {
    let mut candidates = vec![0.0];
    for &p in &a.points {
        candidates.push(diagonal_cost(p));
        candidates.extend(b.points.iter().map(|&q| linf(p, q)));
    }
    candidates.extend(b.points.iter().map(|&q| diagonal_cost(q)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // the largest candidate is always feasible (everything to the diagonal)
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(a, b, candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let distance = candidates[lo];
    let matching = perfect_matching(a, b, distance).expect("feasible at the optimum");

    let (n1, n2) = (a.len(), b.len());
    let mut pairs = Vec::with_capacity(n1 + n2);
    for (left, &right) in matching.iter().enumerate() {
        match (left < n1, right < n2) {
            (true, true) => pairs.push(MatchedPair::Points {
                first: left,
                second: right,
            }),
            (true, false) => pairs.push(MatchedPair::FirstToDiagonal(left)),
            (false, true) => pairs.push(MatchedPair::SecondToDiagonal(right)),
            (false, false) => {}
        }
    }
    BottleneckMatching { distance, pairs }
}

pub fn bottleneck_distance(a: &Diagram, b: &Diagram) -> f64 {
    bottleneck_matching(a, b).distance
}

/// `ω(t) = 2t(1 − ln 2t)`, with `ω(0) = 0`.
pub fn modulus(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        2.0 * t * (1.0 - (2.0 * t).ln())
    }
}

/// The constants of the continuity argument for one `(n, L′, δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityConstants {
    pub bar_count: usize,
    pub total_length: f64,
    pub delta: f64,
    /// `4nδ / L′`
    pub delta_prime: f64,
    /// `ω(δ′)`, the per-term entropy change bound.
    pub epsilon_prime: f64,
    /// `n·ε′`
    pub epsilon: f64,
}

impl StabilityConstants {
    pub fn new(bar_count: usize, total_length: f64, delta: f64) -> StabilityConstants {
        let n = bar_count as f64;
        let delta_prime = 4.0 * n * delta / total_length;
        let epsilon_prime = modulus(delta_prime);
        StabilityConstants {
            bar_count,
            total_length,
            delta,
            delta_prime,
            epsilon_prime,
            epsilon: n * epsilon_prime,
        }
    }

    /// Mean bar length `ℓ′ = L′ / n`; `δ′ = 4δ / ℓ′`.
    pub fn mean_length(&self) -> f64 {
        self.total_length / self.bar_count as f64
    }

    pub fn applicable(&self) -> bool {
        self.delta_prime <= MODULUS_LIMIT
    }

    fn checked(self) -> Result<StabilityConstants, StabilityError> {
        if self.applicable() {
            Ok(self)
        } else {
            Err(StabilityError::BoundInapplicable {
                delta_prime: self.delta_prime,
            })
        }
    }
}

/// `ε` such that `‖f − g‖∞ ≤ delta` implies `|H(f) − H(g)| ≤ ε`, with `n`
/// and `L′` taken from `reference`.
pub fn entropy_stability_bound(reference: &Diagram, delta: f64) -> Result<f64, StabilityError> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(StabilityError::InvalidDelta(delta));
    }
    Ok(
        StabilityConstants::new(reference.len(), reference.total_length(), delta)
            .checked()?
            .epsilon,
    )
}

/// Largest `δ` whose bound from [`entropy_stability_bound`] stays within
/// `epsilon`, found by bisection. Returns the edge of the valid range if
/// every applicable `δ` works.
pub fn delta_for_epsilon(reference: &Diagram, epsilon: f64) -> Result<f64, StabilityError> {
    let n = reference.len() as f64;
    let total = reference.total_length();
    let delta_max = MODULUS_LIMIT * total / (4.0 * n);
    let bound = |d: f64| StabilityConstants::new(reference.len(), total, d).epsilon;
    if bound(delta_max) <= epsilon {
        return Ok(delta_max);
    }
    let (mut lo, mut hi) = (0.0, delta_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bound(mid) <= epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Everything [`verify_stability`] measured for one pair of signals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub sup_dist: f64,
    pub bottleneck: f64,
    pub entropy_f: f64,
    pub entropy_g: f64,
    pub entropy_gap: f64,
    pub bar_count: usize,
    pub delta_prime: f64,
    /// `None` when `δ′` exceeds the modulus range.
    pub bound_epsilon: Option<f64>,
    pub diagram_bound_holds: bool,
    pub entropy_bound_holds: bool,
}

impl StabilityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization is infallible")
    }
}

/// Compares two signals on the same grid.
///
/// The entropy bound uses `n = max(|D(f)|, |D(g)|)` and the smaller of the
/// two total lengths as `L′`, with `δ = ‖f − g‖∞`.
pub fn verify_stability(f: &Signal, g: &Signal) -> Result<StabilityReport, StabilityError> {
    let sup_dist = sup_distance(f, g)?;
    let barcode_f = compute_barcode(&lower_star_filtration(f));
    let barcode_g = compute_barcode(&lower_star_filtration(g));
    let entropy_f = persistent_entropy(&barcode_f)?.raw_entropy;
    let entropy_g = persistent_entropy(&barcode_g)?.raw_entropy;
    let diagram_f = Diagram::from_barcode(&barcode_f)?;
    let diagram_g = Diagram::from_barcode(&barcode_g)?;
    let bottleneck = bottleneck_distance(&diagram_f, &diagram_g);

    let bar_count = diagram_f.len().max(diagram_g.len());
    let total = diagram_f.total_length().min(diagram_g.total_length());
    let constants = StabilityConstants::new(bar_count, total, sup_dist);
    let bound_epsilon = constants.applicable().then_some(constants.epsilon);
    let entropy_gap = (entropy_f - entropy_g).abs();

    Ok(StabilityReport {
        sup_dist,
        bottleneck,
        entropy_f,
        entropy_g,
        entropy_gap,
        bar_count,
        delta_prime: constants.delta_prime,
        bound_epsilon,
        diagram_bound_holds: bottleneck <= sup_dist + DIAGRAM_BOUND_SLACK,
        entropy_bound_holds: bound_epsilon.is_some_and(|eps| entropy_gap <= eps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entropy_term;
    use crate::signal::shift;

    fn diagram(points: &[(f64, f64)]) -> Diagram {
        Diagram::new(points.to_vec()).unwrap()
    }

    #[test]
    fn identical_diagrams() {
        let d = diagram(&[(0.0, 3.0), (1.0, 2.0), (0.5, 4.0)]);
        assert_eq!(bottleneck_distance(&d, &d), 0.0);
        assert_eq!(bottleneck_distance(&diagram(&[]), &diagram(&[])), 0.0);
    }

    #[test]
    fn off_diagonal_match_beats_diagonal() {
        // matching the two points costs 1, sending both to the diagonal costs 5
        let m = bottleneck_matching(&diagram(&[(0.0, 10.0)]), &diagram(&[(1.0, 10.0)]));
        assert_eq!(m.distance, 1.0);
        assert_eq!(
            m.pairs,
            vec![MatchedPair::Points {
                first: 0,
                second: 0
            }]
        );
    }

    #[test]
    fn small_point_goes_to_diagonal() {
        let m = bottleneck_matching(
            &diagram(&[(0.0, 10.0), (3.0, 3.5)]),
            &diagram(&[(0.0, 10.5)]),
        );
        assert_eq!(m.distance, 0.5);
        assert!(m.pairs.contains(&MatchedPair::FirstToDiagonal(1)));
        let empty = bottleneck_distance(&diagram(&[(1.0, 4.0)]), &diagram(&[]));
        assert_eq!(empty, 1.5);
    }

    #[test]
    fn invalid_points() {
        assert!(Diagram::new(vec![(1.0, 1.0)]).is_err());
        assert!(Diagram::new(vec![(f64::NAN, 1.0)]).is_err());
    }

    #[test]
    fn modulus_dominates_entropy_term_changes() {
        for &t in &[1e-9, 1e-6, 1e-3, 0.02, 0.1, MODULUS_LIMIT] {
            let mut worst = 0.0f64;
            let steps = 100_000;
            for k in 0..=steps {
                let x = (1.0 - t) * k as f64 / steps as f64;
                worst = worst.max((entropy_term(x + t) - entropy_term(x)).abs());
            }
            assert!(worst <= modulus(t), "t = {t}: {worst} > {}", modulus(t));
        }
    }

    #[test]
    fn modulus_is_increasing_and_vanishes_at_zero() {
        assert_eq!(modulus(0.0), 0.0);
        let ts: Vec<f64> = (1..=100)
            .map(|k| MODULUS_LIMIT * k as f64 / 100.0)
            .collect();
        assert!(ts.windows(2).all(|w| modulus(w[0]) < modulus(w[1])));
    }

    #[test]
    fn bound_example() {
        // n = 2, L' = 4, δ = 0.01 → δ' = 0.02
        let d = diagram(&[(0.0, 3.0), (1.0, 2.0)]);
        let eps = entropy_stability_bound(&d, 0.01).unwrap();
        assert!((eps - 2.0 * modulus(0.02)).abs() < 1e-15);
        let c = StabilityConstants::new(2, 4.0, 0.01);
        assert!((c.delta_prime - 0.02).abs() < 1e-15);
    }

    #[test]
    fn bound_shrinks_with_delta() {
        let d = diagram(&[(0.0, 3.0), (1.0, 2.0), (0.2, 0.9)]);
        let mut last = f64::INFINITY;
        for k in 2..=12 {
            let eps = entropy_stability_bound(&d, 10f64.powi(-k)).unwrap();
            assert!(eps < last);
            last = eps;
        }
        assert!(last < 1e-9);
        assert_eq!(entropy_stability_bound(&d, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bound_outside_modulus_range() {
        let d = diagram(&[(0.0, 1.0)]);
        assert!(matches!(
            entropy_stability_bound(&d, 0.1),
            Err(StabilityError::BoundInapplicable { .. })
        ));
        assert!(entropy_stability_bound(&d, -1.0).is_err());
    }

    #[test]
    fn mean_length_identity() {
        // δ′ = 4nδ/L′ = 4δ/ℓ′, so δ′ ≤ 0.1 exactly when ℓ′ ≥ 40δ
        for &(n, total, delta) in &[(10, 50.0, 0.1), (1000, 1160.5, 0.03), (3, 1.2, 0.003)] {
            let c = StabilityConstants::new(n, total, delta);
            assert!((c.delta_prime - 4.0 * delta / c.mean_length()).abs() < 1e-15);
            assert_eq!(
                c.delta_prime <= 0.1 + 1e-15,
                c.mean_length() + 1e-12 >= 40.0 * delta
            );
        }
    }

    #[test]
    fn inverse_bound() {
        let d = diagram(&[(0.0, 3.0), (1.0, 2.0), (0.2, 0.9)]);
        for &eps in &[1e-6, 1e-3, 0.1] {
            let delta = delta_for_epsilon(&d, eps).unwrap();
            let achieved = entropy_stability_bound(&d, delta).unwrap();
            assert!(achieved <= eps);
            assert!((achieved - eps).abs() < 1e-9 * eps.max(1.0));
        }
    }

    #[test]
    fn self_comparison() {
        let f = Signal::from_values(&[0., 2., 1., 3., 0.5]).unwrap();
        let r = verify_stability(&f, &f).unwrap();
        assert_eq!((r.sup_dist, r.bottleneck, r.entropy_gap), (0.0, 0.0, 0.0));
        assert_eq!(r.bound_epsilon, Some(0.0));
        assert!(r.diagram_bound_holds && r.entropy_bound_holds);
    }

    #[test]
    fn vertical_shift() {
        let f = Signal::from_values(&[0., 2., 1., 3., 0.5, 2.5, 1.0]).unwrap();
        let g = shift(&f, 0.0, 0.25).unwrap();
        let r = verify_stability(&f, &g).unwrap();
        assert!(r.bottleneck <= 0.25);
        assert_eq!(r.entropy_gap, 0.0);
        assert!(r.diagram_bound_holds);
    }

    #[test]
    fn grid_mismatch_propagates() {
        let f = Signal::from_values(&[0., 1.]).unwrap();
        let g = Signal::from_values(&[0., 1., 2.]).unwrap();
        assert!(matches!(
            verify_stability(&f, &g),
            Err(StabilityError::Signal(SignalError::Incompatible(_)))
        ));
    }
}
