mod common;

use pentropy::classify::{auc, best_threshold, roc_curve, Label, LabeledScore};
use pentropy::filtration::{lower_star_filtration, schedule, Simplex};
use pentropy::persistence::{compute_barcode, oracle_barcode, Barcode};
use pentropy::stability::{bottleneck_distance, Diagram};
use pentropy::{load_signal, persistent_entropy, shift, sup_distance, Format, Signal};
use proptest::prelude::*;

fn lattice_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        (-4096i64..=4096).prop_map(|k| k as f64 / 1024.0),
        1..=max_len,
    )
}

fn tie_heavy_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0i64..4).prop_map(|k| k as f64), 1..=max_len)
}

fn any_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![lattice_values(max_len), tie_heavy_values(max_len)]
}

fn signal(values: &[f64]) -> Signal {
    Signal::from_values(values).unwrap()
}

proptest! {
    #[test]
    fn sup_distance_is_a_metric(
        (a, b, c) in (1usize..40).prop_flat_map(|n| {
            let v = || prop::collection::vec(-100.0f64..100.0, n);
            (v(), v(), v())
        })
    ) {
        let (f, g, h) = (signal(&a), signal(&b), signal(&c));
        let fg = sup_distance(&f, &g).unwrap();
        prop_assert_eq!(fg, sup_distance(&g, &f).unwrap());
        prop_assert_eq!(sup_distance(&f, &f).unwrap(), 0.0);
        prop_assert_eq!(fg == 0.0, a == b);
        let fh = sup_distance(&f, &h).unwrap();
        let gh = sup_distance(&g, &h).unwrap();
        prop_assert!(fh <= fg + gh + 1e-12);
    }

    #[test]
    fn shifts_compose(values in lattice_values(50), a in -64i64..64, b in -64i64..64, c in -64i64..64, d in -64i64..64) {
        let (a, b, c, d) = (a as f64 / 4.0, b as f64 / 4.0, c as f64 / 4.0, d as f64 / 4.0);
        let f = signal(&values);
        let twice = shift(&shift(&f, a, b).unwrap(), c, d).unwrap();
        prop_assert_eq!(twice, shift(&f, a + c, b + d).unwrap());
    }

    #[test]
    fn json_round_trip_is_bit_exact(pairs in prop::collection::vec((any::<f64>(), any::<f64>()), 1..30)) {
        let pairs: Vec<(f64, f64)> = pairs.into_iter().filter(|(t, v)| t.is_finite() && v.is_finite()).collect();
        prop_assume!(!pairs.is_empty());
        if let Ok(f) = Signal::from_pairs(&pairs) {
            let back = load_signal(f.to_json().as_bytes(), Format::Json).unwrap();
            for (x, y) in f.samples().iter().zip(back.samples()) {
                prop_assert_eq!(x.time.to_bits(), y.time.to_bits());
                prop_assert_eq!(x.value.to_bits(), y.value.to_bits());
            }
        }
    }

    #[test]
    fn complex_invariants(values in any_values(60)) {
        let c = lower_star_filtration(&signal(&values));
        prop_assert_eq!(c.edge_count() + 1, c.vertex_count());
        prop_assert_eq!(c.vertex_filters(), &values[..]);
        for (i, &e) in c.edge_filters().iter().enumerate() {
            prop_assert_eq!(e, values[i].max(values[i + 1]));
        }
    }

    #[test]
    fn schedule_invariants(values in any_values(60)) {
        let c = lower_star_filtration(&signal(&values));
        let order = schedule(&c);
        prop_assert_eq!(order.len(), c.simplex_count());
        prop_assert!(order.entries().windows(2).all(|w| w[0].filter <= w[1].filter));
        let mut position = vec![0; c.vertex_count()];
        for (pos, e) in order.iter().enumerate() {
            if let Simplex::Vertex(v) = e.simplex {
                position[v] = pos;
            }
        }
        for (pos, e) in order.iter().enumerate() {
            if let Simplex::Edge(i) = e.simplex {
                prop_assert!(position[i] < pos && position[i + 1] < pos);
            }
        }
        prop_assert_eq!(order, schedule(&c));
    }

    /// Adding `i·ρ` to `value[i]`, with `ρ` below a tenth of the smallest
    /// value gap divided by the length, orders vertices and edges exactly as
    /// the symbolic tie-break does and pairs the same vertices with the same
    /// edges (the ramp only adds bars of length below `n·ρ`).
    #[test]
    fn symbolic_tie_break_matches_linear_ramp(values in tie_heavy_values(40)) {
        let n = values.len();
        let mut distinct = values.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let gap = distinct.windows(2).map(|w| w[1] - w[0]).fold(1.0, f64::min);
        let rho = gap / (10.0 * n as f64);
        let ramped: Vec<f64> = values.iter().enumerate().map(|(i, v)| v + i as f64 * rho).collect();

        let plain = lower_star_filtration(&signal(&values));
        let tilted = lower_star_filtration(&signal(&ramped));
        let restrict = |c: &pentropy::FilteredComplex, dim: usize| -> Vec<usize> {
            schedule(c).iter().filter(|e| e.simplex.dimension() == dim).map(|e| e.simplex.index()).collect()
        };
        prop_assert_eq!(restrict(&plain, 0), restrict(&tilted, 0));
        prop_assert_eq!(restrict(&plain, 1), restrict(&tilted, 1));

        let pairing = |b: &Barcode| {
            let mut p: Vec<_> = b.intervals().iter().map(|i| (i.birth_vertex, i.death_edge)).collect();
            p.sort();
            p
        };
        let symbolic = compute_barcode(&plain);
        let numeric = compute_barcode(&tilted);
        let kept: Vec<_> = numeric
            .intervals()
            .iter()
            .filter(|i| i.death_edge.map_or(true, |e| plain.edge_filters()[e] > values[i.birth_vertex]))
            .copied()
            .collect();
        prop_assert_eq!(pairing(&symbolic), pairing(&Barcode::new(kept, 0.0)));
        for i in numeric.intervals() {
            if let (Some(e), Some(len)) = (i.death_edge, i.length()) {
                if plain.edge_filters()[e] == values[i.birth_vertex] {
                    prop_assert!(len < n as f64 * rho);
                }
            }
        }
    }

    #[test]
    fn barcode_structure(values in any_values(64)) {
        let c = lower_star_filtration(&signal(&values));
        let b = compute_barcode(&c);
        prop_assert_eq!(b.unbounded_count(), 1);
        prop_assert_eq!(b.len(), common::strict_local_minimum_count(&values));
        let global_min = values.iter().copied().fold(f64::INFINITY, f64::min);
        for i in b.intervals() {
            prop_assert_eq!(i.dimension(), 0);
            prop_assert_eq!(values[i.birth_vertex], i.birth);
            match i.death {
                None => prop_assert_eq!(i.birth, global_min),
                Some(d) => {
                    prop_assert!(i.birth < d);
                    let e = i.death_edge.unwrap();
                    prop_assert_eq!(c.edge_filters()[e], d);
                    // the death value is attained at a local maximum vertex
                    let top = if values[e] >= values[e + 1] { e } else { e + 1 };
                    prop_assert_eq!(values[top], d);
                    let left = top == 0 || values[top - 1] <= d;
                    let right = top + 1 == values.len() || values[top + 1] <= d;
                    prop_assert!(left && right);
                }
            }
        }
        prop_assert!(b.same_multiset(&oracle_barcode(&c).unwrap()));
    }

    #[test]
    fn entropy_is_permutation_invariant(lengths in prop::collection::vec(0.01f64..10.0, 1..40), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let pairs: Vec<_> = lengths.iter().map(|&l| (0.0, Some(l))).collect();
        let mut shuffled = pairs.clone();
        shuffled.shuffle(&mut common::rng(seed));
        let a = persistent_entropy(&Barcode::from_pairs(&pairs, 10.0)).unwrap();
        let b = persistent_entropy(&Barcode::from_pairs(&shuffled, 10.0)).unwrap();
        prop_assert_eq!(a.raw_entropy.to_bits(), b.raw_entropy.to_bits());
    }

    #[test]
    fn entropy_result_invariants(lengths in prop::collection::vec(0.001f64..100.0, 1..60)) {
        let pairs: Vec<_> = lengths.iter().map(|&l| (1.0, Some(1.0 + l))).collect();
        let r = persistent_entropy(&Barcode::from_pairs(&pairs, 200.0)).unwrap();
        prop_assert!((r.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(r.raw_entropy >= 0.0);
        prop_assert!(r.raw_entropy <= (r.bar_count as f64).ln() + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&r.normalized_entropy));
        let mut sum = 0.0;
        for l in &r.lengths { sum += l; }
        prop_assert_eq!(r.total_length, sum);
    }

    /// Scaling values by `c > 0` scales every finite bar by `c`, so the
    /// normalized lengths of the finite bars are unchanged. The unbounded bar
    /// does not scale: its cut point `max + 1` has a fixed offset.
    #[test]
    fn finite_bars_scale_with_values(values in lattice_values(80), scale in 0.001f64..1000.0) {
        let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
        let finite = |vals: &[f64]| -> Vec<f64> {
            let mut l: Vec<f64> = compute_barcode(&lower_star_filtration(&signal(vals)))
                .intervals()
                .iter()
                .filter_map(|i| i.length())
                .collect();
            l.sort_by(f64::total_cmp);
            l
        };
        let (a, b) = (finite(&values), finite(&scaled));
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x * scale - y).abs() <= 1e-12 * y.abs().max(1e-300) + 1e-15 * scale);
        }
        if !a.is_empty() {
            let pairs = |l: &[f64]| l.iter().map(|&x| (0.0, Some(x))).collect::<Vec<_>>();
            let ha = persistent_entropy(&Barcode::from_pairs(&pairs(&a), 0.0)).unwrap().raw_entropy;
            let hb = persistent_entropy(&Barcode::from_pairs(&pairs(&b), 0.0)).unwrap().raw_entropy;
            prop_assert!((ha - hb).abs() <= 1e-12);
        }
    }

    #[test]
    fn bottleneck_is_a_pseudometric(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let d: Vec<Diagram> = (0..3).map(|_| Diagram::new(common::random_diagram(&mut rng, 8)).unwrap()).collect();
        let ab = bottleneck_distance(&d[0], &d[1]);
        prop_assert_eq!(ab, bottleneck_distance(&d[1], &d[0]));
        prop_assert_eq!(bottleneck_distance(&d[0], &d[0]), 0.0);
        prop_assert!(bottleneck_distance(&d[0], &d[2]) <= ab + bottleneck_distance(&d[1], &d[2]) + 1e-12);
    }

    #[test]
    fn auc_properties(seed in any::<u64>()) {
        let scores = common::random_scores(&mut common::rng(seed));
        let a = auc(&scores, Label::Faulty).unwrap();
        prop_assert!((a - common::pair_counting_auc(&scores, Label::Faulty)).abs() <= 1e-12);
        prop_assert!((a + auc(&scores, Label::Good).unwrap() - 1.0).abs() <= 1e-12);

        // strictly increasing transform: same AUC, same partition
        let warped: Vec<LabeledScore> = scores
            .iter()
            .map(|s| LabeledScore::new(s.id.clone(), (3.0 * s.score).exp() - 7.0, s.label))
            .collect();
        prop_assert_eq!(auc(&warped, Label::Faulty).unwrap(), a);
        let (t1, acc1) = best_threshold(&roc_curve(&scores, Label::Faulty).unwrap(), &scores);
        let (t2, acc2) = best_threshold(&roc_curve(&warped, Label::Faulty).unwrap(), &warped);
        prop_assert_eq!(acc1, acc2);
        prop_assert_eq!(acc1, common::best_accuracy_by_enumeration(&scores));
        for (s, w) in scores.iter().zip(&warped) {
            prop_assert_eq!(s.score > t1, w.score > t2);
        }
    }
}
