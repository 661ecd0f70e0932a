use num_traits::{One, Zero};
use proptest::prelude::*;

use nsf_core::io::{histogram_to_json, parse_landscape, Landscape};
use nsf_core::problems::{GraphProblem, Relabelled};
use nsf_core::properties::*;
use nsf_core::rational::{frac, int};
use nsf_core::synth::{generate_cm_histogram, generate_nsf_unskewed, SynthSpec, Violation};
use nsf_core::*;

/// Counts with non-zero ends.
fn histogram() -> impl Strategy<Value = FitnessHistogram> {
    (-5i64..5, prop::collection::vec(0u64..20, 1..10)).prop_map(|(v_min, mut counts)| {
        let last = counts.len() - 1;
        counts[0] = counts[0].max(1);
        counts[last] = counts[last].max(1);
        FitnessHistogram::from_counts(Sense::Maximize, v_min, &counts).unwrap()
    })
}

/// Strictly decreasing above a mode, anything positive below it.
fn strict_cm_histogram() -> impl Strategy<Value = FitnessHistogram> {
    (
        prop::collection::vec(1u64..6, 1..10),
        prop::collection::vec(1u64..=100, 0..6),
    )
        .prop_map(|(steps, below)| {
            let mut above = Vec::new();
            let mut c = 0;
            for s in steps.iter().rev() {
                c += s;
                above.push(c);
            }
            above.reverse();
            let mode = above[0];
            let mut counts: Vec<u64> = below.into_iter().map(|b| 1 + (b - 1) % mode).collect();
            counts.extend(above);
            FitnessHistogram::from_counts(Sense::Maximize, 0, &counts).unwrap()
        })
}

/// Unskewed rows: arbitrary masses at each distance, split in the global
/// better-side ratio, plus arbitrary mass at the level itself.
fn unskewed_over(hist: FitnessHistogram, weights: Vec<u32>) -> AggregateLandscape {
    let n = hist.grid().len();
    let v_min = hist.v_min();
    let mut nf = vec![vec![Rational::zero(); n]; n];
    let mut w = weights.into_iter().cycle();
    for v in hist.levels().filter(|&v| hist.occupied(v)) {
        let row = &mut nf[(v - v_min) as usize];
        row[(v - v_min) as usize] = int(w.next().unwrap() as i64 % 3 + 1);
        for d in 1..n as i64 {
            let Some(better) = hist.p_plus_delta(v, d) else {
                continue;
            };
            let mass = int(w.next().unwrap() as i64);
            if hist.grid().contains(v + d) {
                row[(v + d - v_min) as usize] += &mass * &better;
            }
            if hist.grid().contains(v - d) {
                row[(v - d - v_min) as usize] += &mass * (Rational::one() - &better);
            }
        }
    }
    AggregateLandscape::new(hist, nf, false).unwrap()
}

fn graph() -> impl Strategy<Value = GraphProblem> {
    (2usize..9).prop_flat_map(|n| {
        (
            prop::collection::vec(1i64..5, n),
            prop::collection::vec((0..n, 0..n), 0..(2 * n)),
        )
            .prop_map(|(labels, edges)| {
                let edges: Vec<_> = edges.into_iter().filter(|(a, b)| a != b).collect();
                GraphProblem::from_edges(Sense::Maximize, labels, &edges).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn telescoping_identity(h in histogram()) {
        for v in h.levels() {
            let span = h.v_max() - h.v_min();
            let summed: Rational = (1..=span)
                .filter_map(|d| h.p_plus_delta(v, d).map(|pp| h.p_delta(v, d) * pp))
                .sum();
            prop_assert_eq!(summed, h.p_plus(v).unwrap());
        }
    }

    #[test]
    fn strict_cm_implies_lemma(h in strict_cm_histogram()) {
        prop_assert!(check_cardinality_monotonic(&h, true).passed());
        prop_assert!(check_lemma1(&h).passed());
    }

    #[test]
    fn unskewed_decomposition(h in strict_cm_histogram(), weights in prop::collection::vec(0u32..7, 1..40)) {
        let agg = unskewed_over(h, weights);
        prop_assert!(check_unskewed(&agg, &int(0)).passed());
        let hist = agg.hist();
        for v in hist.levels() {
            let profile = agg.full_delta_profile(v).unwrap();
            prop_assert_eq!(profile.neighbour_weighted_p_plus(), agg.pn_plus(v).unwrap());
        }
    }

    /// Random NSF gap sequences over an independent unskewed construction.
    #[test]
    fn premises_imply_conclusion(
        h in strict_cm_histogram(),
        raw in prop::collection::vec(0u32..50, 1..8),
        slack in 0u32..3,
    ) {
        let ge = good_enough(&h);
        let span = (h.v_max() - ge) as usize;
        prop_assume!(span >= 1);
        // non-increasing gaps, positive first, non-negative total
        let mut gaps: Vec<Rational> = (0..span).map(|i| frac(raw[i % raw.len()] as i64, 1000)).collect();
        gaps.sort_by(|a, b| b.cmp(a));
        let mean: Rational = gaps.iter().sum::<Rational>() / int(span as i64);
        let shift = frac(slack as i64, 2) * mean;
        let gaps: Vec<Rational> = gaps.into_iter().map(|g| g - &shift).collect();
        prop_assume!(gaps[0] > Rational::zero());
        prop_assume!(gaps.iter().sum::<Rational>() >= Rational::zero());

        let n = h.grid().len();
        let mut nf = vec![vec![Rational::zero(); n]; n];
        let mut feasible = true;
        for v in h.levels() {
            let base: Vec<Rational> = (1..=span as i64).map(|d| h.p_delta(v, d)).collect();
            let shares: Vec<Rational> = base.iter().zip(&gaps).map(|(p, e)| p + e).collect();
            let total: Rational = shares.iter().sum();
            if shares.iter().any(|s| s < &Rational::zero()) || total > Rational::one() {
                feasible = false;
                break;
            }
            let row = &mut nf[v as usize];
            for (i, share) in shares.iter().enumerate() {
                let d = i as i64 + 1;
                let better = h.p_plus_delta(v, d).unwrap();
                if h.grid().contains(v + d) {
                    row[(v + d) as usize] = share * &better;
                }
                if h.grid().contains(v - d) {
                    row[(v - d) as usize] = share * (Rational::one() - &better);
                }
            }
            row[v as usize] = Rational::one() - total;
        }
        prop_assume!(feasible);
        let agg = AggregateLandscape::new(h.clone(), nf, false).unwrap();
        prop_assert!(check_nsf(&agg).passed());
        prop_assert!(check_unskewed(&agg, &int(0)).passed());
        let report = verify_theorem1(&agg);
        prop_assert_eq!(report.verdict, Verdict::Holds);
        for v in ge..h.v_max() {
            prop_assert!(agg.pn_plus(v).unwrap() > h.p_plus(v).unwrap());
        }
    }

    #[test]
    fn effective_from_is_a_suffix(seed in 0u64..10_000) {
        let spec = SynthSpec::for_seed(seed, Violation::None);
        let agg = generate_nsf_unskewed(&generate_cm_histogram(&spec), &spec).unwrap();
        let hist = agg.hist();
        let report = check_effective_landscape(&agg);
        prop_assert!(report.passed());
        let from = effective_from(&agg).unwrap();
        prop_assert!(from <= good_enough(hist));
        for v in from..hist.v_max() {
            prop_assert!(check_effective_at(&agg, v).unwrap().passed());
        }
    }

    #[test]
    fn cm_closed_under_relabelling(g in graph(), seed in any::<u64>()) {
        let cfg = EnumerationConfig::default();
        let before = build_histogram(&g, &cfg).unwrap();
        let after = build_histogram(&Relabelled::shuffled(g, seed, &cfg).unwrap(), &cfg).unwrap();
        let report = check_permutation_closure(&before, &after).unwrap();
        prop_assert!(report.passed());
        for strict in [false, true] {
            prop_assert_eq!(
                check_cardinality_monotonic(&before, strict).verdict,
                check_cardinality_monotonic(&after, strict).verdict
            );
        }
    }

    #[test]
    fn worker_count_does_not_change_results(g in graph(), workers in 2usize..5) {
        let serial = EnumerationConfig::default().with_workers(1);
        let parallel = EnumerationConfig::default().with_workers(workers);
        prop_assert_eq!(build_aggregate(&g, &serial).unwrap(), build_aggregate(&g, &parallel).unwrap());
    }

    #[test]
    fn aggregate_respects_set_semantics(g in graph()) {
        let agg = build_aggregate(&g, &EnumerationConfig::default()).unwrap();
        for v in agg.hist().levels() {
            for w in agg.hist().levels() {
                prop_assert!(agg.nf(v, w) <= agg.hist().count(w));
            }
        }
    }

    #[test]
    fn cm_witness_reproduces_violation(h in histogram(), strict in any::<bool>()) {
        let report = check_cardinality_monotonic(&h, strict);
        prop_assert_eq!(report.verdict == Verdict::Fails, report.witness.is_some());
        if let Some(w) = report.witness {
            prop_assert_eq!(&w.lhs, &h.count(w.v));
            prop_assert_eq!(&w.rhs, &h.count(w.v + 1));
            let violated = if strict { w.rhs >= w.lhs } else { w.rhs > w.lhs };
            prop_assert!(violated);
        }
    }

    #[test]
    fn histogram_json_round_trip(h in histogram()) {
        prop_assert_eq!(parse_landscape(&histogram_to_json(&h)).unwrap(), Landscape::Histogram(h));
    }

    #[test]
    fn synth_is_deterministic(seed in any::<u64>()) {
        let spec = SynthSpec::for_seed(seed, Violation::None);
        let a = generate_nsf_unskewed(&generate_cm_histogram(&spec), &spec);
        let b = generate_nsf_unskewed(&generate_cm_histogram(&spec), &spec);
        prop_assert_eq!(a.ok(), b.ok());
    }
}
