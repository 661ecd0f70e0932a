//! End-to-end acceptance run. Prints one line per criterion and fails the
//! target if any criterion outside `KNOWN_UNATTAINABLE` fails, or if one of
//! those starts passing (so the list cannot go stale).

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};

use nsf_core::io::histogram_csv;
use nsf_core::problems::*;
use nsf_core::properties::*;
use nsf_core::rational::{frac, int, to_f64};
use nsf_core::search::{estimate_improvement, SampleMode};
use nsf_core::synth::{
    generate_cm_histogram, run_suite, summarize, uniform_neighbourhood, SynthSpec, Violation,
};
use nsf_core::*;

/// Checks that fail for reasons recorded in the decisions ledger. The
/// footnote TSP share at or better than length 110 is 9.26%, outside the
/// [5.5%, 7%] window; the strict share (< 110) is 6.32%.
const KNOWN_UNATTAINABLE: &[&str] = &["3.share"];

struct Check {
    id: &'static str,
    ok: bool,
    detail: String,
}

fn check(id: &'static str, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        id,
        ok,
        detail: detail.into(),
    }
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_1() -> Vec<Check> {
    // oracle first: compositions of 15 into five parts in 1..=5
    let oracle: i64 = (0..=5)
        .map(|j| (if j % 2 == 0 { 1 } else { -1 }) * binomial(5, j) * binomial(15 - 5 * j - 1, 4))
        .sum();
    let start = Instant::now();
    let enumerated =
        build_histogram(&make_sum_of_terms(5, 5), &EnumerationConfig::default()).unwrap();
    let convolved = convolution_census(5, 5).unwrap();
    let elapsed = start.elapsed();
    let symmetric = (5..=25).all(|v| enumerated.count(v) == enumerated.count(30 - v));
    vec![
        check(
            "1.agree",
            enumerated == convolved,
            "enumeration == convolution",
        ),
        check(
            "1.ends",
            enumerated.count(5) == int(1) && enumerated.count(25) == int(1),
            "counts[5] = counts[25] = 1",
        ),
        check("1.symmetric", symmetric, "symmetric about 15"),
        check(
            "1.centre",
            oracle == 381 && enumerated.count(15) == int(oracle),
            format!("counts[15] = {} (oracle {oracle})", enumerated.count(15)),
        ),
        check(
            "1.time",
            elapsed < Duration::from_secs(1),
            format!("{elapsed:.2?}"),
        ),
    ]
}

fn criterion_2() -> Vec<Check> {
    let hist = convolution_census(5, 5).unwrap();
    let ge = good_enough(&hist);
    let share = hist.count_above(ge - 1) / hist.total();
    let pct = 100.0 * to_f64(&share);
    vec![
        check("2.v_ge", ge == 20, format!("v_ge = {ge}")),
        check(
            "2.share",
            share == frac(247, 3125) && (6.0..=8.0).contains(&pct),
            format!("at or above v_ge: {share} = {pct:.2}%"),
        ),
    ]
}

/// Length distribution of directed tours from city 0 by subset dynamic
/// programming, independent of the permutation walk.
fn tsp_lengths_by_dp(t: &TspInstance) -> Vec<u64> {
    let n = t.n();
    let width = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| t.dist(a, b))
        .max()
        .unwrap() as usize
        * n
        + 1;
    let full = 1usize << n;
    let mut dp = vec![Vec::<u64>::new(); full * n];
    let at = |mask: usize, last: usize| mask * n + last;
    for c in 1..n {
        let mut v = vec![0; width];
        v[t.dist(0, c) as usize] = 1;
        dp[at(1 | 1 << c, c)] = v;
    }
    for mask in 0..full {
        if mask & 1 == 0 {
            continue;
        }
        for last in 1..n {
            if dp[at(mask, last)].is_empty() {
                continue;
            }
            let here = dp[at(mask, last)].clone();
            for next in 1..n {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let d = t.dist(last, next) as usize;
                let slot = &mut dp[at(mask | 1 << next, next)];
                if slot.is_empty() {
                    *slot = vec![0; width];
                }
                for (len, &c) in here.iter().enumerate() {
                    if c > 0 {
                        slot[len + d] += c;
                    }
                }
            }
        }
    }
    let mut out = vec![0u64; width];
    for last in 1..n {
        for (len, &c) in dp[at(full - 1, last)].iter().enumerate() {
            if c > 0 {
                out[len + t.dist(last, 0) as usize] += c;
            }
        }
    }
    out
}

fn criterion_3() -> Vec<Check> {
    let tsp = make_footnote_tsp(12, 20).unwrap();
    let start = Instant::now();
    let parallel = tsp_census(&tsp, &TspCensusConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let serial = tsp_census(
        &tsp,
        &TspCensusConfig {
            workers: 1,
            ..Default::default()
        },
    )
    .unwrap();
    let mut dp = tsp_lengths_by_dp(&tsp);
    dp.truncate(parallel.by_length.len());

    let hist = &parallel.hist;
    let ge = good_enough(hist);
    // minimisation levels are negated lengths
    let inclusive = hist.count_above(ge - 1) / hist.total();
    let strict = hist.count_above(ge) / hist.total();
    let pct = 100.0 * to_f64(&inclusive);
    vec![
        check(
            "3.extremes",
            (
                parallel.min_length,
                parallel.max_length,
                parallel.modal_length,
            ) == (102, 140, 118),
            format!(
                "min {} max {} mode {}",
                parallel.min_length, parallel.max_length, parallel.modal_length
            ),
        ),
        check(
            "3.total",
            parallel.total == 39_916_800,
            format!("{} assignments", parallel.total),
        ),
        check("3.oracle", dp == parallel.by_length, "matches subset DP"),
        check(
            "3.share",
            (5.5..=7.0).contains(&pct),
            format!(
                "length <= {}: {pct:.2}% (strictly shorter: {:.2}%)",
                -ge,
                100.0 * to_f64(&strict)
            ),
        ),
        check(
            "3.deterministic",
            serial == parallel && histogram_csv(&serial.hist) == histogram_csv(&parallel.hist),
            "serial == parallel",
        ),
        check(
            "3.time",
            elapsed < Duration::from_secs(120),
            format!("{elapsed:.2?}"),
        ),
    ]
}

fn criterion_4() -> Vec<Check> {
    let agg = build_aggregate(&make_toy_fig3(), &EnumerationConfig::default()).unwrap();
    vec![
        check(
            "4.p_plus",
            agg.hist().p_plus(3).unwrap() == frac(2, 22),
            format!("p+ = {}", agg.hist().p_plus(3).unwrap()),
        ),
        check(
            "4.pn_plus",
            agg.pn_plus(3).unwrap() == frac(2, 15),
            format!("pn+ = {}", agg.pn_plus(3).unwrap()),
        ),
        check(
            "4.effective",
            check_effective_at(&agg, 3).unwrap().passed(),
            "effective at 3",
        ),
        check(
            "4.cm",
            check_cardinality_monotonic(agg.hist(), true).passed(),
            "strict CM",
        ),
    ]
}

/// pn⁺ and its δ decomposition, both straight from raw matrix entries.
fn decomposition_holds(agg: &AggregateLandscape) -> bool {
    let h = agg.hist();
    h.levels().filter(|&v| h.occupied(v)).all(|v| {
        let size: Rational = h.levels().map(|w| agg.nf(v, w)).sum();
        if size.is_zero() {
            return true;
        }
        let better: Rational = (v + 1..=h.v_max()).map(|w| agg.nf(v, w)).sum();
        let direct = better / &size;
        let summed: Rational = (1..=h.v_max() - h.v_min())
            .filter_map(|d| {
                let up = h.count(v + d);
                let down = h.count(v - d);
                let ctn = agg.nf(v, v + d) + agg.nf(v, v - d);
                (!ctn.is_zero()).then(|| &ctn / &size * (&up / (&up + down)))
            })
            .sum();
        direct == summed
    })
}

fn criterion_5() -> Vec<Check> {
    let start = Instant::now();
    let cases = run_suite(0, 1000, Violation::None);
    let summary = summarize(Violation::None, &cases);
    let elapsed = start.elapsed();
    let violations = cases
        .iter()
        .filter_map(|c| c.landscape.as_ref())
        .filter(|agg| {
            let h = agg.hist();
            (good_enough(h)..h.v_max()).any(|v| agg.pn_plus(v).unwrap() <= h.p_plus(v).unwrap())
        })
        .count();
    let exact = cases
        .iter()
        .filter_map(|c| c.landscape.as_ref())
        .filter(|agg| decomposition_holds(agg))
        .count();
    vec![
        check(
            "5.premises",
            summary.premises_held == 1000,
            format!("{} / 1000 satisfy the premises", summary.premises_held),
        ),
        check(
            "5.conclusion",
            violations == 0 && summary.conclusion_failures == 0 && summary.counterexamples == 0,
            format!("{violations} violations"),
        ),
        check(
            "5.decomposition",
            exact == 1000 && summary.decomposition_mismatches == 0,
            format!("exact on {exact} / 1000"),
        ),
        check(
            "5.time",
            elapsed < Duration::from_secs(60),
            format!("{elapsed:.2?}"),
        ),
    ]
}

fn criterion_6() -> Vec<Check> {
    let start = Instant::now();
    let mut strict_cm = 0;
    let mut violations = 0;
    let mut checker_agrees = 0;
    for seed in 0..1000 {
        let h = generate_cm_histogram(&SynthSpec::for_seed(seed, Violation::None));
        strict_cm += check_cardinality_monotonic(&h, true).passed() as usize;
        let ge = good_enough(&h);
        let cap = h.v_max() - ge;
        let mut bad = false;
        for v in ge + 1..=h.v_max() {
            for d in 1..cap {
                if let (Some(a), Some(b)) = (h.p_plus_delta(v, d), h.p_plus_delta(v, d + 1)) {
                    bad |= b > a;
                }
            }
            for d in (h.v_max() - v + 1)..=cap {
                bad |= h.p_plus_delta(v, d).is_some_and(|p| !p.is_zero());
            }
        }
        violations += bad as usize;
        checker_agrees += (check_lemma1(&h).passed() != bad) as usize;
    }
    let elapsed = start.elapsed();
    vec![
        check(
            "6.inputs",
            strict_cm == 1000,
            format!("{strict_cm} / 1000 strictly CM"),
        ),
        check(
            "6.lemma",
            violations == 0 && checker_agrees == 1000,
            format!("{violations} violations"),
        ),
        check(
            "6.time",
            elapsed < Duration::from_secs(10),
            format!("{elapsed:.2?}"),
        ),
    ]
}

fn criterion_7() -> Vec<Check> {
    let hist = build_histogram(&make_toy_fig3(), &EnumerationConfig::default()).unwrap();
    let uniform = uniform_neighbourhood(&hist);
    let equal = hist.levels().all(|v| {
        uniform.pn_plus(v).unwrap() == hist.p_plus(v).unwrap()
            && !check_effective_at(&uniform, v).unwrap().passed()
    });
    let broken = summarize(Violation::BreakCm, &run_suite(0, 1000, Violation::BreakCm));
    vec![
        check("7.uniform", equal, "pn+ = p+ at every level"),
        check(
            "7.break_cm",
            broken.conclusion_failures >= 1,
            format!("{} / 1000 conclusion failures", broken.conclusion_failures),
        ),
    ]
}

fn criterion_8() -> Vec<Check> {
    let cfg = EnumerationConfig::default();
    let before = build_histogram(&make_sum_of_terms(5, 5), &cfg).unwrap();
    let agree = (0..100)
        .filter(|&seed| {
            let shuffled = Relabelled::shuffled(make_sum_of_terms(5, 5), seed, &cfg).unwrap();
            let after = build_histogram(&shuffled, &cfg).unwrap();
            after == before
                && check_permutation_closure(&before, &after).unwrap().passed()
                && [false, true].iter().all(|&s| {
                    check_cardinality_monotonic(&before, s).verdict
                        == check_cardinality_monotonic(&after, s).verdict
                })
        })
        .count();
    vec![check(
        "8.closure",
        agree == 100,
        format!("{agree} / 100 agree"),
    )]
}

fn criterion_9() -> Vec<Check> {
    let n = 100i64;
    let overlaps: Vec<Rational> = (0..30)
        .map(|seed| flip_overlap_fraction(&make_random_3sat(100, 430, seed).unwrap()))
        .collect();
    let mean = overlaps.iter().sum::<Rational>() / int(30);
    // a clause draws three distinct variables: it misses a given one with
    // probability C(n−1, 3) / C(n, 3)
    let analytic = Rational::one() - frac(binomial(n - 1, 3), binomial(n, 3));
    vec![
        check(
            "9.mean",
            (0.025..=0.035).contains(&to_f64(&mean)),
            format!("mean overlap {:.4}", to_f64(&mean)),
        ),
        check(
            "9.exact",
            analytic == frac(3, 100),
            format!("expected {analytic}"),
        ),
    ]
}

fn criterion_10() -> Vec<Check> {
    let toy = make_toy_fig3();
    let index = index_levels(&toy, &EnumerationConfig::default()).unwrap();
    let target = 2.0 / 22.0;
    let within = (0..20)
        .filter(|&seed| {
            estimate_improvement(&toy, &index, 3, SampleMode::Random, 100_000, seed)
                .unwrap()
                .within(target, 3.0)
        })
        .count();
    vec![check(
        "10.within",
        within >= 19,
        format!("{within} / 20 within 3 SE"),
    )]
}

fn main() {
    let known: BTreeSet<&str> = KNOWN_UNATTAINABLE.iter().copied().collect();
    let criteria: [fn() -> Vec<Check>; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut unexpected = Vec::new();
    for (i, run) in criteria.iter().enumerate() {
        let start = Instant::now();
        let checks = run();
        let ok = checks.iter().all(|c| c.ok);
        let parts: Vec<String> = checks
            .iter()
            .map(|c| {
                format!(
                    "{}{}: {}",
                    if c.ok { "" } else { "FAILED " },
                    c.id,
                    c.detail
                )
            })
            .collect();
        println!(
            "criterion {:>2} {} [{:.2?}] {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed(),
            parts.join("; ")
        );
        for c in &checks {
            if c.ok == known.contains(c.id) {
                unexpected.push(c.id);
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for: {unexpected:?}");
        std::process::exit(1);
    }
    println!("all criteria as expected; known unattainable: {KNOWN_UNATTAINABLE:?}");
}
