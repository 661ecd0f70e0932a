//! Decision procedures for landscape properties.
//!
//! Every check is exact and returns a [`PropertyReport`] whose witness, on
//! failure, is the first violated comparison found scanning levels upward
//! and, within a level, distances δ upward.

use num_traits::{Signed, Zero};

use crate::aggregate::{AggregateLandscape, DeltaProfile};
use crate::error::{Error, Result};
use crate::histogram::FitnessHistogram;
use crate::rational::{self, Rational};
use crate::report::{Property, PropertyReport, Verdict, Witness};

pub const GOOD_ENOUGH_RULE: &str = "v_mode + ceil((v_max - v_mode) / 2)";

/// Best level among those with the largest count.
pub fn modal_fitness(hist: &FitnessHistogram) -> i64 {
    let mut best = hist.v_min();
    for v in hist.levels() {
        if hist.count(v) >= hist.count(best) {
            best = v;
        }
    }
    best
}

/// Midpoint between the modal level and the optimum, rounded toward the
/// optimum.
pub fn good_enough(hist: &FitnessHistogram) -> i64 {
    let mode = modal_fitness(hist);
    let gap = hist.v_max() - mode;
    mode + (gap + 1) / 2
}

fn annotate(mut report: PropertyReport, hist: &FitnessHistogram) -> PropertyReport {
    let mode = modal_fitness(hist);
    let ge = good_enough(hist);
    report.v_mode = Some(mode);
    report.v_ge = Some(ge);
    report
        .detail(
            "v_mode_value",
            rational::to_display(&hist.grid().to_original(mode)),
        )
        .detail(
            "v_ge_value",
            rational::to_display(&hist.grid().to_original(ge)),
        )
        .detail("v_ge_rule", GOOD_ENOUGH_RULE)
}

/// Counts must not increase (strict: must decrease) from the modal level to
/// the optimum. Levels below the mode are ignored.
pub fn check_cardinality_monotonic(hist: &FitnessHistogram, strict: bool) -> PropertyReport {
    let mode = modal_fitness(hist);
    let witness = (mode..hist.v_max()).find_map(|v| {
        let (here, above) = (hist.count(v), hist.count(v + 1));
        let ok = if strict { above < here } else { above <= here };
        (!ok).then(|| {
            let relation = if strict {
                "ct[v] > ct[v+1]"
            } else {
                "ct[v] >= ct[v+1]"
            };
            Witness::new("monotone", v, Some(1), relation, here, above)
        })
    });
    annotate(
        PropertyReport::from_witness(Property::CardinalityMonotonic { strict }, witness),
        hist,
    )
}

/// `|pn⁺_{v,δ} − p⁺_{v,δ}| ≤ tolerance` wherever some neighbour lies at distance δ.
pub fn check_unskewed(agg: &AggregateLandscape, tolerance: &Rational) -> PropertyReport {
    let hist = agg.hist();
    let witness = hist.levels().filter(|&v| hist.occupied(v)).find_map(|v| {
        let profile = agg.full_delta_profile(v).expect("occupied level");
        profile.entries.into_iter().find_map(|e| {
            let pn_plus = e.pn_plus?;
            let p_plus = e.p_plus.expect("neighbours at v±δ imply solutions there");
            (&rational::abs_diff(&pn_plus, &p_plus) > tolerance).then(|| {
                Witness::new(
                    "unskewed",
                    v,
                    Some(e.delta),
                    "|pn+[v,δ] - p+[v,δ]| <= tolerance",
                    pn_plus,
                    p_plus,
                )
            })
        })
    });
    annotate(
        PropertyReport::from_witness(Property::Unskewed, witness),
        hist,
    )
    .detail("tolerance", rational::to_display(tolerance))
}

fn nsf_violation(profile: &DeltaProfile) -> Option<Witness> {
    let v = profile.v;
    let first = profile.entry(1)?;
    if first.gap() <= Rational::zero() {
        return Some(Witness::new(
            "b",
            v,
            Some(1),
            "pn[v,1] > p[v,1]",
            first.pn.clone(),
            first.p.clone(),
        ));
    }
    for pair in profile.entries.windows(2) {
        let (prev, next) = (pair[0].gap(), pair[1].gap());
        if next > prev {
            return Some(Witness::new(
                "a",
                v,
                Some(pair[1].delta),
                "gap[v,δ] <= gap[v,δ-1]",
                next,
                prev,
            ));
        }
    }
    let total = profile.total_pn() - profile.total_p();
    if total.is_negative() {
        return Some(Witness::new(
            "c",
            v,
            None,
            "sum_δ (pn[v,δ] - p[v,δ]) >= 0",
            total,
            Rational::zero(),
        ));
    }
    None
}

/// Over δ in `1..=v_max − v_ge`, at every occupied level: (b) the gap
/// `pn_{v,1} − p_{v,1}` is positive, (a) gaps never increase with δ, and
/// (c) gaps sum to a non-negative total.
pub fn check_nsf(agg: &AggregateLandscape) -> PropertyReport {
    let hist = agg.hist();
    let ge = good_enough(hist);
    if ge >= hist.v_max() {
        return annotate(
            PropertyReport::not_applicable(
                Property::Nsf,
                "no fitness distances between v_ge and v_max",
            ),
            hist,
        );
    }
    let witness = hist
        .levels()
        .filter(|&v| hist.occupied(v))
        .find_map(|v| nsf_violation(&agg.delta_profile(v, ge).expect("occupied level")));
    annotate(PropertyReport::from_witness(Property::Nsf, witness), hist)
}

fn effectiveness_witness(agg: &AggregateLandscape, v: i64) -> Result<Option<Witness>> {
    let pn = agg.pn_plus(v)?;
    let p = agg.hist().p_plus(v)?;
    Ok((pn <= p).then(|| Witness::new("strict", v, None, "pn+[v] > p+[v]", pn, p)))
}

/// `pn⁺_v > p⁺_v`.
pub fn check_effective_at(agg: &AggregateLandscape, v: i64) -> Result<PropertyReport> {
    let report =
        PropertyReport::from_witness(Property::EffectiveAt(v), effectiveness_witness(agg, v)?)
            .detail("pn_plus", rational::to_string(&agg.pn_plus(v)?))
            .detail("p_plus", rational::to_string(&agg.hist().p_plus(v)?));
    Ok(annotate(report, agg.hist()))
}

/// Smallest level `v*` such that every occupied level in `[v*, v_max)` is
/// effective, if any is.
pub fn effective_from(agg: &AggregateLandscape) -> Option<i64> {
    let hist = agg.hist();
    let mut lowest = None;
    for v in (hist.v_min()..hist.v_max()).rev() {
        if hist.occupied(v) {
            if effectiveness_witness(agg, v)
                .expect("occupied level")
                .is_some()
            {
                break;
            }
            lowest = Some(v);
        } else if lowest.is_some() {
            lowest = Some(v);
        }
    }
    lowest
}

fn conclusion_witness(agg: &AggregateLandscape, from: i64) -> Option<Witness> {
    let hist = agg.hist();
    (from..hist.v_max())
        .filter(|&v| hist.occupied(v))
        .find_map(|v| effectiveness_witness(agg, v).expect("occupied level"))
}

/// Effectiveness at every occupied level in `[v_ge, v_max)`.
pub fn check_effective_landscape(agg: &AggregateLandscape) -> PropertyReport {
    let hist = agg.hist();
    let ge = good_enough(hist);
    let from = effective_from(agg).map_or("none".to_string(), |v| v.to_string());
    let report = if ge >= hist.v_max() {
        PropertyReport::not_applicable(Property::EffectiveLandscape, "v_ge equals v_max")
    } else {
        PropertyReport::from_witness(Property::EffectiveLandscape, conclusion_witness(agg, ge))
    };
    annotate(report.detail("effective_from", from), hist)
}

/// `p⁺_{v,δ+1} ≤ p⁺_{v,δ}` for `v > v_ge` and consecutive δ, δ+1 in
/// `1..=v_max − v_ge` wherever both are defined, and `p⁺_{v,δ} = 0` once `δ > v_max − v`.
pub fn check_lemma1(hist: &FitnessHistogram) -> PropertyReport {
    let ge = good_enough(hist);
    let cap = hist.v_max() - ge;
    let witness = (ge + 1..=hist.v_max()).find_map(|v| {
        (1..=cap).find_map(|d| {
            let here = hist.p_plus_delta(v, d);
            if d > hist.v_max() - v {
                if let Some(p) = here.as_ref().filter(|p| !p.is_zero()) {
                    return Some(Witness::new(
                        "tail",
                        v,
                        Some(d),
                        "p+[v,δ] = 0",
                        p.clone(),
                        Rational::zero(),
                    ));
                }
            }
            if d == cap {
                return None;
            }
            match (here, hist.p_plus_delta(v, d + 1)) {
                (Some(here), Some(next)) if next > here => Some(Witness::new(
                    "monotone",
                    v,
                    Some(d + 1),
                    "p+[v,δ+1] <= p+[v,δ]",
                    next,
                    here,
                )),
                _ => None,
            }
        })
    });
    annotate(
        PropertyReport::from_witness(Property::Lemma1, witness),
        hist,
    )
}

/// Largest `x` with `pn_{v,δ} − p_{v,δ} > 0` for every `δ ≤ x`.
pub fn crossover(profile: &DeltaProfile) -> Option<i64> {
    profile
        .entries
        .iter()
        .take_while(|e| e.gap().is_positive())
        .last()
        .map(|e| e.delta)
}

/// Checks the premises (strict cardinality-monotonicity, NSF, exact
/// unskewedness) and the conclusion `pn⁺_v > p⁺_v` on `[v_ge, v_max)`.
///
/// Holds when premises and conclusion hold; fails with a witness when the
/// premises hold but the conclusion (or the unskewed decomposition
/// `pn⁺_v = Σ_δ pn_{v,δ}·p⁺_{v,δ}`) does not; is not applicable when a
/// premise fails, in which case the conclusion is still recorded.
pub fn verify_theorem1(agg: &AggregateLandscape) -> PropertyReport {
    let hist = agg.hist();
    let ge = good_enough(hist);
    let cm = check_cardinality_monotonic(hist, true);
    let nsf = check_nsf(agg);
    let unskewed = check_unskewed(agg, &Rational::zero());
    let premises = cm.passed() && nsf.passed() && unskewed.passed();

    if ge >= hist.v_max() {
        return annotate(
            PropertyReport::not_applicable(Property::Theorem1, "v_ge equals v_max"),
            hist,
        );
    }

    let conclusion = conclusion_witness(agg, ge);
    let conclusion_above = conclusion_witness(agg, ge + 1);

    let decomposition = if unskewed.passed() {
        (ge..hist.v_max())
            .filter(|&v| hist.occupied(v))
            .find_map(|v| {
                let direct = agg.pn_plus(v).expect("occupied level");
                let summed = agg
                    .full_delta_profile(v)
                    .expect("occupied level")
                    .neighbour_weighted_p_plus();
                (direct != summed).then(|| {
                    Witness::new(
                        "decomposition",
                        v,
                        None,
                        "pn+[v] = sum_δ pn[v,δ] * p+[v,δ]",
                        direct,
                        summed,
                    )
                })
            })
    } else {
        None
    };

    let x = hist
        .occupied(ge)
        .then(|| agg.delta_profile(ge, ge).ok().as_ref().and_then(crossover))
        .flatten();

    let verdict_of = |w: &Option<Witness>| {
        if w.is_some() {
            Verdict::Fails
        } else {
            Verdict::Holds
        }
    };
    let mut report = if !premises {
        let failed: Vec<String> = [&cm, &nsf, &unskewed]
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.property.to_string())
            .collect();
        let mut r = PropertyReport::not_applicable(Property::Theorem1, "premise fails")
            .detail("failed_premises", failed.join(","));
        if let Some(w) = &conclusion {
            r = r.detail("conclusion_witness", w);
        }
        r
    } else {
        PropertyReport::from_witness(
            Property::Theorem1,
            conclusion.clone().or_else(|| decomposition.clone()),
        )
    };
    report = report
        .detail("premise.cardinality_monotonic_strict", cm.verdict)
        .detail("premise.nsf", nsf.verdict)
        .detail("premise.unskewed", unskewed.verdict)
        .detail("conclusion.v_ge_inclusive", verdict_of(&conclusion))
        .detail("conclusion.above_v_ge", verdict_of(&conclusion_above))
        .detail(
            "decomposition",
            match (unskewed.passed(), &decomposition) {
                (false, _) => "skipped",
                (true, None) => "exact",
                (true, Some(_)) => "mismatch",
            },
        )
        .detail(
            "crossover_at_v_ge",
            x.map_or("none".into(), |x| x.to_string()),
        );
    annotate(report, hist)
}

/// Histograms before and after relabelling solutions must agree level by
/// level, and so must their cardinality-monotonicity verdicts.
pub fn check_permutation_closure(
    before: &FitnessHistogram,
    after: &FitnessHistogram,
) -> Result<PropertyReport> {
    if before.grid() != after.grid() {
        return Err(Error::GridMismatch);
    }
    let witness = before.levels().find_map(|v| {
        let (a, b) = (before.count(v), after.count(v));
        (a != b).then(|| Witness::new("counts", v, None, "ct[v] unchanged", b, a))
    });
    let cm_before = check_cardinality_monotonic(before, false).verdict;
    let cm_after = check_cardinality_monotonic(after, false).verdict;
    Ok(annotate(
        PropertyReport::from_witness(Property::PermutationClosure, witness),
        before,
    )
    .detail("cm_before", cm_before)
    .detail("cm_after", cm_after)
    .detail("cm_agree", cm_before == cm_after))
}

/// All reports in their fixed presentation order.
pub fn analyze(agg: &AggregateLandscape, tolerance: &Rational) -> Vec<PropertyReport> {
    let hist = agg.hist();
    let ge = good_enough(hist);
    let mut out = vec![
        check_cardinality_monotonic(hist, true),
        check_cardinality_monotonic(hist, false),
        check_unskewed(agg, tolerance),
        check_nsf(agg),
        check_lemma1(hist),
    ];
    if hist.occupied(ge) {
        out.push(check_effective_at(agg, ge).expect("occupied level"));
    }
    out.push(check_effective_landscape(agg));
    out.push(verify_theorem1(agg));
    out
}
