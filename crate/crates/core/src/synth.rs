//! Generators for abstract aggregate landscapes.
//!
//! Positive controls satisfy strict cardinality-monotonicity, NSF and exact
//! unskewedness by construction; negative controls break one of the three.
//! Everything is a pure function of the spec, so suites can run seeds in
//! parallel and reproduce any instance from its seed alone.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::AggregateLandscape;
use crate::error::{Error, Result};
use crate::grid::Sense;
use crate::histogram::FitnessHistogram;
use crate::properties::{good_enough, verify_theorem1};
use crate::rational::{self, Rational};
use crate::report::{PropertyReport, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Violation {
    None,
    BreakNsf,
    BreakCm,
    BreakUnskewed,
}

impl std::str::FromStr for Violation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "break-nsf" => Ok(Self::BreakNsf),
            "break-cm" => Ok(Self::BreakCm),
            "break-unskewed" => Ok(Self::BreakUnskewed),
            _ => Err(Error::Parse(format!("unknown violation {s:?}"))),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::BreakNsf => "break-nsf",
            Self::BreakCm => "break-cm",
            Self::BreakUnskewed => "break-unskewed",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapShape {
    /// `a·r^(δ−1)`: positive everywhere, no crossover.
    Positive,
    /// The geometric decay shifted down by `θ` times its mean, so the gap
    /// changes sign once and still sums to a non-negative total.
    Crossover,
}

/// Excess neighbour mass `e_δ` placed at fitness distance δ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapProfile {
    pub shape: GapShape,
    #[serde(with = "rational::serde_str")]
    pub scale: Rational,
    /// Decay ratio, in `(0, 1)`.
    #[serde(with = "rational::serde_str")]
    pub ratio: Rational,
    /// Shift factor for [`GapShape::Crossover`], in `(0, 1]`.
    #[serde(with = "rational::serde_str")]
    pub shift: Rational,
}

impl GapProfile {
    fn validate(&self) -> Result<()> {
        let unit = |q: &Rational| q.is_positive() && q < &Rational::one();
        if !self.scale.is_positive() || !unit(&self.ratio) {
            return Err(Error::InvalidInstance(
                "gap profile needs scale > 0 and 0 < ratio < 1".into(),
            ));
        }
        if !self.shift.is_positive() || self.shift > Rational::one() {
            return Err(Error::InvalidInstance(
                "gap shift must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// `e_1 … e_len`. A single distance always gets the positive shape, since
    /// shifting by the mean would zero it.
    pub fn values(&self, len: usize) -> Vec<Rational> {
        let mut decay = Vec::with_capacity(len);
        let mut term = self.scale.clone();
        for _ in 0..len {
            decay.push(term.clone());
            term *= &self.ratio;
        }
        if self.shape == GapShape::Positive || len < 2 {
            return decay;
        }
        let mean = decay.iter().sum::<Rational>() / rational::int(len as i64);
        let offset = &self.shift * mean;
        decay.into_iter().map(|g| g - &offset).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub levels: usize,
    /// Grid offset of the modal level.
    pub mode: usize,
    pub seed: u64,
    pub gap: GapProfile,
    pub violation: Violation,
}

const HIST_STREAM: u64 = 0;
const SPEC_STREAM: u64 = 1;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

impl SynthSpec {
    /// At least three levels, with the mode at least two below the optimum
    /// so that `v_ge < v_max` and the distance set is non-empty.
    pub fn new(
        levels: usize,
        mode: usize,
        seed: u64,
        gap: GapProfile,
        violation: Violation,
    ) -> Result<Self> {
        if levels < 3 {
            return Err(Error::InvalidInstance(format!(
                "{levels} levels, need at least 3"
            )));
        }
        if mode + 3 > levels {
            return Err(Error::InvalidInstance(format!(
                "mode offset {mode} leaves fewer than two levels above it"
            )));
        }
        gap.validate()?;
        Ok(Self {
            levels,
            mode,
            seed,
            gap,
            violation,
        })
    }

    /// Randomised parameters drawn from the seed: 3 to 12 levels, the mode at
    /// the bottom for half the seeds, and a crossover profile for three
    /// quarters of them.
    pub fn for_seed(seed: u64, violation: Violation) -> Self {
        let mut rng = stream(seed, SPEC_STREAM);
        let levels = rng.random_range(3..=12usize);
        let mode = if rng.random_bool(0.5) {
            0
        } else {
            rng.random_range(0..=levels - 3)
        };
        let shape = if rng.random_range(0..4) == 0 {
            GapShape::Positive
        } else {
            GapShape::Crossover
        };
        let gap = GapProfile {
            shape,
            scale: rational::frac(rng.random_range(5..=20), 100),
            ratio: rational::frac(rng.random_range(2..=6), 8),
            shift: rational::frac(rng.random_range(5..=10), 10),
        };
        Self::new(levels, mode, seed, gap, violation).expect("drawn parameters are valid")
    }
}

/// Counts over levels `0..L`, strictly decreasing above the mode and
/// positive everywhere. A break-CM spec plants a single-count dip just
/// below a spike somewhere above the mode.
pub fn generate_cm_histogram(spec: &SynthSpec) -> FitnessHistogram {
    let mut rng = stream(spec.seed, HIST_STREAM);
    let (len, mode) = (spec.levels, spec.mode);
    let mut counts = vec![0u64; len];
    counts[len - 1] = rng.random_range(1..=3);
    for i in (mode..len - 1).rev() {
        counts[i] = counts[i + 1] + rng.random_range(1..=4);
    }
    for i in 0..mode {
        counts[i] = rng.random_range(1..=counts[mode]);
    }
    if spec.violation == Violation::BreakCm {
        let dip = rng.random_range(mode + 1..=len - 2);
        counts[dip] = 1;
        counts[dip + 1] = counts[dip + 1].max(counts[mode] - 1).max(2);
    }
    FitnessHistogram::from_counts(Sense::Maximize, 0, &counts).expect("counts are positive")
}

/// Builds rows of exact neighbour shares (each row sums to 1).
///
/// At level `v` the share at distance δ is `p_{v,δ} + λ_v·e_δ`, where
/// `λ_v ≤ 1` is the largest factor keeping every share non-negative and
/// their total at most 1. A positive factor preserves the sign, ordering
/// and total-sign of the gaps, so NSF survives intact. Each share is then
/// split between `v+δ` and `v−δ` in the global better-side ratio, which
/// makes the landscape unskewed; leftover mass stays at `v`.
pub fn generate_nsf_unskewed(
    hist: &FitnessHistogram,
    spec: &SynthSpec,
) -> Result<AggregateLandscape> {
    if let Some(v) = hist.levels().find(|&v| !hist.occupied(v)) {
        return Err(Error::EmptyLevel { level: v });
    }
    let span = usize::try_from(hist.v_max() - good_enough(hist)).expect("v_ge <= v_max");
    let gaps = match spec.violation {
        Violation::BreakNsf => {
            let mut e = vec![Rational::zero(); span];
            if span > 1 {
                e[span - 1] = spec.gap.scale.clone();
            }
            e
        }
        _ => spec.gap.values(span),
    };

    let v_min = hist.v_min();
    let n = hist.grid().len();
    let mut nf = vec![vec![Rational::zero(); n]; n];
    for v in hist.levels() {
        let row = &mut nf[(v - v_min) as usize];
        let base: Vec<Rational> = (1..=span as i64).map(|d| hist.p_delta(v, d)).collect();
        let lambda = scale_factor(&base, &gaps);
        if spec.violation != Violation::BreakNsf && !lambda.is_positive() {
            return Err(Error::InfeasibleProfile {
                level: v,
                reason: "no positive scaling keeps the shares in [0, 1]".into(),
            });
        }
        let mut placed = Rational::zero();
        for (i, (p, e)) in base.iter().zip(&gaps).enumerate() {
            let d = i as i64 + 1;
            let share = p + &lambda * e;
            if share.is_zero() {
                continue;
            }
            let Some(better) = hist.p_plus_delta(v, d) else {
                return Err(Error::InfeasibleProfile {
                    level: v,
                    reason: format!("mass at distance {d} but no solutions there"),
                });
            };
            let worse_exists = hist.grid().contains(v - d);
            let up = if spec.violation == Violation::BreakUnskewed && worse_exists {
                Rational::zero()
            } else {
                &share * &better
            };
            let down = &share - &up;
            if !up.is_zero() {
                row[(v + d - v_min) as usize] = up;
            }
            if !down.is_zero() {
                row[(v - d - v_min) as usize] = down;
            }
            placed += share;
        }
        row[(v - v_min) as usize] = Rational::one() - placed;
    }
    AggregateLandscape::new(hist.clone(), nf, false)
}

/// Largest `λ ≤ 1` with `p_δ + λ·e_δ ≥ 0` for all δ and
/// `Σ(p_δ + λ·e_δ) ≤ 1`.
fn scale_factor(base: &[Rational], gaps: &[Rational]) -> Rational {
    let mut lambda = Rational::one();
    for (p, e) in base.iter().zip(gaps) {
        if e.is_negative() {
            lambda = lambda.min(p / -e);
        }
    }
    let total_gap: Rational = gaps.iter().sum();
    if total_gap.is_positive() {
        let room = Rational::one() - base.iter().sum::<Rational>();
        lambda = lambda.min(room / total_gap);
    }
    lambda
}

/// Neighbours drawn independently of the solution's own fitness:
/// `nf[v][w] = ct[w] / |S|` on every occupied row.
pub fn uniform_neighbourhood(hist: &FitnessHistogram) -> AggregateLandscape {
    let shares: Vec<Rational> = hist.counts().iter().map(|c| c / hist.total()).collect();
    let nf = hist
        .levels()
        .map(|v| {
            if hist.occupied(v) {
                shares.clone()
            } else {
                vec![Rational::zero(); shares.len()]
            }
        })
        .collect();
    AggregateLandscape::new(hist.clone(), nf, false).expect("rows follow the histogram")
}

/// One generated instance and its verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteCase {
    pub seed: u64,
    pub spec: SynthSpec,
    pub report: Option<PropertyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub landscape: Option<AggregateLandscape>,
}

impl SuiteCase {
    pub fn premises_hold(&self) -> bool {
        self.report
            .as_ref()
            .is_some_and(|r| r.verdict != Verdict::NotApplicable)
    }

    /// Premises hold and the conclusion or decomposition does not.
    pub fn is_counterexample(&self) -> bool {
        self.report
            .as_ref()
            .is_some_and(|r| r.verdict == Verdict::Fails)
    }

    pub fn conclusion_fails(&self) -> bool {
        self.report
            .as_ref()
            .and_then(|r| r.details.get("conclusion.v_ge_inclusive"))
            .is_some_and(|v| v == "fails")
    }

    pub fn decomposition_mismatch(&self) -> bool {
        self.report
            .as_ref()
            .and_then(|r| r.details.get("decomposition"))
            .is_some_and(|v| v == "mismatch")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub violation: Violation,
    pub instances: usize,
    pub premises_held: usize,
    pub counterexamples: usize,
    pub conclusion_failures: usize,
    pub decomposition_mismatches: usize,
    pub infeasible: usize,
}

pub fn generate_case(seed: u64, violation: Violation) -> SuiteCase {
    let spec = SynthSpec::for_seed(seed, violation);
    let hist = generate_cm_histogram(&spec);
    match generate_nsf_unskewed(&hist, &spec) {
        Ok(agg) => SuiteCase {
            seed,
            report: Some(verify_theorem1(&agg)),
            error: None,
            landscape: Some(agg),
            spec,
        },
        Err(e) => SuiteCase {
            seed,
            spec,
            report: None,
            error: Some(e.to_string()),
            landscape: None,
        },
    }
}

/// Runs seeds `first..first + count` concurrently; results are in seed order.
pub fn run_suite(first: u64, count: u64, violation: Violation) -> Vec<SuiteCase> {
    (first..first + count)
        .into_par_iter()
        .map(|seed| generate_case(seed, violation))
        .collect()
}

pub fn summarize(violation: Violation, cases: &[SuiteCase]) -> SuiteSummary {
    let count = |f: fn(&SuiteCase) -> bool| cases.iter().filter(|c| f(c)).count();
    SuiteSummary {
        violation,
        instances: cases.len(),
        premises_held: count(SuiteCase::premises_hold),
        counterexamples: count(SuiteCase::is_counterexample),
        conclusion_failures: count(SuiteCase::conclusion_fails),
        decomposition_mismatches: count(SuiteCase::decomposition_mismatch),
        infeasible: count(|c| c.error.is_some()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::{check_cardinality_monotonic, check_nsf, check_unskewed};
    use crate::rational::frac;

    fn spec(levels: usize, mode: usize, violation: Violation) -> SynthSpec {
        let gap = GapProfile {
            shape: GapShape::Crossover,
            scale: frac(1, 10),
            ratio: frac(1, 2),
            shift: frac(1, 1),
        };
        SynthSpec::new(levels, mode, 42, gap, violation).unwrap()
    }

    #[test]
    fn crossover_profile_sums_to_zero_at_full_shift() {
        let e = spec(9, 0, Violation::None).gap.values(4);
        assert!(e[0].is_positive() && e[3].is_negative());
        assert!(e.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(e.iter().sum::<Rational>(), Rational::zero());
    }

    #[test]
    fn three_levels_bottom_mode() {
        let s = spec(3, 0, Violation::None);
        let h = generate_cm_histogram(&s);
        let c = h.counts();
        assert!(c[0] > c[1] && c[1] > c[2] && c[2].is_positive());
        assert_eq!(generate_cm_histogram(&s), h);
    }

    #[test]
    fn positive_control_meets_premises() {
        for seed in 0..50 {
            let s = SynthSpec::for_seed(seed, Violation::None);
            let h = generate_cm_histogram(&s);
            let agg = generate_nsf_unskewed(&h, &s).unwrap();
            assert!(
                check_cardinality_monotonic(&h, true).passed(),
                "seed {seed}"
            );
            assert!(check_nsf(&agg).passed(), "seed {seed}");
            assert!(
                check_unskewed(&agg, &Rational::zero()).passed(),
                "seed {seed}"
            );
            for v in h.levels() {
                assert_eq!(agg.nf_size(v), Rational::one());
            }
        }
    }

    #[test]
    fn break_nsf_fails_clause_b() {
        let s = spec(7, 0, Violation::BreakNsf);
        let agg = generate_nsf_unskewed(&generate_cm_histogram(&s), &s).unwrap();
        let r = check_nsf(&agg);
        assert_eq!(r.witness.unwrap().clause, "b");
    }

    #[test]
    fn break_cm_and_unskewed_fail_their_premise() {
        let s = spec(8, 1, Violation::BreakCm);
        assert!(!check_cardinality_monotonic(&generate_cm_histogram(&s), false).passed());
        let s = spec(8, 1, Violation::BreakUnskewed);
        let agg = generate_nsf_unskewed(&generate_cm_histogram(&s), &s).unwrap();
        assert!(!check_unskewed(&agg, &Rational::zero()).passed());
    }

    #[test]
    fn rejects_degenerate_specs() {
        let gap = spec(5, 0, Violation::None).gap;
        assert!(SynthSpec::new(2, 0, 0, gap.clone(), Violation::None).is_err());
        assert!(SynthSpec::new(5, 3, 0, gap.clone(), Violation::None).is_err());
        let flat = GapProfile {
            ratio: frac(1, 1),
            ..gap
        };
        assert!(SynthSpec::new(5, 0, 0, flat, Violation::None).is_err());
    }
}
