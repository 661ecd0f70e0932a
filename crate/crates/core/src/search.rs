//! Hill climbing and random sampling over explicit problems, with Monte
//! Carlo estimates of the improvement probabilities.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Sense;
use crate::problem::{
    build_aggregate, index_levels, EnumerationConfig, ExplicitProblem, LevelIndex,
};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pivot {
    FirstImprovement,
    BestImprovement,
    RandomNeighbour,
}

impl std::str::FromStr for Pivot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" | "first-improvement" => Ok(Self::FirstImprovement),
            "best" | "best-improvement" => Ok(Self::BestImprovement),
            "random" | "random-neighbour" => Ok(Self::RandomNeighbour),
            _ => Err(Error::Parse(format!("unknown pivot rule {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Start<S> {
    Random,
    Fixed(S),
}

#[derive(Clone, Debug)]
pub struct SearchConfig<S> {
    pub pivot: Pivot,
    /// Maximum fitness evaluations, the start solution included.
    pub budget: u64,
    pub seed: u64,
    pub start: Start<S>,
}

impl<S> SearchConfig<S> {
    pub fn new(pivot: Pivot, budget: u64, seed: u64) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidInstance(
                "search budget must be at least 1".into(),
            ));
        }
        Ok(Self {
            pivot,
            budget,
            seed,
            start: Start::Random,
        })
    }

    pub fn starting_at(mut self, s: S) -> Self {
        self.start = Start::Fixed(s);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClimbStatus {
    LocalOptimum,
    BudgetExhausted,
}

/// An accepted solution and the evaluations spent when it was reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(with = "rational::serde_str")]
    pub fitness: Rational,
    pub evals: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace<S> {
    /// The start solution followed by every accepted move.
    pub steps: Vec<TraceStep>,
    pub evaluations: u64,
    pub status: ClimbStatus,
    pub end: S,
}

impl<S> Trace<S> {
    pub fn moves(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn final_fitness(&self) -> &Rational {
        &self.steps.last().expect("trace has a start").fitness
    }
}

fn climb<P: ExplicitProblem, R: Rng + ?Sized>(
    problem: &P,
    pivot: Pivot,
    start: P::Solution,
    used: u64,
    budget: u64,
    rng: &mut R,
) -> Trace<P::Solution> {
    let sense = problem.sense();
    let mut evals = used + 1;
    let mut current = start;
    let mut fitness = problem.fitness(&current);
    let mut steps = vec![TraceStep {
        fitness: fitness.clone(),
        evals,
    }];
    loop {
        let mut neighbours = problem.neighbours(&current);
        if pivot == Pivot::RandomNeighbour {
            neighbours.shuffle(rng);
        }
        let mut chosen: Option<(P::Solution, Rational)> = None;
        let mut exhausted = false;
        for n in neighbours {
            if evals >= budget {
                exhausted = true;
                break;
            }
            evals += 1;
            let f = problem.fitness(&n);
            let improves = match &chosen {
                None => sense.better(&f, &fitness),
                Some((best, bf)) => sense.better(&f, bf) || (&f == bf && n < *best),
            };
            if improves {
                chosen = Some((n, f));
                if pivot != Pivot::BestImprovement {
                    break;
                }
            }
        }
        match chosen {
            Some((n, f)) => {
                current = n;
                fitness = f;
                steps.push(TraceStep {
                    fitness: fitness.clone(),
                    evals,
                });
                if exhausted {
                    return Trace {
                        steps,
                        evaluations: evals - used,
                        status: ClimbStatus::BudgetExhausted,
                        end: current,
                    };
                }
            }
            None => {
                let status = if exhausted {
                    ClimbStatus::BudgetExhausted
                } else {
                    ClimbStatus::LocalOptimum
                };
                return Trace {
                    steps,
                    evaluations: evals - used,
                    status,
                    end: current,
                };
            }
        }
    }
}

/// A single climb from the configured start until no neighbour improves or
/// the budget is spent. Best-improvement breaks ties by solution order.
pub fn hill_climb<P: ExplicitProblem>(
    problem: &P,
    config: &SearchConfig<P::Solution>,
) -> Trace<P::Solution> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = match &config.start {
        Start::Random => problem.random_solution(&mut rng),
        Start::Fixed(s) => s.clone(),
    };
    climb(problem, config.pivot, start, 0, config.budget, &mut rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    /// A uniform neighbour of a uniform solution at the level.
    Neighbour,
    /// A uniform solution of the whole space.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub level: i64,
    pub mode: SampleMode,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub std_err: f64,
}

impl Estimate {
    fn new(level: i64, mode: SampleMode, trials: u64, successes: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            level,
            mode,
            trials,
            successes,
            p_hat: p,
            std_err: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    /// Whether `target` lies within `k` standard errors. A zero standard
    /// error demands an exact match.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.p_hat - target).abs() <= k * self.std_err + 1e-12
    }
}

fn level_of<P: ExplicitProblem>(
    problem: &P,
    index: &LevelIndex<P::Solution>,
    s: &P::Solution,
) -> i64 {
    index
        .scale
        .level_of(&problem.fitness(s))
        .expect("fitness was binnable during indexing")
}

/// Share of samples that land strictly above level `v`.
pub fn estimate_improvement<P: ExplicitProblem>(
    problem: &P,
    index: &LevelIndex<P::Solution>,
    v: i64,
    mode: SampleMode,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::InvalidInstance(
            "at least one trial is needed".into(),
        ));
    }
    let here = index.solutions(v);
    if here.is_empty() {
        return Err(Error::EmptyLevel { level: v });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    for _ in 0..trials {
        let sample = match mode {
            SampleMode::Random => Some(problem.random_solution(&mut rng)),
            SampleMode::Neighbour => {
                let s = &here[rng.random_range(0..here.len())];
                let mut ns = problem.neighbours(s);
                if ns.is_empty() {
                    None
                } else {
                    let i = rng.random_range(0..ns.len());
                    Some(ns.swap_remove(i))
                }
            }
        };
        if sample.is_some_and(|s| level_of(problem, index, &s) > v) {
            successes += 1;
        }
    }
    Ok(Estimate::new(v, mode, trials, successes))
}

/// Exact expectation of the neighbour-mode estimator: the mean over level-`v`
/// solutions of their share of strictly better neighbours. This weights
/// solutions, not members of `Nf(v)`, so it differs from `pn⁺_v` whenever
/// neighbourhoods overlap or vary in size.
pub fn neighbour_pair_expectation<P: ExplicitProblem>(
    problem: &P,
    index: &LevelIndex<P::Solution>,
    v: i64,
) -> Result<Rational> {
    let here = index.solutions(v);
    if here.is_empty() {
        return Err(Error::EmptyLevel { level: v });
    }
    let total: Rational = here
        .iter()
        .map(|s| {
            let ns = problem.neighbours(s);
            if ns.is_empty() {
                return Rational::zero();
            }
            let better = ns
                .iter()
                .filter(|n| level_of(problem, index, n) > v)
                .count();
            rational::frac(better as i64, ns.len() as i64)
        })
        .sum();
    Ok(total / rational::int(here.len() as i64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run: u64,
    #[serde(with = "rational::serde_str")]
    pub hill_climb_best: Rational,
    pub hill_climb_evals: u64,
    pub restarts: u64,
    #[serde(with = "rational::serde_str")]
    pub random_best: Rational,
    pub random_evals: u64,
    #[serde(skip)]
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    #[serde(with = "rational::serde_str")]
    pub mean_best: Rational,
    pub mean_best_f64: f64,
    #[serde(with = "rational::serde_str")]
    pub worst_best: Rational,
    #[serde(with = "rational::serde_str")]
    pub best_best: Rational,
    pub mean_evals: f64,
}

impl MethodSummary {
    fn new(sense: Sense, bests: &[Rational], evals: &[u64]) -> Self {
        let mean: Rational = bests.iter().sum::<Rational>() / rational::int(bests.len() as i64);
        let mut best = bests[0].clone();
        let mut worst = bests[0].clone();
        for b in bests {
            if sense.better(b, &best) {
                best = b.clone();
            }
            if sense.better(&worst, b) {
                worst = b.clone();
            }
        }
        Self {
            mean_best_f64: rational::to_f64(&mean),
            mean_best: mean,
            worst_best: worst,
            best_best: best,
            mean_evals: evals.iter().sum::<u64>() as f64 / evals.len() as f64,
        }
    }
}

/// Per-level estimates next to their exact values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelComparison {
    pub level: i64,
    #[serde(with = "rational::serde_str")]
    pub fitness: Rational,
    pub trials: u64,
    pub neighbour_successes: u64,
    pub random_successes: u64,
    pub pn_plus_hat: f64,
    pub pn_plus_std_err: f64,
    pub p_plus_hat: f64,
    pub p_plus_std_err: f64,
    #[serde(with = "rational::serde_str")]
    pub pn_plus: Rational,
    #[serde(with = "rational::serde_str")]
    pub p_plus: Rational,
    /// Exact expectation of the neighbour estimate.
    #[serde(with = "rational::serde_str")]
    pub neighbour_pair_expectation: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub sense: Sense,
    pub pivot: Pivot,
    pub budget: u64,
    pub runs: u64,
    pub seed: u64,
    pub hill_climb: MethodSummary,
    pub random_search: MethodSummary,
    pub per_run: Vec<RunResult>,
    pub levels: Vec<LevelComparison>,
}

impl ComparisonReport {
    /// Hill climbing is at least as good as random search on mean best fitness.
    pub fn hill_climb_not_worse(&self) -> bool {
        !self
            .sense
            .better(&self.random_search.mean_best, &self.hill_climb.mean_best)
    }
}

/// Which levels get Monte Carlo estimates, and how many trials each.
#[derive(Clone, Debug, Default)]
pub struct EstimatePlan {
    /// Zero skips the per-level section, and with it the enumeration.
    pub trials: u64,
    /// All occupied levels when `None`.
    pub levels: Option<Vec<i64>>,
}

fn run_stream(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

fn hill_climb_with_restarts<P: ExplicitProblem>(
    problem: &P,
    pivot: Pivot,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> (Rational, u64, u64, Vec<TraceStep>) {
    let sense = problem.sense();
    let mut used = 0;
    let mut restarts = 0;
    let mut best: Option<Rational> = None;
    let mut trace = Vec::new();
    while used < budget {
        let start = problem.random_solution(rng);
        let t = climb(problem, pivot, start, used, budget, rng);
        used += t.evaluations;
        let f = t.final_fitness().clone();
        if best.as_ref().is_none_or(|b| sense.better(&f, b)) {
            best = Some(f);
        }
        trace.extend(t.steps);
        if t.status == ClimbStatus::LocalOptimum && used < budget {
            restarts += 1;
        }
    }
    (best.expect("budget is at least 1"), used, restarts, trace)
}

fn random_search<P: ExplicitProblem>(problem: &P, budget: u64, rng: &mut ChaCha8Rng) -> Rational {
    let sense = problem.sense();
    let mut best = problem.fitness(&problem.random_solution(rng));
    for _ in 1..budget {
        let f = problem.fitness(&problem.random_solution(rng));
        if sense.better(&f, &best) {
            best = f;
        }
    }
    best
}

/// Matched-budget comparison of hill climbing (uniform random restart at
/// each local optimum) against uniform random sampling. Run `r` of both
/// methods draws from the same seeded stream, so a budget of 1 makes them
/// identical. Runs execute concurrently and are reported in run order.
pub fn head_to_head<P: ExplicitProblem>(
    problem: &P,
    config: &SearchConfig<P::Solution>,
    runs: u64,
    plan: &EstimatePlan,
    cfg: &EnumerationConfig,
) -> Result<ComparisonReport> {
    if runs == 0 {
        return Err(Error::InvalidInstance("at least one run is needed".into()));
    }
    let sense = problem.sense();
    let per_run: Vec<RunResult> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let (hill_best, hill_evals, restarts, trace) = hill_climb_with_restarts(
                problem,
                config.pivot,
                config.budget,
                &mut run_stream(config.seed, run),
            );
            let random_best =
                random_search(problem, config.budget, &mut run_stream(config.seed, run));
            RunResult {
                run,
                hill_climb_best: hill_best,
                hill_climb_evals: hill_evals,
                restarts,
                random_best,
                random_evals: config.budget,
                trace,
            }
        })
        .collect();

    let hill: Vec<_> = per_run.iter().map(|r| r.hill_climb_best.clone()).collect();
    let hill_evals: Vec<_> = per_run.iter().map(|r| r.hill_climb_evals).collect();
    let random: Vec<_> = per_run.iter().map(|r| r.random_best.clone()).collect();
    let random_evals: Vec<_> = per_run.iter().map(|r| r.random_evals).collect();

    let levels = if plan.trials == 0 {
        Vec::new()
    } else {
        level_comparisons(problem, plan, config.seed, cfg)?
    };

    Ok(ComparisonReport {
        sense,
        pivot: config.pivot,
        budget: config.budget,
        runs,
        seed: config.seed,
        hill_climb: MethodSummary::new(sense, &hill, &hill_evals),
        random_search: MethodSummary::new(sense, &random, &random_evals),
        per_run,
        levels,
    })
}

fn level_comparisons<P: ExplicitProblem>(
    problem: &P,
    plan: &EstimatePlan,
    seed: u64,
    cfg: &EnumerationConfig,
) -> Result<Vec<LevelComparison>> {
    let index = index_levels(problem, cfg)?;
    let agg = build_aggregate(problem, cfg)?;
    let hist = agg.hist();
    let levels = match &plan.levels {
        Some(ls) => ls.clone(),
        None => hist.levels().filter(|&v| hist.occupied(v)).collect(),
    };
    levels
        .par_iter()
        .map(|&v| {
            hist.grid().check(v)?;
            let offset = (v - hist.v_min()) as u64;
            let salt = seed.wrapping_add(offset.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let n =
                estimate_improvement(problem, &index, v, SampleMode::Neighbour, plan.trials, salt)?;
            let r = estimate_improvement(
                problem,
                &index,
                v,
                SampleMode::Random,
                plan.trials,
                salt ^ 1,
            )?;
            Ok(LevelComparison {
                level: v,
                fitness: hist.grid().to_original(v),
                trials: plan.trials,
                neighbour_successes: n.successes,
                random_successes: r.successes,
                pn_plus_hat: n.p_hat,
                pn_plus_std_err: n.std_err,
                p_plus_hat: r.p_hat,
                p_plus_std_err: r.std_err,
                pn_plus: agg.pn_plus(v)?,
                p_plus: hist.p_plus(v)?,
                neighbour_pair_expectation: neighbour_pair_expectation(problem, &index, v)?,
            })
        })
        .collect()
}

/// `run,step,fitness,evals` rows, one per accepted hill-climb solution.
pub fn trace_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("run,step,fitness,evals\n");
    for r in &report.per_run {
        for (step, t) in r.trace.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.run,
                step,
                rational::to_display(&t.fitness),
                t.evals
            ));
        }
    }
    out
}
