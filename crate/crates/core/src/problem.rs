//! Enumerable problems and the exhaustive builders over them.
//!
//! A problem splits its enumeration into deterministic shards. Builders
//! process shards on a worker pool and merge the partial results in shard
//! order, so every output is independent of the worker count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use rand::Rng;
use rayon::prelude::*;

use crate::aggregate::AggregateLandscape;
use crate::error::{Error, Result};
use crate::grid::{Binning, FitnessGrid, FitnessScale, Sense};
use crate::histogram::FitnessHistogram;
use crate::rational::{self, Rational};

pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// A finite search space with a fitness function and neighbourhood.
pub trait ExplicitProblem: Sync {
    type Solution: Clone + Ord + Send + Sync + Debug;

    fn sense(&self) -> Sense;

    /// `|S|`.
    fn size(&self) -> u128;

    /// Fitness in the problem's own units.
    fn fitness(&self, s: &Self::Solution) -> Rational;

    /// Neighbours of `s`; never contains `s` itself.
    fn neighbours(&self, s: &Self::Solution) -> Vec<Self::Solution>;

    /// Uniform sample from `S`.
    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Solution;

    fn shard_count(&self) -> usize {
        1
    }

    /// Solutions of one shard. Concatenating shards `0..shard_count()` in
    /// order yields each solution exactly once.
    fn enumerate_shard(&self, shard: usize)
        -> Box<dyn Iterator<Item = Self::Solution> + Send + '_>;

    fn enumerate(&self) -> Box<dyn Iterator<Item = Self::Solution> + Send + '_> {
        Box::new((0..self.shard_count()).flat_map(move |i| self.enumerate_shard(i)))
    }
}

#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    /// Largest `|S|` that may be enumerated.
    pub budget: u128,
    /// 1 runs serially, 0 uses the default pool size.
    pub workers: usize,
    pub binning: Option<Binning>,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            workers: 0,
            binning: None,
        }
    }
}

impl EnumerationConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_binning(mut self, binning: Binning) -> Self {
        self.binning = Some(binning);
        self
    }

    pub fn check_budget(&self, size: u128) -> Result<()> {
        if size > self.budget {
            Err(Error::BudgetExceeded {
                size,
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }
}

/// Runs `task` for every shard index and returns the results in shard order.
pub(crate) fn map_shards<T, F>(shards: usize, workers: usize, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers == 1 {
        return Ok((0..shards).map(task).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInstance(format!("worker pool: {e}")))?;
    Ok(pool.install(|| (0..shards).into_par_iter().map(task).collect()))
}

pub fn fitness_scale<P: ExplicitProblem>(problem: &P, cfg: &EnumerationConfig) -> FitnessScale {
    FitnessScale::for_problem(problem.sense(), cfg.binning.as_ref())
}

fn histogram_from_levels(
    scale: FitnessScale,
    counts: &BTreeMap<i64, u128>,
) -> Result<FitnessHistogram> {
    let (&v_min, _) = counts
        .first_key_value()
        .ok_or_else(|| Error::InvalidHistogram("problem has no solutions".into()))?;
    let (&v_max, _) = counts.last_key_value().expect("non-empty");
    let grid = FitnessGrid::new(scale, v_min, v_max)?;
    let dense = grid
        .levels()
        .map(|v| rational::uint(counts.get(&v).copied().unwrap_or(0)))
        .collect();
    FitnessHistogram::new(grid, dense)
}

/// Exact solution counts per fitness level.
pub fn build_histogram<P: ExplicitProblem>(
    problem: &P,
    cfg: &EnumerationConfig,
) -> Result<FitnessHistogram> {
    cfg.check_budget(problem.size())?;
    let scale = fitness_scale(problem, cfg);
    let parts = map_shards(problem.shard_count(), cfg.workers, |shard| {
        let mut counts = BTreeMap::<i64, u128>::new();
        for s in problem.enumerate_shard(shard) {
            *counts
                .entry(scale.level_of(&problem.fitness(&s))?)
                .or_default() += 1;
        }
        Ok::<_, Error>(counts)
    })?;
    let mut counts = BTreeMap::new();
    for part in parts {
        for (v, c) in part? {
            *counts.entry(v).or_default() += c;
        }
    }
    histogram_from_levels(scale, &counts)
}

/// Exact transition matrix with set semantics for `Nf(v)`.
pub fn build_aggregate<P: ExplicitProblem>(
    problem: &P,
    cfg: &EnumerationConfig,
) -> Result<AggregateLandscape> {
    cfg.check_budget(problem.size())?;
    let scale = fitness_scale(problem, cfg);
    let level = |s: &P::Solution| scale.level_of(&problem.fitness(s));

    type Part<S> = (BTreeMap<i64, u128>, BTreeMap<i64, BTreeSet<S>>);
    let parts = map_shards(problem.shard_count(), cfg.workers, |shard| {
        let mut part: Part<P::Solution> = Default::default();
        for s in problem.enumerate_shard(shard) {
            let v = level(&s)?;
            *part.0.entry(v).or_default() += 1;
            part.1.entry(v).or_default().extend(problem.neighbours(&s));
        }
        Ok::<_, Error>(part)
    })?;

    let mut counts = BTreeMap::<i64, u128>::new();
    let mut union = BTreeMap::<i64, BTreeSet<P::Solution>>::new();
    for part in parts {
        let (c, u) = part?;
        for (v, n) in c {
            *counts.entry(v).or_default() += n;
        }
        for (v, set) in u {
            union.entry(v).or_default().extend(set);
        }
    }

    let hist = histogram_from_levels(scale.clone(), &counts)?;
    let grid = hist.grid().clone();
    let n = grid.len();
    let mut nf = vec![vec![0u128; n]; n];
    for (v, set) in &union {
        let i = grid.index(*v).expect("level seen during enumeration");
        for s in set {
            let j = grid.index(level(s)?).ok_or_else(|| {
                Error::InvalidInstance("neighbour outside the search space".into())
            })?;
            nf[i][j] += 1;
        }
    }
    let nf = nf
        .into_iter()
        .map(|row| row.into_iter().map(rational::uint).collect())
        .collect();
    AggregateLandscape::new(hist, nf, true)
}

/// Every solution grouped by grid level, in enumeration order.
#[derive(Clone, Debug)]
pub struct LevelIndex<S> {
    pub scale: FitnessScale,
    pub by_level: BTreeMap<i64, Vec<S>>,
}

impl<S> LevelIndex<S> {
    pub fn solutions(&self, v: i64) -> &[S] {
        self.by_level.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn v_max(&self) -> i64 {
        *self.by_level.keys().next_back().expect("non-empty index")
    }
}

pub fn index_levels<P: ExplicitProblem>(
    problem: &P,
    cfg: &EnumerationConfig,
) -> Result<LevelIndex<P::Solution>> {
    cfg.check_budget(problem.size())?;
    let scale = fitness_scale(problem, cfg);
    let mut by_level: BTreeMap<i64, Vec<P::Solution>> = BTreeMap::new();
    for s in problem.enumerate() {
        by_level
            .entry(scale.level_of(&problem.fitness(&s))?)
            .or_default()
            .push(s);
    }
    Ok(LevelIndex { scale, by_level })
}
