//! Symmetric TSP instances and the exact route-length census.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{FitnessGrid, Sense};
use crate::histogram::FitnessHistogram;
use crate::problem::{map_shards, ExplicitProblem};
use crate::rational::{self, Rational};

pub const DEFAULT_MAX_CITIES: usize = 13;

/// Number of smallest distance values that occur four times in the
/// pair-sequence construction; the remaining values occur three times.
pub const FOOTNOTE_QUADRUPLE_VALUES: u32 = 6;

/// Symmetric integer distance matrix with zero diagonal.
///
/// As an [`ExplicitProblem`] a solution is a tour starting at city 0
/// (one per directed cyclic successor assignment, `(n−1)!` in all) and a
/// move is a 2-opt segment reversal, which replaces exactly two edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TspInstance {
    n: usize,
    dist: Vec<u32>,
}

impl TspInstance {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len();
        if !(3..=32).contains(&n) {
            return Err(Error::InvalidInstance(format!("{n} cities, need 3..=32")));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "row {a} has {} entries",
                    row.len()
                )));
            }
            for (b, &d) in row.iter().enumerate() {
                if a == b && d != 0 {
                    return Err(Error::InvalidInstance(format!("dist[{a}][{a}] = {d} != 0")));
                }
                if a != b && (d == 0 || d != rows[b][a]) {
                    return Err(Error::InvalidInstance(format!(
                        "dist[{a}][{b}] must be positive and symmetric"
                    )));
                }
            }
            dist.extend_from_slice(row);
        }
        Ok(Self { n, dist })
    }

    /// `n` followed by `n` lines of `n` integers.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty distance file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("city count: {e}")))?;
        let values: Vec<u32> = tokens
            .map(|t| {
                t.parse()
                    .map_err(|e| Error::Parse(format!("distance {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if values.len() != n * n {
            return Err(Error::Parse(format!(
                "expected {} distances, found {}",
                n * n,
                values.len()
            )));
        }
        Self::new(values.chunks(n).map(<[u32]>::to_vec).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.n + b]
    }

    pub fn tour_length(&self, tour: &[u8]) -> u32 {
        tour.iter()
            .zip(tour.iter().cycle().skip(1))
            .map(|(&a, &b)| self.dist(a as usize, b as usize))
            .sum()
    }

    /// The same instance with city `c` renamed to `perm[c]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n || !perm.iter().copied().sorted().eq(0..self.n) {
            return Err(Error::InvalidInstance(
                "not a permutation of the cities".into(),
            ));
        }
        let mut rows = vec![vec![0; self.n]; self.n];
        for a in 0..self.n {
            for b in 0..self.n {
                rows[perm[a]][perm[b]] = self.dist(a, b);
            }
        }
        Self::new(rows)
    }
}

/// Pairs `<1,2>, <1,3>, …, <n−1,n>` in lexicographic order receive the sorted
/// distance multiset in which the `quadruple_values` smallest of `1..=d`
/// appear four times and the rest three times.
pub fn make_pair_sequence_tsp(n: usize, d: u32, quadruple_values: u32) -> Result<TspInstance> {
    let pairs = n * n.saturating_sub(1) / 2;
    let declared =
        4 * quadruple_values.min(d) as usize + 3 * d.saturating_sub(quadruple_values) as usize;
    if quadruple_values > d || declared != pairs {
        return Err(Error::InconsistentMultiplicity {
            pairs,
            values: d,
            detail: format!("{quadruple_values} values x4 and the rest x3 give {declared}"),
        });
    }
    let sequence = (1..=d).flat_map(|v| {
        let times = if v <= quadruple_values { 4 } else { 3 };
        std::iter::repeat_n(v, times)
    });
    let mut rows = vec![vec![0; n]; n];
    for ((a, b), v) in (0..n).tuple_combinations().zip(sequence) {
        rows[a][b] = v;
        rows[b][a] = v;
    }
    TspInstance::new(rows)
}

/// The 12-city, 20-distance instance when called with `(12, 20)`.
pub fn make_footnote_tsp(n: usize, d: u32) -> Result<TspInstance> {
    make_pair_sequence_tsp(n, d, FOOTNOTE_QUADRUPLE_VALUES)
}

#[derive(Clone, Debug)]
pub struct TspCensusConfig {
    pub max_cities: usize,
    /// 1 runs serially, 0 uses the default pool size.
    pub workers: usize,
}

impl Default for TspCensusConfig {
    fn default() -> Self {
        Self {
            max_cities: DEFAULT_MAX_CITIES,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TspCensus {
    /// Route lengths on a minimisation grid.
    pub hist: FitnessHistogram,
    /// Directed assignments per route length, indexed by length.
    pub by_length: Vec<u64>,
    pub min_length: u32,
    pub max_length: u32,
    /// Most common length; ties go to the shorter route.
    pub modal_length: u32,
    pub total: u64,
}

/// Exact count of all `(n−1)!` feasible successor assignments by route length.
pub fn tsp_census(instance: &TspInstance, cfg: &TspCensusConfig) -> Result<TspCensus> {
    let n = instance.n;
    if n > cfg.max_cities {
        return Err(Error::BudgetExceeded {
            size: factorial(n - 1),
            budget: factorial(cfg.max_cities - 1),
        });
    }
    let width = instance.dist.iter().max().copied().unwrap_or(0) as usize * n + 1;
    let prefix_len = (n - 1).min(2);
    let prefixes: Vec<Vec<usize>> = (1..n).permutations(prefix_len).collect();

    let parts = map_shards(prefixes.len(), cfg.workers, |i| {
        let mut hist = vec![0u64; width];
        let prefix = &prefixes[i];
        let mut visited = 1u32;
        let mut last = 0;
        let mut len = 0;
        for &c in prefix {
            visited |= 1 << c;
            len += instance.dist(last, c);
            last = c;
        }
        extend(instance, visited, last, len, n - 1 - prefix_len, &mut hist);
        hist
    })?;
    let mut by_length = vec![0u64; width];
    for part in parts {
        for (acc, c) in by_length.iter_mut().zip(part) {
            *acc += c;
        }
    }

    let min_length = by_length
        .iter()
        .position(|&c| c > 0)
        .expect("at least one tour") as u32;
    let max_length = by_length
        .iter()
        .rposition(|&c| c > 0)
        .expect("at least one tour") as u32;
    let peak = by_length.iter().copied().max().unwrap_or(0);
    let modal_length = by_length
        .iter()
        .position(|&c| c == peak)
        .expect("peak exists") as u32;
    by_length.truncate(max_length as usize + 1);

    let grid = FitnessGrid::integer(Sense::Minimize, -(max_length as i64), -(min_length as i64))?;
    let counts = grid
        .levels()
        .map(|v| rational::uint(by_length[(-v) as usize] as u128))
        .collect();
    Ok(TspCensus {
        hist: FitnessHistogram::new(grid, counts)?,
        total: by_length.iter().sum(),
        by_length,
        min_length,
        max_length,
        modal_length,
    })
}

fn extend(
    t: &TspInstance,
    visited: u32,
    last: usize,
    len: u32,
    remaining: usize,
    hist: &mut [u64],
) {
    if remaining == 0 {
        hist[(len + t.dist(last, 0)) as usize] += 1;
        return;
    }
    let row = &t.dist[last * t.n..(last + 1) * t.n];
    for (c, &d) in row.iter().enumerate().skip(1) {
        if visited & (1 << c) == 0 {
            extend(t, visited | (1 << c), c, len + d, remaining - 1, hist);
        }
    }
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

impl ExplicitProblem for TspInstance {
    type Solution = Vec<u8>;

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn size(&self) -> u128 {
        factorial(self.n - 1)
    }

    fn fitness(&self, tour: &Vec<u8>) -> Rational {
        rational::int(self.tour_length(tour) as i64)
    }

    fn neighbours(&self, tour: &Vec<u8>) -> Vec<Vec<u8>> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 1..n - 1 {
            for j in i + 1..n {
                // reversing everything after city 0 only flips direction
                if i == 1 && j == n - 1 {
                    continue;
                }
                let mut t = tour.clone();
                t[i..=j].reverse();
                out.push(t);
            }
        }
        out
    }

    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        let mut rest: Vec<u8> = (1..self.n as u8).collect();
        rest.shuffle(rng);
        std::iter::once(0).chain(rest).collect()
    }

    fn shard_count(&self) -> usize {
        self.n - 1
    }

    fn enumerate_shard(&self, shard: usize) -> Box<dyn Iterator<Item = Vec<u8>> + Send + '_> {
        let second = shard as u8 + 1;
        let rest: Vec<u8> = (1..self.n as u8).filter(|&c| c != second).collect();
        let k = rest.len();
        Box::new(rest.into_iter().permutations(k).map(move |p| {
            let mut tour = Vec::with_capacity(self.n);
            tour.push(0);
            tour.push(second);
            tour.extend(p);
            tour
        }))
    }
}
