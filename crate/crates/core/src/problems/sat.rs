use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::Sense;
use crate::problem::ExplicitProblem;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var as usize] != self.negated
    }
}

pub type Clause = [Literal; 3];

/// MAX-3SAT: fitness is the number of satisfied clauses, a move flips one
/// variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatInstance {
    n: usize,
    clauses: Vec<Clause>,
}

impl SatInstance {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        for (i, c) in clauses.iter().enumerate() {
            if c.iter().any(|l| l.var as usize >= n) {
                return Err(Error::InvalidInstance(format!(
                    "clause {i} names a variable >= {n}"
                )));
            }
            if c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var {
                return Err(Error::InvalidInstance(format!(
                    "clause {i} repeats a variable"
                )));
            }
        }
        Ok(Self { n, clauses })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn satisfied(&self, assignment: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.holds(assignment)))
            .count()
    }

    /// Clauses that mention `var`.
    pub fn occurrences(&self, var: u32) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.var == var))
            .count()
    }

    /// Share of clauses a flip of `var` can touch.
    pub fn clause_share(&self, var: u32) -> Rational {
        if self.clauses.is_empty() {
            return rational::int(0);
        }
        rational::frac(self.occurrences(var) as i64, self.clauses.len() as i64)
    }
}

/// `m` clauses over 3 distinct uniformly drawn variables with uniform signs.
pub fn make_random_3sat(n: usize, m: usize, seed: u64) -> Result<SatInstance> {
    if n < 3 {
        return Err(Error::InvalidInstance(format!(
            "{n} variables, need at least 3"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..m)
        .map(|_| {
            let vars = index::sample(&mut rng, n, 3);
            let lit = |i: usize, rng: &mut ChaCha8Rng| Literal {
                var: vars.index(i) as u32,
                negated: rng.random_bool(0.5),
            };
            [lit(0, &mut rng), lit(1, &mut rng), lit(2, &mut rng)]
        })
        .collect();
    SatInstance::new(n, clauses)
}

/// Mean over variables of the share of clauses containing that variable.
pub fn flip_overlap_fraction(instance: &SatInstance) -> Rational {
    let sum: Rational = (0..instance.n as u32)
        .map(|v| instance.clause_share(v))
        .sum();
    sum / rational::int(instance.n as i64)
}

/// Chance that a clause of three independently drawn variables (with
/// replacement) mentions a given one of `n` variables: `1 − ((n−1)/n)³`.
pub fn with_replacement_overlap(n: u32) -> Rational {
    let keep = rational::frac(n as i64 - 1, n as i64);
    rational::int(1) - &keep * &keep * &keep
}

impl ExplicitProblem for SatInstance {
    type Solution = Vec<bool>;

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn size(&self) -> u128 {
        if self.n >= 128 {
            u128::MAX
        } else {
            1u128 << self.n
        }
    }

    fn fitness(&self, s: &Vec<bool>) -> Rational {
        rational::int(self.satisfied(s) as i64)
    }

    fn neighbours(&self, s: &Vec<bool>) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|i| {
                let mut t = s.clone();
                t[i] = !t[i];
                t
            })
            .collect()
    }

    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        (0..self.n).map(|_| rng.random_bool(0.5)).collect()
    }

    fn enumerate_shard(&self, _shard: usize) -> Box<dyn Iterator<Item = Vec<bool>> + Send + '_> {
        let n = self.n;
        // variable 0 is the most significant bit, giving lexicographic order
        Box::new((0..self.size()).map(move |x| (0..n).map(|i| x >> (n - 1 - i) & 1 == 1).collect()))
    }
}
