//! Relabelled problems: `f_φ(i) = f(φ(i))` for a bijection `φ` of the
//! solutions, and the contrasting misuse that permutes fitness values.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::Sense;
use crate::problem::{EnumerationConfig, ExplicitProblem};
use crate::rational::Rational;

/// A problem whose solutions are indices `0..|S|` into the base problem's
/// enumeration, composed with a permutation.
#[derive(Clone, Debug)]
pub struct Relabelled<P: ExplicitProblem> {
    base: P,
    solutions: Vec<P::Solution>,
    rank: BTreeMap<P::Solution, usize>,
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl<P: ExplicitProblem> Relabelled<P> {
    pub fn new(base: P, perm: Vec<usize>, cfg: &EnumerationConfig) -> Result<Self> {
        cfg.check_budget(base.size())?;
        let solutions: Vec<_> = base.enumerate().collect();
        let mut seen = vec![false; solutions.len()];
        if perm.len() != solutions.len() {
            return Err(Error::InvalidInstance(
                "permutation length differs from |S|".into(),
            ));
        }
        for &p in &perm {
            if p >= seen.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInstance("not a permutation".into()));
            }
        }
        let rank = solutions
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        Ok(Self {
            base,
            solutions,
            rank,
            perm,
            inverse,
        })
    }

    pub fn identity(base: P, cfg: &EnumerationConfig) -> Result<Self> {
        let n = Self::len_within_budget(&base, cfg)?;
        Self::new(base, (0..n).collect(), cfg)
    }

    pub fn shuffled(base: P, seed: u64, cfg: &EnumerationConfig) -> Result<Self> {
        let mut perm: Vec<usize> = (0..Self::len_within_budget(&base, cfg)?).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::new(base, perm, cfg)
    }

    fn len_within_budget(base: &P, cfg: &EnumerationConfig) -> Result<usize> {
        cfg.check_budget(base.size())?;
        usize::try_from(base.size()).map_err(|_| Error::BudgetExceeded {
            size: base.size(),
            budget: cfg.budget,
        })
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }
}

impl<P: ExplicitProblem> ExplicitProblem for Relabelled<P> {
    type Solution = usize;

    fn sense(&self) -> Sense {
        self.base.sense()
    }

    fn size(&self) -> u128 {
        self.solutions.len() as u128
    }

    fn fitness(&self, i: &usize) -> Rational {
        self.base.fitness(&self.solutions[self.perm[*i]])
    }

    /// Neighbourhoods are carried along: `N_φ(i) = φ⁻¹(N(φ(i)))`.
    fn neighbours(&self, i: &usize) -> Vec<usize> {
        self.base
            .neighbours(&self.solutions[self.perm[*i]])
            .iter()
            .map(|s| self.inverse[self.rank[s]])
            .collect()
    }

    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.solutions.len())
    }

    fn enumerate_shard(&self, _shard: usize) -> Box<dyn Iterator<Item = usize> + Send + '_> {
        Box::new(0..self.solutions.len())
    }
}

/// Maps every fitness value through a permutation of the values that occur.
/// Unlike [`Relabelled`] this changes which solutions share a value, so the
/// histogram generally changes.
#[derive(Clone, Debug)]
pub struct ValueRelabelled<P> {
    base: P,
    map: BTreeMap<Rational, Rational>,
}

impl<P: ExplicitProblem> ValueRelabelled<P> {
    /// `map` must be a bijection on the fitness values of `base`.
    pub fn new(base: P, map: BTreeMap<Rational, Rational>) -> Result<Self> {
        let mut targets: Vec<_> = map.values().cloned().collect();
        targets.sort();
        if !targets.iter().eq(map.keys()) {
            return Err(Error::InvalidInstance(
                "value map is not a permutation".into(),
            ));
        }
        Ok(Self { base, map })
    }
}

impl<P: ExplicitProblem> ExplicitProblem for ValueRelabelled<P> {
    type Solution = P::Solution;

    fn sense(&self) -> Sense {
        self.base.sense()
    }

    fn size(&self) -> u128 {
        self.base.size()
    }

    fn fitness(&self, s: &P::Solution) -> Rational {
        let f = self.base.fitness(s);
        self.map.get(&f).cloned().unwrap_or(f)
    }

    fn neighbours(&self, s: &P::Solution) -> Vec<P::Solution> {
        self.base.neighbours(s)
    }

    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> P::Solution {
        self.base.random_solution(rng)
    }

    fn shard_count(&self) -> usize {
        self.base.shard_count()
    }

    fn enumerate_shard(&self, shard: usize) -> Box<dyn Iterator<Item = P::Solution> + Send + '_> {
        self.base.enumerate_shard(shard)
    }
}
