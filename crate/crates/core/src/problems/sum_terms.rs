use num_bigint::BigInt;
use rand::Rng;

use crate::error::Result;
use crate::grid::{FitnessGrid, Sense};
use crate::histogram::FitnessHistogram;
use crate::problem::ExplicitProblem;
use crate::rational::{self, Rational};

/// `k` terms, each taking a value in `1..=m`; fitness is their sum.
///
/// A move changes one term by ±1 and is dropped when it would leave `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumOfTermsProblem {
    k: usize,
    m: u32,
}

pub fn make_sum_of_terms(k: usize, m: u32) -> SumOfTermsProblem {
    SumOfTermsProblem::new(k, m)
}

impl SumOfTermsProblem {
    pub fn new(k: usize, m: u32) -> Self {
        assert!(k >= 1 && m >= 1, "need at least one term and one value");
        Self { k, m }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    fn pow(&self, e: usize) -> u128 {
        (self.m as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
    }

    /// Tuple with lexicographic rank `index` among tuples of `len` terms.
    fn decode(&self, mut index: u128, len: usize) -> Vec<u32> {
        let mut out = vec![1; len];
        for slot in out.iter_mut().rev() {
            *slot = (index % self.m as u128) as u32 + 1;
            index /= self.m as u128;
        }
        out
    }
}

impl ExplicitProblem for SumOfTermsProblem {
    type Solution = Vec<u32>;

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn size(&self) -> u128 {
        self.pow(self.k)
    }

    fn fitness(&self, s: &Vec<u32>) -> Rational {
        rational::int(s.iter().map(|&t| t as i64).sum())
    }

    fn neighbours(&self, s: &Vec<u32>) -> Vec<Vec<u32>> {
        let mut out = Vec::with_capacity(2 * s.len());
        for i in 0..s.len() {
            if s[i] > 1 {
                let mut t = s.clone();
                t[i] -= 1;
                out.push(t);
            }
            if s[i] < self.m {
                let mut t = s.clone();
                t[i] += 1;
                out.push(t);
            }
        }
        out
    }

    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        (0..self.k).map(|_| rng.random_range(1..=self.m)).collect()
    }

    fn shard_count(&self) -> usize {
        self.m as usize
    }

    fn enumerate_shard(&self, shard: usize) -> Box<dyn Iterator<Item = Vec<u32>> + Send + '_> {
        let first = shard as u32 + 1;
        let rest = self.k - 1;
        Box::new((0..self.pow(rest)).map(move |i| {
            let mut s = Vec::with_capacity(self.k);
            s.push(first);
            s.extend(self.decode(i, rest));
            s
        }))
    }
}

/// Counts of each sum via repeated convolution of `x + x² + … + xᵐ`.
pub fn convolution_census(k: usize, m: u32) -> Result<FitnessHistogram> {
    assert!(k >= 1 && m >= 1, "need at least one term and one value");
    // coefficient index = sum − k
    let mut poly = vec![BigInt::from(1)];
    for _ in 0..k {
        let mut next = vec![BigInt::from(0); poly.len() + m as usize - 1];
        for (i, c) in poly.iter().enumerate() {
            for slot in &mut next[i..i + m as usize] {
                *slot += c;
            }
        }
        poly = next;
    }
    let grid = FitnessGrid::integer(Sense::Maximize, k as i64, k as i64 * m as i64)?;
    FitnessHistogram::new(grid, poly.into_iter().map(Rational::from_integer).collect())
}
