use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::grid::{FitnessGrid, Sense};
use crate::rational::{self, Rational};

/// Solution counts `ct_v` over a tight fitness grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FitnessHistogram {
    grid: FitnessGrid,
    counts: Vec<Rational>,
    total: Rational,
}

impl FitnessHistogram {
    pub fn new(grid: FitnessGrid, counts: Vec<Rational>) -> Result<Self> {
        if counts.len() != grid.len() {
            return Err(Error::InvalidHistogram(format!(
                "{} counts for a grid of {} levels",
                counts.len(),
                grid.len()
            )));
        }
        if let Some(i) = counts.iter().position(|c| c.is_negative()) {
            return Err(Error::InvalidHistogram(format!(
                "negative count at level {}",
                grid.v_min() + i as i64
            )));
        }
        if counts[0].is_zero() || counts[counts.len() - 1].is_zero() {
            return Err(Error::InvalidHistogram(
                "grid is not tight: an end level is empty".into(),
            ));
        }
        let total = counts.iter().sum();
        Ok(Self {
            grid,
            counts,
            total,
        })
    }

    /// Integer counts on a unit grid starting at `v_min`.
    pub fn from_counts(sense: Sense, v_min: i64, counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidHistogram("no levels".into()));
        }
        let grid = FitnessGrid::integer(sense, v_min, v_min + counts.len() as i64 - 1)?;
        Self::new(
            grid,
            counts.iter().map(|&c| rational::uint(c as u128)).collect(),
        )
    }

    pub fn grid(&self) -> &FitnessGrid {
        &self.grid
    }

    pub fn v_min(&self) -> i64 {
        self.grid.v_min()
    }

    pub fn v_max(&self) -> i64 {
        self.grid.v_max()
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<i64> {
        self.grid.levels()
    }

    pub fn counts(&self) -> &[Rational] {
        &self.counts
    }

    /// `ct_v`, zero off the grid.
    pub fn count(&self, v: i64) -> Rational {
        self.grid
            .index(v)
            .map_or_else(Rational::zero, |i| self.counts[i].clone())
    }

    pub fn occupied(&self, v: i64) -> bool {
        self.grid
            .index(v)
            .is_some_and(|i| !self.counts[i].is_zero())
    }

    /// `|S|`.
    pub fn total(&self) -> &Rational {
        &self.total
    }

    pub fn is_integral(&self) -> bool {
        self.counts.iter().all(|c| c.is_integer())
    }

    /// Sum of counts strictly above `v`.
    pub fn count_above(&self, v: i64) -> Rational {
        self.levels()
            .filter(|&w| w > v)
            .map(|w| self.count(w))
            .sum()
    }

    /// `(p_v, p⁺_v)`: the share of solutions at `v` and strictly better than `v`.
    pub fn global_proportions(&self, v: i64) -> Result<(Rational, Rational)> {
        self.grid.check(v)?;
        Ok((
            self.count(v) / &self.total,
            self.count_above(v) / &self.total,
        ))
    }

    pub fn p_plus(&self, v: i64) -> Result<Rational> {
        Ok(self.global_proportions(v)?.1)
    }

    /// Share of solutions at or above `v`.
    pub fn proportion_at_or_above(&self, v: i64) -> Rational {
        (self.count(v) + self.count_above(v)) / &self.total
    }

    /// `ct_{v+δ} + ct_{v−δ}` with off-grid terms zero.
    pub fn count_at_distance(&self, v: i64, delta: i64) -> Rational {
        self.count(v + delta) + self.count(v - delta)
    }

    /// `p_{v,δ}`.
    pub fn p_delta(&self, v: i64, delta: i64) -> Rational {
        self.count_at_distance(v, delta) / &self.total
    }

    /// `p⁺_{v,δ} = ct_{v+δ} / (ct_{v+δ} + ct_{v−δ})`, `None` when both are empty.
    pub fn p_plus_delta(&self, v: i64, delta: i64) -> Option<Rational> {
        let both = self.count_at_distance(v, delta);
        (!both.is_zero()).then(|| self.count(v + delta) / both)
    }

    /// Level-wise sum; both histograms must share a grid.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.grid.clone(), counts)
    }
}

/// Free-function form of [`FitnessHistogram::global_proportions`].
pub fn global_proportions(hist: &FitnessHistogram, v: i64) -> Result<(Rational, Rational)> {
    hist.global_proportions(v)
}
