//! Integer fitness grids.
//!
//! Statistics are computed on an integer axis of grid levels where a higher
//! level is always better. A [`FitnessScale`] maps levels back to the
//! problem's own units: `original = origin + sign * step * level`, with
//! `sign = -1` for minimisation problems so that shorter routes sit on
//! higher levels.

use std::ops::RangeInclusive;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "max")]
    Maximize,
    #[serde(rename = "min")]
    Minimize,
}

impl Sense {
    fn sign(self) -> i64 {
        match self {
            Sense::Maximize => 1,
            Sense::Minimize => -1,
        }
    }

    /// Whether `a` is strictly better than `b` in original units.
    pub fn better(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }
}

/// Fixed-width bins for non-integral fitness values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binning {
    pub origin: Rational,
    pub width: Rational,
}

impl Binning {
    pub fn new(origin: Rational, width: Rational) -> Result<Self> {
        if !width.is_positive() {
            return Err(Error::InvalidGrid("bin width must be positive".into()));
        }
        Ok(Self { origin, width })
    }
}

/// Affine map between grid levels and original fitness values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FitnessScale {
    sense: Sense,
    origin: Rational,
    step: Rational,
    binned: bool,
}

impl FitnessScale {
    pub fn new(sense: Sense, origin: Rational, step: Rational) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::InvalidGrid("step must be positive".into()));
        }
        Ok(Self {
            sense,
            origin,
            step,
            binned: false,
        })
    }

    /// Unit steps with level 0 at value 0: level = value (max) or -value (min).
    pub fn integer(sense: Sense) -> Self {
        Self {
            sense,
            origin: Rational::zero(),
            step: rational::int(1),
            binned: false,
        }
    }

    pub fn binned(sense: Sense, binning: &Binning) -> Self {
        Self {
            sense,
            origin: binning.origin.clone(),
            step: binning.width.clone(),
            binned: true,
        }
    }

    /// Integer scale when `binning` is absent, otherwise bins of the given width.
    pub fn for_problem(sense: Sense, binning: Option<&Binning>) -> Self {
        match binning {
            Some(b) => Self::binned(sense, b),
            None => Self::integer(sense),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn origin(&self) -> &Rational {
        &self.origin
    }

    pub fn step(&self) -> &Rational {
        &self.step
    }

    pub fn is_binned(&self) -> bool {
        self.binned
    }

    pub fn to_original(&self, level: i64) -> Rational {
        &self.origin + &self.step * rational::int(self.sense.sign() * level)
    }

    /// Level whose bin contains `value`. Off-grid values are rejected as
    /// unbinnable unless the scale was built from a [`Binning`].
    pub fn level_of(&self, value: &Rational) -> Result<i64> {
        let t = (value - &self.origin) / &self.step * rational::int(self.sense.sign());
        let t = if t.is_integer() {
            t.to_integer()
        } else if !self.binned {
            return Err(Error::Unbinnable {
                value: rational::to_display(value),
            });
        } else {
            // bin k covers canonical offsets [k, k + 1)
            t.numer().div_floor(t.denom())
        };
        i64::try_from(t).map_err(|_| Error::InvalidGrid(format!("level of {value} overflows")))
    }
}

/// A tight range of grid levels together with its scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FitnessGrid {
    scale: FitnessScale,
    v_min: i64,
    v_max: i64,
}

impl FitnessGrid {
    pub fn new(scale: FitnessScale, v_min: i64, v_max: i64) -> Result<Self> {
        if v_min > v_max {
            return Err(Error::InvalidGrid(format!("v_min {v_min} > v_max {v_max}")));
        }
        Ok(Self {
            scale,
            v_min,
            v_max,
        })
    }

    pub fn integer(sense: Sense, v_min: i64, v_max: i64) -> Result<Self> {
        Self::new(FitnessScale::integer(sense), v_min, v_max)
    }

    pub fn scale(&self) -> &FitnessScale {
        &self.scale
    }

    pub fn sense(&self) -> Sense {
        self.scale.sense
    }

    pub fn v_min(&self) -> i64 {
        self.v_min
    }

    pub fn v_max(&self) -> i64 {
        self.v_max
    }

    pub fn len(&self) -> usize {
        (self.v_max - self.v_min) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn levels(&self) -> RangeInclusive<i64> {
        self.v_min..=self.v_max
    }

    pub fn contains(&self, v: i64) -> bool {
        (self.v_min..=self.v_max).contains(&v)
    }

    pub fn index(&self, v: i64) -> Option<usize> {
        self.contains(v).then(|| (v - self.v_min) as usize)
    }

    pub fn check(&self, v: i64) -> Result<usize> {
        self.index(v).ok_or(Error::OutOfRange {
            level: v,
            v_min: self.v_min,
            v_max: self.v_max,
        })
    }

    pub fn to_original(&self, v: i64) -> Rational {
        self.scale.to_original(v)
    }
}
