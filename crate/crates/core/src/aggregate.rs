//! The fitness-transition view of a landscape.
//!
//! `nf[v][w]` counts the distinct solutions of fitness `w` in the union of
//! neighbourhoods of all level-`v` solutions. Rows may also hold arbitrary
//! non-negative rationals (synthesized landscapes), in which case the
//! landscape is not integer-realizable.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::histogram::FitnessHistogram;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateLandscape {
    hist: FitnessHistogram,
    nf: Vec<Vec<Rational>>,
    nf_size: Vec<Rational>,
    integer_realizable: bool,
}

impl AggregateLandscape {
    /// `nf` is indexed by grid offset on both axes. Rows of empty levels must
    /// be zero. An occupied level may have no neighbours at all (an isolated
    /// optimum, say); its shares are then all 0.
    pub fn new(
        hist: FitnessHistogram,
        nf: Vec<Vec<Rational>>,
        integer_realizable: bool,
    ) -> Result<Self> {
        let n = hist.grid().len();
        if nf.len() != n || nf.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidLandscape(format!(
                "transition matrix must be {n}x{n}"
            )));
        }
        let v_min = hist.v_min();
        for (i, row) in nf.iter().enumerate() {
            let v = v_min + i as i64;
            for (j, x) in row.iter().enumerate() {
                let w = v_min + j as i64;
                if x.is_negative() {
                    return Err(Error::InvalidLandscape(format!("nf[{v}][{w}] is negative")));
                }
                if !x.is_zero() && !hist.occupied(w) {
                    return Err(Error::InvalidLandscape(format!(
                        "nf[{v}][{w}] > 0 but level {w} is empty"
                    )));
                }
                if integer_realizable {
                    if !x.is_integer() {
                        return Err(Error::InvalidLandscape(format!(
                            "nf[{v}][{w}] is not integral"
                        )));
                    }
                    if x > &hist.count(w) {
                        return Err(Error::InvalidLandscape(format!(
                            "nf[{v}][{w}] exceeds ct[{w}]"
                        )));
                    }
                }
            }
        }
        let nf_size: Vec<Rational> = nf.iter().map(|row| row.iter().sum()).collect();
        for (i, size) in nf_size.iter().enumerate() {
            let v = v_min + i as i64;
            if !hist.occupied(v) && !size.is_zero() {
                return Err(Error::InvalidLandscape(format!(
                    "empty level {v} has neighbours"
                )));
            }
        }
        Ok(Self {
            hist,
            nf,
            nf_size,
            integer_realizable,
        })
    }

    pub fn hist(&self) -> &FitnessHistogram {
        &self.hist
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.nf
    }

    pub fn integer_realizable(&self) -> bool {
        self.integer_realizable
    }

    /// `nf[v][w]`, zero off the grid.
    pub fn nf(&self, v: i64, w: i64) -> Rational {
        let g = self.hist.grid();
        match (g.index(v), g.index(w)) {
            (Some(i), Some(j)) => self.nf[i][j].clone(),
            _ => Rational::zero(),
        }
    }

    /// `|Nf(v)|`.
    pub fn nf_size(&self, v: i64) -> Rational {
        self.hist
            .grid()
            .index(v)
            .map_or_else(Rational::zero, |i| self.nf_size[i].clone())
    }

    fn occupied(&self, v: i64) -> Result<()> {
        self.hist.grid().check(v)?;
        if self.hist.occupied(v) {
            Ok(())
        } else {
            Err(Error::EmptyLevel { level: v })
        }
    }

    /// `pn⁺_v`: share of `Nf(v)` strictly better than `v`, or 0 when `Nf(v)`
    /// is empty.
    pub fn pn_plus(&self, v: i64) -> Result<Rational> {
        self.occupied(v)?;
        let size = self.nf_size(v);
        if size.is_zero() {
            return Ok(Rational::zero());
        }
        let better: Rational = self
            .hist
            .levels()
            .filter(|&w| w > v)
            .map(|w| self.nf(v, w))
            .sum();
        Ok(better / size)
    }

    /// δ-resolved statistics for δ in `1..=v_max − v_ge`.
    pub fn delta_profile(&self, v: i64, v_ge: i64) -> Result<DeltaProfile> {
        self.occupied(v)?;
        if v_ge > self.hist.v_max() {
            return Err(Error::OutOfRange {
                level: v_ge,
                v_min: self.hist.v_min(),
                v_max: self.hist.v_max(),
            });
        }
        let delta_cap = self.hist.v_max() - v_ge;
        Ok(self.profile_up_to(v, delta_cap))
    }

    /// Profile over every δ that can reach another grid level from `v`.
    pub fn full_delta_profile(&self, v: i64) -> Result<DeltaProfile> {
        self.occupied(v)?;
        Ok(self.profile_up_to(v, self.hist.v_max() - self.hist.v_min()))
    }

    fn profile_up_to(&self, v: i64, delta_cap: i64) -> DeltaProfile {
        let size = self.nf_size(v);
        let entries = (1..=delta_cap)
            .map(|delta| {
                let ctn_plus = self.nf(v, v + delta);
                let ctn = &ctn_plus + self.nf(v, v - delta);
                DeltaEntry {
                    delta,
                    pn: if size.is_zero() {
                        Rational::zero()
                    } else {
                        &ctn / &size
                    },
                    p: self.hist.p_delta(v, delta),
                    p_plus: self.hist.p_plus_delta(v, delta),
                    pn_plus: (!ctn.is_zero()).then(|| &ctn_plus / &ctn),
                    ctn,
                    ctn_plus,
                }
            })
            .collect();
        DeltaProfile {
            v,
            delta_cap,
            entries,
        }
    }
}

/// Free-function form of [`AggregateLandscape::pn_plus`].
pub fn pn_plus(agg: &AggregateLandscape, v: i64) -> Result<Rational> {
    agg.pn_plus(v)
}

/// Free-function form of [`AggregateLandscape::delta_profile`].
pub fn delta_profile(agg: &AggregateLandscape, v: i64, v_ge: i64) -> Result<DeltaProfile> {
    agg.delta_profile(v, v_ge)
}

/// Statistics at one fitness distance δ from a level `v`.
///
/// `p_plus` and `pn_plus` are `None` where their denominators vanish; such
/// terms always carry zero weight in sums over δ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaEntry {
    pub delta: i64,
    pub ctn: Rational,
    pub ctn_plus: Rational,
    pub pn: Rational,
    pub p: Rational,
    pub p_plus: Option<Rational>,
    pub pn_plus: Option<Rational>,
}

impl DeltaEntry {
    /// `pn_{v,δ} − p_{v,δ}`.
    pub fn gap(&self) -> Rational {
        &self.pn - &self.p
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaProfile {
    pub v: i64,
    pub delta_cap: i64,
    pub entries: Vec<DeltaEntry>,
}

impl DeltaProfile {
    pub fn entry(&self, delta: i64) -> Option<&DeltaEntry> {
        usize::try_from(delta - 1)
            .ok()
            .and_then(|i| self.entries.get(i))
    }

    /// `Σ_δ pn_{v,δ} · p⁺_{v,δ}`, skipping undefined `p⁺`.
    pub fn neighbour_weighted_p_plus(&self) -> Rational {
        self.entries
            .iter()
            .filter_map(|e| e.p_plus.as_ref().map(|pp| &e.pn * pp))
            .sum()
    }

    /// `Σ_δ p_{v,δ} · p⁺_{v,δ}`, skipping undefined `p⁺`.
    pub fn global_weighted_p_plus(&self) -> Rational {
        self.entries
            .iter()
            .filter_map(|e| e.p_plus.as_ref().map(|pp| &e.p * pp))
            .sum()
    }

    pub fn total_pn(&self) -> Rational {
        self.entries.iter().map(|e| &e.pn).sum()
    }

    pub fn total_p(&self) -> Rational {
        self.entries.iter().map(|e| &e.p).sum()
    }
}
