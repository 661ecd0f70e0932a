use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Property {
    CardinalityMonotonic { strict: bool },
    Unskewed,
    Nsf,
    EffectiveAt(i64),
    EffectiveLandscape,
    Lemma1,
    Theorem1,
    PermutationClosure,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::CardinalityMonotonic { strict: true } => {
                f.write_str("CardinalityMonotonic(strict)")
            }
            Property::CardinalityMonotonic { strict: false } => {
                f.write_str("CardinalityMonotonic(nonstrict)")
            }
            Property::Unskewed => f.write_str("Unskewed"),
            Property::Nsf => f.write_str("NSF"),
            Property::EffectiveAt(v) => write!(f, "EffectiveAt({v})"),
            Property::EffectiveLandscape => f.write_str("EffectiveLandscape"),
            Property::Lemma1 => f.write_str("Lemma1"),
            Property::Theorem1 => f.write_str("Theorem1"),
            Property::PermutationClosure => f.write_str("PermutationClosure"),
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "CardinalityMonotonic(strict)" => Property::CardinalityMonotonic { strict: true },
            "CardinalityMonotonic(nonstrict)" => Property::CardinalityMonotonic { strict: false },
            "Unskewed" => Property::Unskewed,
            "NSF" => Property::Nsf,
            "EffectiveLandscape" => Property::EffectiveLandscape,
            "Lemma1" => Property::Lemma1,
            "Theorem1" => Property::Theorem1,
            "PermutationClosure" => Property::PermutationClosure,
            _ => {
                let level = s
                    .strip_prefix("EffectiveAt(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown property {s:?}")))?;
                Property::EffectiveAt(level)
            }
        })
    }
}

impl Serialize for Property {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Property {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::NotApplicable => "not-applicable",
        })
    }
}

/// The first violated comparison: `relation` read with `lhs` and `rhs`
/// substituted does not hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub clause: String,
    pub v: i64,
    pub delta: Option<i64>,
    pub relation: String,
    #[serde(with = "rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
}

impl Witness {
    pub fn new(
        clause: &str,
        v: i64,
        delta: Option<i64>,
        relation: &str,
        lhs: Rational,
        rhs: Rational,
    ) -> Self {
        Self {
            clause: clause.into(),
            v,
            delta,
            relation: relation.into(),
            lhs,
            rhs,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] v={}", self.clause, self.v)?;
        if let Some(d) = self.delta {
            write!(f, " δ={d}")?;
        }
        write!(
            f,
            ": {} with lhs={} rhs={}",
            self.relation,
            rational::to_display(&self.lhs),
            rational::to_display(&self.rhs)
        )
    }
}

/// Verdict for one property. `witness` is present exactly when the verdict
/// is [`Verdict::Fails`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub v_mode: Option<i64>,
    pub v_ge: Option<i64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
}

impl PropertyReport {
    pub fn holds(property: Property) -> Self {
        Self::with(property, Verdict::Holds, None)
    }

    pub fn fails(property: Property, witness: Witness) -> Self {
        Self::with(property, Verdict::Fails, Some(witness))
    }

    pub fn not_applicable(property: Property, reason: &str) -> Self {
        Self::with(property, Verdict::NotApplicable, None).detail("reason", reason)
    }

    /// Holds when `witness` is `None`, fails with it otherwise.
    pub fn from_witness(property: Property, witness: Option<Witness>) -> Self {
        match witness {
            Some(w) => Self::fails(property, w),
            None => Self::holds(property),
        }
    }

    fn with(property: Property, verdict: Verdict, witness: Option<Witness>) -> Self {
        Self {
            property,
            verdict,
            witness,
            v_mode: None,
            v_ge: None,
            details: BTreeMap::new(),
        }
    }

    pub fn detail(mut self, key: &str, value: impl ToString) -> Self {
        self.details.insert(key.into(), value.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}
