//! Landscape interchange JSON, histogram CSV and census summaries.
//!
//! Landscape files look like
//!
//! ```json
//! {"sense": "max", "levels": ["1/1", "2/1"], "counts": [3, 1],
//!  "nf": [["0/1", "1/1"], ["2/1", "0/1"]], "integer_realizable": true}
//! ```
//!
//! `levels` are original fitness values from the worst level to the best.
//! Counts and matrix entries may be JSON integers or `"num/den"` strings.
//! The optional `v_min`, `step` and `binned` fields pin the grid exactly;
//! without them the grid starts at level 0 and the step is read off the
//! level spacing.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::aggregate::AggregateLandscape;
use crate::error::{Error, Result};
use crate::grid::{Binning, FitnessGrid, FitnessScale, Sense};
use crate::histogram::FitnessHistogram;
use crate::properties::{good_enough, modal_fitness};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, Serialize, Deserialize)]
struct LandscapeDoc {
    sense: Sense,
    levels: Vec<String>,
    counts: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nf: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    integer_realizable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v_min: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step: Option<String>,
    #[serde(default)]
    binned: bool,
}

/// A parsed landscape file: a bare histogram, or one with its matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Landscape {
    Histogram(FitnessHistogram),
    Aggregate(AggregateLandscape),
}

impl Landscape {
    pub fn hist(&self) -> &FitnessHistogram {
        match self {
            Landscape::Histogram(h) => h,
            Landscape::Aggregate(a) => a.hist(),
        }
    }
}

fn value_to_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(rational::int)
            .or_else(|| n.as_u64().map(|u| rational::uint(u as u128)))
            .ok_or_else(|| {
                Error::Parse(format!(
                    "{n} is not an integer; write fractions as \"num/den\""
                ))
            }),
        Value::String(s) => rational::parse(s),
        other => Err(Error::Parse(format!(
            "expected a number or \"num/den\", found {other}"
        ))),
    }
}

fn count_value(q: &Rational) -> Value {
    match q.is_integer().then(|| q.to_u64()).flatten() {
        Some(n) => Value::from(n),
        None => Value::from(rational::to_string(q)),
    }
}

fn doc_of(hist: &FitnessHistogram, nf: Option<&AggregateLandscape>) -> LandscapeDoc {
    let grid = hist.grid();
    LandscapeDoc {
        sense: grid.sense(),
        levels: grid
            .levels()
            .map(|v| rational::to_string(&grid.to_original(v)))
            .collect(),
        counts: hist.counts().iter().map(count_value).collect(),
        nf: nf.map(|a| {
            a.matrix()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| Value::from(rational::to_string(x)))
                        .collect()
                })
                .collect()
        }),
        integer_realizable: nf.is_some_and(AggregateLandscape::integer_realizable),
        v_min: Some(grid.v_min()),
        step: Some(rational::to_string(grid.scale().step())),
        binned: grid.scale().is_binned(),
    }
}

pub fn histogram_to_json(hist: &FitnessHistogram) -> String {
    serde_json::to_string_pretty(&doc_of(hist, None)).expect("plain data serializes")
}

pub fn aggregate_to_json(agg: &AggregateLandscape) -> String {
    serde_json::to_string_pretty(&doc_of(agg.hist(), Some(agg))).expect("plain data serializes")
}

pub fn landscape_to_json(landscape: &Landscape) -> String {
    match landscape {
        Landscape::Histogram(h) => histogram_to_json(h),
        Landscape::Aggregate(a) => aggregate_to_json(a),
    }
}

fn grid_of(doc: &LandscapeDoc) -> Result<FitnessGrid> {
    let levels = doc
        .levels
        .iter()
        .map(|s| rational::parse(s))
        .collect::<Result<Vec<_>>>()?;
    let Some(first) = levels.first() else {
        return Err(Error::InvalidGrid("no levels".into()));
    };
    let sign = match doc.sense {
        Sense::Maximize => rational::int(1),
        Sense::Minimize => rational::int(-1),
    };
    let step = match (&doc.step, levels.get(1)) {
        (Some(s), _) => rational::parse(s)?,
        (None, Some(second)) => (second - first) * &sign,
        (None, None) => rational::int(1),
    };
    if !step.is_positive() {
        return Err(Error::InvalidGrid(
            "levels must run from worst to best in the stated sense".into(),
        ));
    }
    let v_min = doc.v_min.unwrap_or(0);
    let origin = first - &step * &sign * rational::int(v_min);
    let scale = if doc.binned {
        FitnessScale::binned(doc.sense, &Binning::new(origin, step)?)
    } else {
        FitnessScale::new(doc.sense, origin, step)?
    };
    let grid = FitnessGrid::new(scale, v_min, v_min + levels.len() as i64 - 1)?;
    for (v, value) in grid.levels().zip(&levels) {
        if &grid.to_original(v) != value {
            return Err(Error::InvalidGrid(format!(
                "level values are not evenly spaced at {}",
                rational::to_display(value)
            )));
        }
    }
    Ok(grid)
}

pub fn parse_landscape(text: &str) -> Result<Landscape> {
    let doc: LandscapeDoc = serde_json::from_str(text)?;
    let grid = grid_of(&doc)?;
    let counts = doc
        .counts
        .iter()
        .map(value_to_rational)
        .collect::<Result<Vec<_>>>()?;
    let hist = FitnessHistogram::new(grid, counts)?;
    match &doc.nf {
        None => Ok(Landscape::Histogram(hist)),
        Some(rows) => {
            let nf = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(value_to_rational)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Landscape::Aggregate(AggregateLandscape::new(
                hist,
                nf,
                doc.integer_realizable,
            )?))
        }
    }
}

/// `fitness,count,proportion,cum_better` from best level to worst, where
/// `cum_better` is the share strictly better than the row's level.
pub fn histogram_csv(hist: &FitnessHistogram) -> String {
    let mut out = String::from("fitness,count,proportion,cum_better\n");
    for v in hist.levels().rev() {
        let count = hist.count(v);
        let share = &count / hist.total();
        let better = hist.count_above(v) / hist.total();
        out.push_str(&format!(
            "{},{},{},{}\n",
            rational::to_display(&hist.grid().to_original(v)),
            rational::to_display(&count),
            rational::to_string(&share),
            rational::to_string(&better),
        ));
    }
    out
}

/// Headline numbers of a census, in original units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub sense: Sense,
    /// Original value of the worst occupied level.
    #[serde(with = "rational::serde_str")]
    pub worst: Rational,
    #[serde(with = "rational::serde_str")]
    pub best: Rational,
    #[serde(with = "rational::serde_str")]
    pub min: Rational,
    #[serde(with = "rational::serde_str")]
    pub max: Rational,
    #[serde(with = "rational::serde_str")]
    pub mode: Rational,
    #[serde(with = "rational::serde_str")]
    pub size: Rational,
    #[serde(with = "rational::serde_str")]
    pub v_ge: Rational,
    /// Share of solutions at `v_ge` or better.
    #[serde(with = "rational::serde_str")]
    pub proportion_at_or_above_v_ge: Rational,
    pub proportion_at_or_above_v_ge_f64: f64,
    /// Share strictly better than `v_ge`.
    #[serde(with = "rational::serde_str")]
    pub proportion_above_v_ge: Rational,
    pub proportion_above_v_ge_f64: f64,
}

pub fn census_summary(hist: &FitnessHistogram) -> CensusSummary {
    let grid = hist.grid();
    let worst = grid.to_original(hist.v_min());
    let best = grid.to_original(hist.v_max());
    let (min, max) = if worst <= best {
        (worst.clone(), best.clone())
    } else {
        (best.clone(), worst.clone())
    };
    let ge = good_enough(hist);
    let share = hist.proportion_at_or_above(ge);
    let strict = hist.count_above(ge) / hist.total();
    CensusSummary {
        sense: grid.sense(),
        worst,
        best,
        min,
        max,
        mode: grid.to_original(modal_fitness(hist)),
        size: hist.total().clone(),
        v_ge: grid.to_original(ge),
        proportion_at_or_above_v_ge_f64: rational::to_f64(&share),
        proportion_at_or_above_v_ge: share,
        proportion_above_v_ge_f64: rational::to_f64(&strict),
        proportion_above_v_ge: strict,
    }
}

/// Readable form of a share with four decimals, e.g. `0.0790`.
pub fn decimal(q: &Rational) -> String {
    if q.is_zero() {
        return "0.0000".into();
    }
    format!("{:.4}", rational::to_f64(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_aggregate, EnumerationConfig};
    use crate::problems::{make_pair_sequence_tsp, make_toy_fig3, tsp_census, TspCensusConfig};
    use crate::synth::{generate_cm_histogram, generate_nsf_unskewed, SynthSpec, Violation};

    #[test]
    fn toy_round_trips() {
        let agg = build_aggregate(&make_toy_fig3(), &EnumerationConfig::default()).unwrap();
        let back = parse_landscape(&aggregate_to_json(&agg)).unwrap();
        assert_eq!(back, Landscape::Aggregate(agg));
    }

    #[test]
    fn synthetic_round_trips() {
        let spec = SynthSpec::for_seed(17, Violation::None);
        let agg = generate_nsf_unskewed(&generate_cm_histogram(&spec), &spec).unwrap();
        let back = parse_landscape(&aggregate_to_json(&agg)).unwrap();
        assert_eq!(back, Landscape::Aggregate(agg));
    }

    #[test]
    fn minimisation_grid_round_trips() {
        let tsp = make_pair_sequence_tsp(6, 5, 0).unwrap();
        let census = tsp_census(&tsp, &TspCensusConfig::default()).unwrap();
        let json = histogram_to_json(&census.hist);
        assert_eq!(
            parse_landscape(&json).unwrap(),
            Landscape::Histogram(census.hist.clone())
        );
        let csv = histogram_csv(&census.hist);
        let first = csv.lines().nth(1).unwrap();
        assert!(first.starts_with(&format!("{},", census.min_length)));
    }

    #[test]
    fn minimal_document() {
        let l = parse_landscape(r#"{"sense":"max","levels":["1","2"],"counts":[1,1]}"#).unwrap();
        assert_eq!(l.hist().count(1), rational::int(1));
        assert!(
            parse_landscape(r#"{"sense":"max","levels":["1","3","4"],"counts":[1,1,1]}"#).is_err()
        );
        assert!(parse_landscape(r#"{"sense":"max","levels":["2","1"],"counts":[1,1]}"#).is_err());
        assert!(
            parse_landscape(r#"{"sense":"max","levels":["1"],"counts":[1],"nf":[["1/0"]]}"#)
                .is_err()
        );
    }

    #[test]
    fn csv_rows_best_first() {
        let h = FitnessHistogram::from_counts(Sense::Maximize, 1, &[6, 10, 4, 2]).unwrap();
        let csv = histogram_csv(&h);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "fitness,count,proportion,cum_better");
        assert_eq!(lines[1], "4,2,1/11,0/1");
        assert_eq!(lines[2], "3,4,2/11,1/11");
        let s = census_summary(&h);
        assert_eq!(
            (s.mode.clone(), s.v_ge.clone()),
            (rational::int(2), rational::int(3))
        );
        assert_eq!(s.proportion_at_or_above_v_ge, rational::frac(6, 22));
    }
}
