//! Problem spec strings: `sumterms:k=5,m=5`, `tsp:footnote`,
//! `tsp:n=12,d=20`, `tsp:file=PATH`, `sat:n=100,m=430,seed=S`, `toy:fig3`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::histogram::FitnessHistogram;
use crate::problem::{build_histogram, EnumerationConfig, ExplicitProblem};

use super::{
    convolution_census, make_pair_sequence_tsp, make_random_3sat, make_sum_of_terms, make_toy_fig3,
    tsp_census, GraphProblem, SatInstance, SumOfTermsProblem, TspCensusConfig, TspInstance,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProblemSpec {
    SumTerms { k: usize, m: u32 },
    TspPairSequence { n: usize, d: u32 },
    TspFile(PathBuf),
    Sat { n: usize, m: usize, seed: u64 },
    ToyFig3,
}

fn params(body: &str) -> Result<BTreeMap<&str, &str>> {
    body.split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Parse(format!("expected key=value, found {p:?}")))
        })
        .collect()
}

fn take<T: FromStr>(map: &mut BTreeMap<&str, &str>, key: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    let raw = map
        .remove(key)
        .ok_or_else(|| Error::Parse(format!("missing parameter {key:?}")))?;
    raw.parse()
        .map_err(|e| Error::Parse(format!("parameter {key}={raw}: {e}")))
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let spec = match (kind.trim(), body.trim()) {
            ("toy", "fig3") => ProblemSpec::ToyFig3,
            ("tsp", "footnote") => ProblemSpec::TspPairSequence { n: 12, d: 20 },
            ("tsp", body) if body.starts_with("file=") => {
                ProblemSpec::TspFile(PathBuf::from(&body["file=".len()..]))
            }
            (kind @ ("sumterms" | "tsp" | "sat"), body) => {
                let mut map = params(body)?;
                let spec = match kind {
                    "sumterms" => ProblemSpec::SumTerms {
                        k: take(&mut map, "k")?,
                        m: take(&mut map, "m")?,
                    },
                    "tsp" => ProblemSpec::TspPairSequence {
                        n: take(&mut map, "n")?,
                        d: take(&mut map, "d")?,
                    },
                    _ => ProblemSpec::Sat {
                        n: take(&mut map, "n")?,
                        m: take(&mut map, "m")?,
                        seed: take(&mut map, "seed")?,
                    },
                };
                if let Some(extra) = map.keys().next() {
                    return Err(Error::Parse(format!("unknown parameter {extra:?}")));
                }
                spec
            }
            _ => return Err(Error::Parse(format!("unknown problem spec {s:?}"))),
        };
        if let ProblemSpec::SumTerms { k, m } = spec {
            if k == 0 || m == 0 {
                return Err(Error::Parse("sumterms needs k >= 1 and m >= 1".into()));
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::SumTerms { k, m } => write!(f, "sumterms:k={k},m={m}"),
            ProblemSpec::TspPairSequence { n: 12, d: 20 } => write!(f, "tsp:footnote"),
            ProblemSpec::TspPairSequence { n, d } => write!(f, "tsp:n={n},d={d}"),
            ProblemSpec::TspFile(p) => write!(f, "tsp:file={}", p.display()),
            ProblemSpec::Sat { n, m, seed } => write!(f, "sat:n={n},m={m},seed={seed}"),
            ProblemSpec::ToyFig3 => write!(f, "toy:fig3"),
        }
    }
}

/// The concrete problem behind a spec.
#[derive(Clone, Debug)]
pub enum LoadedProblem {
    SumTerms(SumOfTermsProblem),
    Tsp(TspInstance),
    Sat(SatInstance),
    Graph(GraphProblem),
}

/// Evaluates `$body` with `$p` bound to the concrete problem inside a
/// [`LoadedProblem`], so generic code runs on whichever one it holds.
#[macro_export]
macro_rules! with_problem {
    ($loaded:expr, $p:ident => $body:expr) => {
        match $loaded {
            $crate::problems::LoadedProblem::SumTerms($p) => $body,
            $crate::problems::LoadedProblem::Tsp($p) => $body,
            $crate::problems::LoadedProblem::Sat($p) => $body,
            $crate::problems::LoadedProblem::Graph($p) => $body,
        }
    };
}

/// Pair-sequence instance whose ×4 count is whatever makes the multiset
/// cover every pair exactly; `(12, 20)` gives the footnote instance.
fn pair_sequence(n: usize, d: u32) -> Result<TspInstance> {
    let pairs = (n * n.saturating_sub(1) / 2) as i64;
    let quadruples = pairs - 3 * d as i64;
    if !(0..=d as i64).contains(&quadruples) {
        return Err(Error::InconsistentMultiplicity {
            pairs: pairs as usize,
            values: d,
            detail: format!("needs between {} and {} pairs", 3 * d, 4 * d),
        });
    }
    make_pair_sequence_tsp(n, d, quadruples as u32)
}

impl ProblemSpec {
    /// Builds the instance; `tsp:file=` reads the matrix file.
    pub fn load(&self) -> Result<LoadedProblem> {
        Ok(match self {
            ProblemSpec::SumTerms { k, m } => LoadedProblem::SumTerms(make_sum_of_terms(*k, *m)),
            ProblemSpec::TspPairSequence { n, d } => LoadedProblem::Tsp(pair_sequence(*n, *d)?),
            ProblemSpec::TspFile(path) => {
                LoadedProblem::Tsp(TspInstance::from_text(&std::fs::read_to_string(path)?)?)
            }
            ProblemSpec::Sat { n, m, seed } => LoadedProblem::Sat(make_random_3sat(*n, *m, *seed)?),
            ProblemSpec::ToyFig3 => LoadedProblem::Graph(make_toy_fig3()),
        })
    }
}

/// Exact histogram by the fastest available route: the generating
/// polynomial for sums, the specialised walk for TSP, plain enumeration
/// otherwise. Only enumeration is subject to the budget.
pub fn census(problem: &LoadedProblem, cfg: &EnumerationConfig) -> Result<FitnessHistogram> {
    match problem {
        LoadedProblem::SumTerms(p) => convolution_census(p.k(), p.m()),
        LoadedProblem::Tsp(t) => {
            cfg.check_budget(t.size())?;
            let tsp_cfg = TspCensusConfig {
                workers: cfg.workers,
                ..Default::default()
            };
            Ok(tsp_census(t, &tsp_cfg)?.hist)
        }
        LoadedProblem::Sat(p) => build_histogram(p, cfg),
        LoadedProblem::Graph(p) => build_histogram(p, cfg),
    }
}
