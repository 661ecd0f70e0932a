//! Python bindings. Exact values cross the boundary as `fractions.Fraction`;
//! reports and summaries arrive as plain dicts, with rationals in them kept
//! as `"n/d"` strings.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;

use nsf_core::io::{
    aggregate_to_json, census_summary, histogram_csv, histogram_to_json, parse_landscape, Landscape,
};
use nsf_core::problems::{self, ProblemSpec};
use nsf_core::properties::{
    analyze, check_cardinality_monotonic, check_effective_at, check_lemma1, good_enough,
    modal_fitness, verify_theorem1,
};
use nsf_core::search::{head_to_head, EstimatePlan, Pivot, SearchConfig, Start};
use nsf_core::synth::{
    generate_case, run_suite as core_run_suite, summarize, uniform_neighbourhood, Violation,
};
use nsf_core::{
    build_aggregate, rational, with_problem, AggregateLandscape, EnumerationConfig, Error,
    ExplicitProblem, FitnessHistogram, Rational, Sense,
};

create_exception!(nsf_landscape, BudgetExceeded, PyException);

fn err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => BudgetExceeded::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((rational::to_display(q),))
}

fn fractions<'py>(py: Python<'py>, qs: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let items = qs
        .iter()
        .map(|q| fraction(py, q))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

/// Accepts an int, a `Fraction` or an `"n/d"` string.
fn to_rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    rational::parse(&value.str()?.to_cow()?).map_err(err)
}

fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.getattr("loads")?.call1((text,))
}

fn parse_spec(spec: &str) -> PyResult<ProblemSpec> {
    spec.parse().map_err(err)
}

fn enumeration(max_size: Option<u128>) -> EnumerationConfig {
    match max_size {
        Some(b) => EnumerationConfig::default().with_budget(b),
        None => EnumerationConfig::default(),
    }
}

/// Exact solution counts per fitness level.
#[pyclass(name = "Histogram", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyHistogram(FitnessHistogram);

#[pymethods]
impl PyHistogram {
    /// `counts[i]` solutions at integer fitness `v_min + i`.
    #[new]
    #[pyo3(signature = (counts, v_min = 0, sense = "max"))]
    fn new(counts: Vec<u64>, v_min: i64, sense: &str) -> PyResult<Self> {
        let sense = match sense {
            "max" | "maximize" => Sense::Maximize,
            "min" | "minimize" => Sense::Minimize,
            _ => return Err(PyValueError::new_err(format!("unknown sense {sense:?}"))),
        };
        FitnessHistogram::from_counts(sense, v_min, &counts)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(parse_landscape(text).map_err(err)?.hist().clone()))
    }

    fn to_json(&self) -> String {
        histogram_to_json(&self.0)
    }

    fn to_csv(&self) -> String {
        histogram_csv(&self.0)
    }

    #[getter]
    fn v_min(&self) -> i64 {
        self.0.v_min()
    }

    #[getter]
    fn v_max(&self) -> i64 {
        self.0.v_max()
    }

    #[getter]
    fn levels(&self) -> Vec<i64> {
        self.0.levels().collect()
    }

    #[getter]
    fn counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fractions(py, self.0.counts())
    }

    #[getter]
    fn total<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.0.total())
    }

    fn count<'py>(&self, py: Python<'py>, v: i64) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.count(v))
    }

    /// Share of solutions strictly better than level `v`.
    fn p_plus<'py>(&self, py: Python<'py>, v: i64) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.p_plus(v).map_err(err)?)
    }

    fn proportion_at_or_above<'py>(&self, py: Python<'py>, v: i64) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.proportion_at_or_above(v))
    }

    fn modal_fitness(&self) -> i64 {
        modal_fitness(&self.0)
    }

    fn good_enough(&self) -> i64 {
        good_enough(&self.0)
    }

    /// Headline numbers in original fitness units.
    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &census_summary(&self.0))
    }

    #[pyo3(signature = (strict = true))]
    fn check_cardinality_monotonic<'py>(
        &self,
        py: Python<'py>,
        strict: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &check_cardinality_monotonic(&self.0, strict))
    }

    fn check_lemma1<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &check_lemma1(&self.0))
    }

    fn __len__(&self) -> usize {
        self.0.grid().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Histogram(levels {}..={}, total {})",
            self.0.v_min(),
            self.0.v_max(),
            self.0.total()
        )
    }
}

/// A histogram plus its fitness-level transition matrix.
#[pyclass(name = "Landscape", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyLandscape(AggregateLandscape);

#[pymethods]
impl PyLandscape {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match parse_landscape(text).map_err(err)? {
            Landscape::Aggregate(a) => Ok(Self(a)),
            Landscape::Histogram(_) => Err(PyValueError::new_err("file has no transition matrix")),
        }
    }

    /// Every solution's neighbourhood is the whole space.
    #[staticmethod]
    fn uniform(hist: &PyHistogram) -> Self {
        Self(uniform_neighbourhood(&hist.0))
    }

    fn to_json(&self) -> String {
        aggregate_to_json(&self.0)
    }

    #[getter]
    fn histogram(&self) -> PyHistogram {
        PyHistogram(self.0.hist().clone())
    }

    fn nf<'py>(&self, py: Python<'py>, v: i64, w: i64) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.nf(v, w))
    }

    fn nf_size<'py>(&self, py: Python<'py>, v: i64) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.nf_size(v))
    }

    /// Share of level `v`'s neighbours strictly better than `v`.
    fn pn_plus<'py>(&self, py: Python<'py>, v: i64) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.pn_plus(v).map_err(err)?)
    }

    fn effective_at<'py>(&self, py: Python<'py>, v: i64) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &check_effective_at(&self.0, v).map_err(err)?)
    }

    /// Every property report, in a fixed order.
    #[pyo3(signature = (tolerance = None))]
    fn analyze<'py>(
        &self,
        py: Python<'py>,
        tolerance: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let tol = tolerance
            .map(to_rational)
            .transpose()?
            .unwrap_or_else(|| rational::int(0));
        to_dict(py, &analyze(&self.0, &tol))
    }

    fn verify_theorem<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &verify_theorem1(&self.0))
    }

    fn __repr__(&self) -> String {
        let h = self.0.hist();
        format!(
            "Landscape(levels {}..={}, total {})",
            h.v_min(),
            h.v_max(),
            h.total()
        )
    }
}

/// Exact histogram of a problem spec such as `"sumterms:k=5,m=5"`.
#[pyfunction]
#[pyo3(signature = (spec, max_size = None))]
fn census(spec: &str, max_size: Option<u128>) -> PyResult<PyHistogram> {
    let loaded = parse_spec(spec)?.load().map_err(err)?;
    problems::census(&loaded, &enumeration(max_size))
        .map(PyHistogram)
        .map_err(err)
}

/// Exhaustive transition matrix of a problem spec.
#[pyfunction]
#[pyo3(signature = (spec, max_size = None))]
fn aggregate(spec: &str, max_size: Option<u128>) -> PyResult<PyLandscape> {
    let cfg = enumeration(max_size);
    with_problem!(parse_spec(spec)?.load().map_err(err)?, p => build_aggregate(&p, &cfg))
        .map(PyLandscape)
        .map_err(err)
}

/// Parses landscape JSON into a `Histogram` or, when it has a matrix, a `Landscape`.
#[pyfunction]
fn load_landscape(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(match parse_landscape(text).map_err(err)? {
        Landscape::Histogram(h) => Bound::new(py, PyHistogram(h))?.into_any().unbind(),
        Landscape::Aggregate(a) => Bound::new(py, PyLandscape(a))?.into_any().unbind(),
    })
}

fn violation(name: &str) -> PyResult<Violation> {
    name.parse().map_err(err)
}

/// The synthetic landscape generated from `seed`.
#[pyfunction]
#[pyo3(signature = (seed, violation = "none"))]
fn synthesize(seed: u64, violation: &str) -> PyResult<PyLandscape> {
    let case = generate_case(seed, self::violation(violation)?);
    match (case.landscape, case.error) {
        (Some(a), _) => Ok(PyLandscape(a)),
        (None, e) => Err(PyValueError::new_err(e.unwrap_or_default())),
    }
}

/// Summary of one synthetic suite over seeds `first_seed..first_seed + seeds`.
#[pyfunction]
#[pyo3(signature = (seeds, violation = "none", first_seed = 0))]
fn run_suite<'py>(
    py: Python<'py>,
    seeds: u64,
    violation: &str,
    first_seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    if seeds == 0 {
        return Err(PyValueError::new_err("seeds must be at least 1"));
    }
    let v = self::violation(violation)?;
    to_dict(py, &summarize(v, &core_run_suite(first_seed, seeds, v)))
}

fn compare_on<'py, P: ExplicitProblem>(
    py: Python<'py>,
    problem: &P,
    config: &SearchConfig<P::Solution>,
    runs: u64,
    levels: Option<Vec<Bound<'py, PyAny>>>,
    trials: u64,
    cfg: &EnumerationConfig,
) -> PyResult<Bound<'py, PyAny>> {
    let plan = match levels {
        None => EstimatePlan::default(),
        Some(values) => {
            let scale = nsf_core::problem::fitness_scale(problem, cfg);
            let levels = values
                .iter()
                .map(|v| scale.level_of(&to_rational(v)?).map_err(err))
                .collect::<PyResult<Vec<_>>>()?;
            EstimatePlan {
                trials,
                levels: Some(levels),
            }
        }
    };
    to_dict(
        py,
        &head_to_head(problem, config, runs, &plan, cfg).map_err(err)?,
    )
}

/// Hill climbing against random search on equal budgets; `levels` are
/// fitness values at which improvement probabilities are also estimated.
#[pyfunction]
#[pyo3(signature = (spec, budget = 1000, runs = 100, seed = 0, pivot = "first", levels = None, trials = 10_000, max_size = None))]
#[allow(clippy::too_many_arguments)]
fn compare<'py>(
    py: Python<'py>,
    spec: &str,
    budget: u64,
    runs: u64,
    seed: u64,
    pivot: &str,
    levels: Option<Vec<Bound<'py, PyAny>>>,
    trials: u64,
    max_size: Option<u128>,
) -> PyResult<Bound<'py, PyAny>> {
    let pivot: Pivot = pivot.parse().map_err(err)?;
    let cfg = enumeration(max_size);
    with_problem!(parse_spec(spec)?.load().map_err(err)?, p => {
        let mut config = SearchConfig::new(pivot, budget, seed).map_err(err)?;
        config.start = Start::Random;
        compare_on(py, &p, &config, runs, levels, trials, &cfg)
    })
}

/// Share of clauses touched by a single flip, for a random 3-SAT instance.
#[pyfunction]
fn flip_overlap<'py>(
    py: Python<'py>,
    n: usize,
    m: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let instance = problems::make_random_3sat(n, m, seed).map_err(err)?;
    fraction(py, &problems::flip_overlap_fraction(&instance))
}

#[pymodule]
fn nsf_landscape(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHistogram>()?;
    m.add_class::<PyLandscape>()?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(load_landscape, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(flip_overlap, m)?)?;
    Ok(())
}
