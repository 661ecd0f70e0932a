//! `nsf`: censuses, property reports, theorem suites and search comparisons.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use nsf_core::io::{
    aggregate_to_json, census_summary, histogram_csv, landscape_to_json, parse_landscape, Landscape,
};
use nsf_core::problem::DEFAULT_BUDGET;
use nsf_core::problems::{self, ProblemSpec};
use nsf_core::properties::{
    analyze, check_cardinality_monotonic, check_lemma1, good_enough, modal_fitness,
};
use nsf_core::rational;
use nsf_core::search::{head_to_head, trace_csv, EstimatePlan, Pivot, SearchConfig, Start};
use nsf_core::synth::{run_suite, summarize, Violation};
use nsf_core::{
    build_aggregate, with_problem, EnumerationConfig, Error, ExplicitProblem, FitnessHistogram,
    PropertyReport, Rational, Result,
};

use render::Table;

#[derive(Parser, Debug)]
#[command(
    name = "nsf",
    version,
    about = "Fitness-landscape censuses and neighbourhood-search checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest search space that may be enumerated.
    #[arg(long, global = true, env = "NSF_BUDGET", default_value_t = DEFAULT_BUDGET)]
    max_size: u128,

    /// Worker threads for enumeration; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count solutions per fitness level.
    Census(CensusArgs),
    /// Property reports for a landscape file or a problem spec.
    Analyze(AnalyzeArgs),
    /// Run the synthetic theorem suites.
    VerifyTheorem(VerifyArgs),
    /// Hill climbing against random search on equal budgets.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// Problem spec, e.g. `sumterms:k=5,m=5` or `tsp:footnote`.
    spec: ProblemSpec,
    /// Also write the histogram CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write the summary JSON here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "input")]
struct AnalyzeArgs {
    /// Problem spec to enumerate.
    #[arg(group = "input")]
    spec: Option<ProblemSpec>,
    /// Landscape JSON file.
    #[arg(long, group = "input")]
    landscape: Option<PathBuf>,
    /// Allowed gap in the unskewed check, as `n/d` or an integer.
    #[arg(long, default_value = "0", value_parser = parse_rational)]
    tolerance: Rational,
    /// Also write the aggregate landscape JSON here.
    #[arg(long)]
    save: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Number of seeds per suite.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    /// Suites to run: none, break-nsf, break-cm, break-unskewed, or all.
    #[arg(long, value_delimiter = ',', default_value = "none", value_parser = parse_violations)]
    violation: Vec<Vec<Violation>>,
    /// Directory for counterexample landscapes.
    #[arg(long, default_value = "counterexamples")]
    counterexamples: PathBuf,
}

#[derive(Args, Debug)]
struct CompareArgs {
    spec: ProblemSpec,
    /// Fitness values (problem units) at which to estimate improvement
    /// probabilities.
    #[arg(long = "level", value_parser = parse_rational)]
    levels: Vec<Rational>,
    /// Estimate at every occupied level.
    #[arg(long, conflicts_with = "levels")]
    all_levels: bool,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Fitness evaluations per run for each method.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// first, best or random.
    #[arg(long, default_value = "first")]
    pivot: Pivot,
    /// Write the hill-climb traces as CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

fn parse_violations(s: &str) -> std::result::Result<Vec<Violation>, String> {
    if s == "all" {
        return Ok(vec![
            Violation::None,
            Violation::BreakNsf,
            Violation::BreakCm,
            Violation::BreakUnskewed,
        ]);
    }
    s.parse().map(|v| vec![v]).map_err(|e: Error| e.to_string())
}

enum Failure {
    Core(Error),
    Counterexample(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Ctx {
    format: Format,
    out: Option<PathBuf>,
    enumeration: EnumerationConfig,
}

impl Ctx {
    fn emit(&self, text: &str) -> std::io::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.emit(&text)
    }
}

fn write_file(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)
}

fn census(ctx: &Ctx, args: &CensusArgs) -> Outcome {
    let hist = problems::census(&args.spec.load()?, &ctx.enumeration)?;
    let summary = census_summary(&hist);
    let csv = histogram_csv(&hist);
    if let Some(path) = &args.csv {
        write_file(path, &csv)?;
    }
    if let Some(path) = &args.summary {
        write_file(
            path,
            &(serde_json::to_string_pretty(&summary).map_err(Error::from)? + "\n"),
        )?;
    }
    match ctx.format {
        Format::Csv => ctx.emit(&csv)?,
        Format::Json => ctx.json(&json!({
            "spec": args.spec.to_string(),
            "summary": summary,
            "landscape": serde_json::from_str::<serde_json::Value>(&landscape_to_json(&Landscape::Histogram(hist))).map_err(Error::from)?,
        }))?,
        Format::Table => {
            let mut text = format!(
                "{}\n|S| = {}  min = {}  max = {}  mode = {}  v_ge = {}\n\
                 at or better than v_ge: {} ({:.2}%)  strictly better: {:.2}%\n\n",
                args.spec,
                rational::to_display(&summary.size),
                rational::to_display(&summary.min),
                rational::to_display(&summary.max),
                rational::to_display(&summary.mode),
                rational::to_display(&summary.v_ge),
                rational::to_display(&summary.proportion_at_or_above_v_ge),
                100.0 * summary.proportion_at_or_above_v_ge_f64,
                100.0 * summary.proportion_above_v_ge_f64,
            );
            let mut table = Table::new(&["fitness", "count", "share"]);
            for v in hist.levels().rev() {
                let count = hist.count(v);
                table.row(vec![
                    rational::to_display(&hist.grid().to_original(v)),
                    rational::to_display(&count),
                    nsf_core::io::decimal(&(&count / hist.total())),
                ]);
            }
            text.push_str(&table.to_string());
            ctx.emit(&text)?;
        }
    }
    Ok(())
}

fn histogram_reports(hist: &FitnessHistogram) -> Vec<PropertyReport> {
    let mode = modal_fitness(hist);
    let ge = good_enough(hist);
    [
        check_cardinality_monotonic(hist, true),
        check_cardinality_monotonic(hist, false),
        check_lemma1(hist),
    ]
    .into_iter()
    .map(|mut r| {
        r.v_mode = Some(mode);
        r.v_ge = Some(ge);
        r
    })
    .collect()
}

fn analyze_cmd(ctx: &Ctx, args: &AnalyzeArgs) -> Outcome {
    let landscape = match (&args.spec, &args.landscape) {
        (Some(spec), _) => Landscape::Aggregate(
            with_problem!(spec.load()?, p => build_aggregate(&p, &ctx.enumeration))?,
        ),
        (None, Some(path)) => parse_landscape(&fs::read_to_string(path)?)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    if let (Some(path), Landscape::Aggregate(agg)) = (&args.save, &landscape) {
        write_file(path, &aggregate_to_json(agg))?;
    }
    let reports = match &landscape {
        Landscape::Aggregate(agg) => analyze(agg, &args.tolerance),
        Landscape::Histogram(hist) => histogram_reports(hist),
    };
    match ctx.format {
        Format::Json => ctx.json(&reports)?,
        Format::Csv | Format::Table => {
            let mut table = Table::new(&["property", "verdict", "v_mode", "v_ge", "witness"]);
            for r in &reports {
                table.row(vec![
                    r.property.to_string(),
                    r.verdict.to_string(),
                    r.v_mode.map(|v| v.to_string()).unwrap_or_default(),
                    r.v_ge.map(|v| v.to_string()).unwrap_or_default(),
                    r.witness
                        .as_ref()
                        .map(|w| w.to_string())
                        .unwrap_or_default(),
                ]);
            }
            ctx.emit(&if ctx.format == Format::Csv {
                table.to_csv()
            } else {
                table.to_string()
            })?;
        }
    }
    Ok(())
}

fn verify_theorem(ctx: &Ctx, args: &VerifyArgs) -> Outcome {
    let mut suites: Vec<Violation> = args.violation.iter().flatten().copied().collect();
    suites.dedup();
    let mut summaries = Vec::new();
    let mut files = Vec::new();
    for &violation in &suites {
        let cases = run_suite(args.first_seed, args.seeds, violation);
        for case in cases.iter().filter(|c| c.is_counterexample()) {
            let agg = case
                .landscape
                .as_ref()
                .expect("counterexamples carry their landscape");
            let path = args
                .counterexamples
                .join(format!("{}-seed-{}.json", violation, case.seed));
            write_file(&path, &aggregate_to_json(agg))?;
            files.push(path.display().to_string());
        }
        summaries.push(summarize(violation, &cases));
    }
    let counterexamples: usize = summaries.iter().map(|s| s.counterexamples).sum();
    match ctx.format {
        Format::Json => ctx.json(&json!({
            "suites": summaries,
            "counterexamples": counterexamples,
            "counterexample_files": files,
        }))?,
        Format::Csv | Format::Table => {
            let mut table = Table::new(&[
                "violation",
                "instances",
                "premises_held",
                "counterexamples",
                "conclusion_failures",
                "decomposition_mismatches",
                "infeasible",
            ]);
            for s in &summaries {
                table.row(vec![
                    s.violation.to_string(),
                    s.instances.to_string(),
                    s.premises_held.to_string(),
                    s.counterexamples.to_string(),
                    s.conclusion_failures.to_string(),
                    s.decomposition_mismatches.to_string(),
                    s.infeasible.to_string(),
                ]);
            }
            if ctx.format == Format::Csv {
                ctx.emit(&table.to_csv())?;
            } else {
                let mut text = table.to_string();
                text.push_str(&format!("\n{counterexamples} counterexamples\n"));
                for f in &files {
                    text.push_str(&format!("  {f}\n"));
                }
                ctx.emit(&text)?;
            }
        }
    }
    if counterexamples > 0 {
        return Err(Failure::Counterexample(counterexamples));
    }
    Ok(())
}

fn compare<P: ExplicitProblem>(ctx: &Ctx, args: &CompareArgs, problem: &P) -> Outcome {
    let config = SearchConfig {
        pivot: args.pivot,
        budget: args.budget,
        seed: args.seed,
        start: Start::Random,
    };
    let scale = nsf_core::problem::fitness_scale(problem, &ctx.enumeration);
    let plan = if args.all_levels {
        EstimatePlan {
            trials: args.trials,
            levels: None,
        }
    } else if args.levels.is_empty() {
        EstimatePlan::default()
    } else {
        EstimatePlan {
            trials: args.trials,
            levels: Some(
                args.levels
                    .iter()
                    .map(|f| scale.level_of(f))
                    .collect::<Result<_>>()?,
            ),
        }
    };
    let report = head_to_head(problem, &config, args.runs, &plan, &ctx.enumeration)?;
    if let Some(path) = &args.trace {
        write_file(path, &trace_csv(&report))?;
    }
    match ctx.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            let mut table = Table::new(&[
                "run",
                "hill_climb_best",
                "hill_climb_evals",
                "restarts",
                "random_best",
                "random_evals",
            ]);
            for r in &report.per_run {
                table.row(vec![
                    r.run.to_string(),
                    rational::to_display(&r.hill_climb_best),
                    r.hill_climb_evals.to_string(),
                    r.restarts.to_string(),
                    rational::to_display(&r.random_best),
                    r.random_evals.to_string(),
                ]);
            }
            ctx.emit(&table.to_csv())?;
        }
        Format::Table => {
            let mut methods = Table::new(&["method", "mean best", "worst", "best", "mean evals"]);
            for (name, m) in [
                ("hill climb", &report.hill_climb),
                ("random search", &report.random_search),
            ] {
                methods.row(vec![
                    name.into(),
                    format!("{:.4}", m.mean_best_f64),
                    rational::to_display(&m.worst_best),
                    rational::to_display(&m.best_best),
                    format!("{:.1}", m.mean_evals),
                ]);
            }
            let mut text = format!(
                "{}  pivot={:?} budget={} runs={} seed={}\n\n{}",
                args.spec, report.pivot, report.budget, report.runs, report.seed, methods
            );
            if !report.levels.is_empty() {
                let mut levels = Table::new(&[
                    "fitness",
                    "trials",
                    "pn+ est",
                    "se",
                    "pn+ exact",
                    "pair exp",
                    "p+ est",
                    "se",
                    "p+ exact",
                ]);
                for l in &report.levels {
                    levels.row(vec![
                        rational::to_display(&l.fitness),
                        l.trials.to_string(),
                        format!("{:.5}", l.pn_plus_hat),
                        format!("{:.5}", l.pn_plus_std_err),
                        rational::to_display(&l.pn_plus),
                        rational::to_display(&l.neighbour_pair_expectation),
                        format!("{:.5}", l.p_plus_hat),
                        format!("{:.5}", l.p_plus_std_err),
                        rational::to_display(&l.p_plus),
                    ]);
                }
                text.push('\n');
                text.push_str(&levels.to_string());
            }
            ctx.emit(&text)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        format: cli.format,
        out: cli.out,
        enumeration: EnumerationConfig::default()
            .with_budget(cli.max_size)
            .with_workers(cli.workers),
    };
    match &cli.command {
        Command::Census(args) => census(&ctx, args),
        Command::Analyze(args) => analyze_cmd(&ctx, args),
        Command::VerifyTheorem(args) => verify_theorem(&ctx, args),
        Command::Compare(args) => with_problem!(args.spec.load()?, p => compare(&ctx, args, &p)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Counterexample(n)) => {
            eprintln!("{n} theorem counterexamples");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => 3,
                _ => 2,
            })
        }
    }
}
