//! `mrd` — relative divergence of grading functions on finite posets, and
//! closed-form maximum-divergence solvers, as a scriptable command line.
//!
//! Reports are JSON on standard output (opt into tables with `--human`),
//! errors go to standard error, and the exit code taxonomy is stable:
//! 0 success, 2 invalid input, 3 undefined divergence, 4 enumeration cap
//! exceeded, 5 oracle verification failure.

mod report;
mod verify;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use mrd_core::apps::{
    group_test_null, group_test_partition_costs, group_test_update, infer_type_distribution,
    queue_divergence,
};
use mrd_core::divergence::{rd_chain, rd_even_sided_capped, rd_partition, PartitionModel, RdResult};
use mrd_core::grading::{increments_along, natural_gf, validate_grading, IncrementSequence};
use mrd_core::io::{
    complete_knots, grading_values_from_json, plan_from_json, poset_from_json,
    queue_model_from_json,
};
use mrd_core::poset::{bundle_poset, Chain, ChainBundle, Poset, DEFAULT_CHAIN_CAP};
use mrd_core::solve::{
    solve_cardinality_dependent, solve_conditional, solve_height_dependent, solve_independence,
    solve_interpolation, solve_type_distribution, solve_uniform, KnotConstraints,
    PiecewiseLinearGF, QueueTypeParams, TypeParams,
};
use mrd_core::Error as CoreError;

use report::{InputDigest, RunReport};

/// Environment variable overriding the maximal-chain enumeration cap.
const CAP_ENV_VAR: &str = "MRDP_MAX_CHAINS";

#[derive(Debug)]
enum CliError {
    Core(CoreError),
    Io(PathBuf, std::io::Error),
    Input(String),
    /// An infimum poisoned by a chain with a positive F-increment over a
    /// zero G-increment.
    UndefinedDivergence,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "cannot read {}: {e}", path.display()),
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::UndefinedDivergence => write!(
                f,
                "relative divergence undefined: a maximal chain has a positive F-increment over a zero G-increment"
            ),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

pub(crate) type CliResult<T> = Result<T, CliError>;

fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::UndefinedDivergence | CliError::Core(CoreError::DivergenceUndefined { .. }) => 3,
        CliError::Core(
            CoreError::ChainCapExceeded { .. } | CoreError::ElementCapExceeded { .. },
        ) => 4,
        _ => 2,
    }
}

#[derive(Parser)]
#[command(
    name = "mrd",
    version,
    about = "Relative divergence on finite posets: evaluation, closed-form maximizers, applications"
)]
struct Cli {
    /// Print a key/value table instead of the JSON report.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate relative divergence.
    #[command(subcommand)]
    Rd(RdCommand),
    /// Solve maximum relative divergence problems in closed form.
    #[command(subcommand)]
    Mrdp(MrdpCommand),
    /// Application drivers.
    #[command(subcommand)]
    Apps(AppsCommand),
}

#[derive(Subcommand)]
enum RdCommand {
    /// Divergence of two increment sequences along a single chain.
    Chain {
        /// Increments of F, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        f: Vec<f64>,
        /// Increments of the null G, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        g: Vec<f64>,
    },
    /// Infimum of the chain divergence over all maximal chains of an
    /// even-sided [l-g] poset.
    Poset {
        /// Poset document (explicit Hasse diagram, powerset, or bundle).
        #[arg(long)]
        poset: PathBuf,
        /// Grading-function document for F.
        #[arg(long)]
        gf: PathBuf,
        /// Grading-function document for the null G; defaults to the
        /// natural grading.
        #[arg(long)]
        null: Option<PathBuf>,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Partition-induced divergence from block weights.
    Partition {
        #[arg(long, value_delimiter = ',', required = true)]
        f: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        g: Vec<f64>,
    },
    /// Divergence on the bundle poset of the given chain dimensions.
    Bundle {
        /// Component chain edge counts, e.g. 2,3.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        gf: PathBuf,
        #[arg(long)]
        null: Option<PathBuf>,
        #[command(flatten)]
        sample: SampleArgs,
    },
}

#[derive(Args)]
struct SampleArgs {
    /// Approximate the infimum from this many randomly sampled maximal
    /// chains instead of exhaustive enumeration.
    #[arg(long)]
    sample: Option<usize>,
    /// Seed for `--sample`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum MrdpCommand {
    /// Unconstrained entropy maximization over n outcomes.
    Uniform {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Piecewise-linear maximizer through fixed knots on the chain {0..n}.
    Interpolate {
        #[arg(long)]
        n: usize,
        /// Knots as position=value pairs, e.g. 0=0,2=0.5,6=1.
        #[arg(long)]
        knots: String,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Conditional-probability maximizer for a three-element chain.
    Conditional {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Independence maximizer for the two-event poset.
    Independence {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Cardinality-dependent maximizer on a power set.
    Cardinality {
        /// Ground set size.
        #[arg(long)]
        n: usize,
        /// Value at the full set.
        #[arg(long = "M")]
        budget: f64,
        /// Optional interior knots as position=value pairs.
        #[arg(long)]
        knots: Option<String>,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Height-linear maximizer on a chain bundle.
    BundleHeight {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Value at the bottom element.
        #[arg(long = "m")]
        low: f64,
        /// Value at the top element.
        #[arg(long = "M")]
        high: f64,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Least-presuming type distribution from per-type divergences and spans.
    TypeDistribution {
        /// Per-type divergences D_k, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<f64>,
        /// Per-type spans M_k − m_k, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        spans: Vec<f64>,
        #[command(flatten)]
        verify: VerifyArgs,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Cross-check the solution against the matching brute-force oracle;
    /// disagreement beyond tolerance exits 5.
    #[arg(long)]
    verify: bool,
    /// Oracle grid resolution override.
    #[arg(long)]
    resolution: Option<f64>,
}

#[derive(Subcommand)]
enum AppsCommand {
    /// Group-testing cost model: build, update with fixed costs, and cost a
    /// partition.
    GroupTest {
        /// Plan document; alternative to --N/--M.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Population size.
        #[arg(long = "N")]
        population: Option<usize>,
        /// Budget: cost of testing everyone at once.
        #[arg(long = "M")]
        budget: Option<f64>,
        /// Fixed group costs as size=cost pairs, e.g. 5=4.
        #[arg(long)]
        fix: Option<String>,
        /// Group sizes to cost, comma separated.
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
    },
    /// Least-presuming server-type distribution for a bundle of queues.
    QueueTypes {
        /// Queue model document.
        #[arg(long)]
        model: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut digest = InputDigest::new();
    match run(&cli.command, &mut digest) {
        Ok(mut report) => {
            let verify_failed = report.verify.as_ref().is_some_and(|v| !v.pass);
            if verify_failed {
                // the result is withheld so that its presence always means
                // a clean exit
                report.result = None;
                report
                    .warnings
                    .push("verification failed: solver and oracle disagree beyond tolerance".into());
            }
            if cli.human {
                println!("{}", report.to_human());
            } else {
                println!("{}", report.to_json());
            }
            if verify_failed {
                eprintln!("error: oracle verification failed");
                ExitCode::from(5)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(command: &Command, digest: &mut InputDigest) -> CliResult<RunReport> {
    match command {
        Command::Rd(rd) => run_rd(rd, digest),
        Command::Mrdp(mrdp) => run_mrdp(mrdp, digest),
        Command::Apps(apps) => run_apps(apps, digest),
    }
}

fn read_input(path: &Path, digest: &mut InputDigest) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(path.to_owned(), e))?;
    digest.absorb(&bytes);
    String::from_utf8(bytes).map_err(|e| CliError::Input(format!(
        "{} is not UTF-8: {e}",
        path.display()
    )))
}

fn chain_cap() -> CliResult<usize> {
    match std::env::var(CAP_ENV_VAR) {
        Ok(raw) => raw.parse().map_err(|_| {
            CliError::Input(format!("{CAP_ENV_VAR} must be a positive integer, got `{raw}`"))
        }),
        Err(_) => Ok(DEFAULT_CHAIN_CAP),
    }
}

/// Parse "key=value,key=value" pairs with integer keys and float values.
fn parse_pairs(text: &str, what: &str) -> CliResult<Vec<(usize, f64)>> {
    text.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            let (pos, value) = part.split_once('=').ok_or_else(|| {
                CliError::Input(format!("{what} `{part}` is not a position=value pair"))
            })?;
            let pos = pos.trim().parse().map_err(|_| {
                CliError::Input(format!("{what} position `{pos}` is not an integer"))
            })?;
            let value = value.trim().parse().map_err(|_| {
                CliError::Input(format!("{what} value `{value}` is not a number"))
            })?;
            Ok((pos, value))
        })
        .collect()
}

fn rd_result_json(result: &RdResult, approximate: bool, sampled: Option<usize>) -> serde_json::Value {
    let mut out = json!({
        "value": result.value,
        "approximate": approximate,
    });
    if let Some(witness) = &result.witness_chain {
        out["witness_chain"] = json!(witness.path());
    }
    if let Some(count) = sampled {
        out["sampled_chains"] = json!(count);
    }
    out
}

fn load_gradings(
    poset: &Poset,
    gf_path: &Path,
    null_path: Option<&Path>,
    digest: &mut InputDigest,
) -> CliResult<(mrd_core::GradingFunction, mrd_core::GradingFunction)> {
    let values = grading_values_from_json(&read_input(gf_path, digest)?)?;
    let f = validate_grading(poset, &values, false)?;
    let g = match null_path {
        Some(path) => {
            let null_values = grading_values_from_json(&read_input(path, digest)?)?;
            validate_grading(poset, &null_values, false)?
        }
        None => natural_gf(poset)?,
    };
    Ok((f, g))
}

fn rd_on_poset(
    command_name: &str,
    poset: &Poset,
    gf_path: &Path,
    null_path: Option<&Path>,
    sample: &SampleArgs,
    digest: &mut InputDigest,
) -> CliResult<RunReport> {
    let (f, g) = load_gradings(poset, gf_path, null_path, digest)?;
    let cap = chain_cap()?;
    let (result, approximate, warnings) = match sample.sample {
        None => {
            let result = rd_even_sided_capped(poset, &f, &g, cap)?;
            (result, false, Vec::new())
        }
        Some(count) => {
            let result = sampled_infimum(poset, &f, &g, count, sample.seed)?;
            let warning = format!(
                "approximate: infimum taken over {count} sampled maximal chains; \
                 the true infimum may be lower"
            );
            (result, true, vec![warning])
        }
    };
    if result.undefined {
        return Err(CliError::UndefinedDivergence);
    }
    let mut report = RunReport::new(
        command_name,
        digest,
        rd_result_json(&result, approximate, sample.sample),
    );
    report.warnings = warnings;
    Ok(report)
}

/// Random maximal chains of an even-sided [l-g] poset: walk upward from the
/// lowest element, choosing uniformly among upper covers.
fn sampled_infimum(
    poset: &Poset,
    f: &mrd_core::GradingFunction,
    g: &mrd_core::GradingFunction,
    count: usize,
    seed: u64,
) -> CliResult<RdResult> {
    if count == 0 {
        return Err(CliError::Input("--sample needs at least one chain".into()));
    }
    if !poset.classify().is_even_sided {
        return Err(CliError::Core(CoreError::NotEvenSided(
            "the chain infimum is defined only when all maximal chains have equal edge counts",
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lowest = poset.minimal_elements()[0].clone();
    let mut best: Option<(f64, Chain)> = None;
    for _ in 0..count {
        let mut path = vec![lowest.clone()];
        loop {
            let ups = poset
                .upper_covers(path.last().expect("path non-empty"))
                .expect("element in poset");
            if ups.is_empty() {
                break;
            }
            let next = ups[rng.random_range(0..ups.len())].clone();
            path.push(next);
        }
        let chain = Chain::new(poset, path)?;
        let value = match increments_along(&chain, f, g) {
            Ok(inc) => rd_chain(&inc),
            Err(CoreError::DivergenceUndefined { .. }) => return Ok(RdResult::undefined()),
            Err(other) => return Err(other.into()),
        };
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, chain));
        }
    }
    let (value, witness) = best.expect("at least one sample");
    Ok(RdResult {
        value,
        witness_chain: (count >= 2).then_some(witness),
        undefined: false,
    })
}

fn run_rd(command: &RdCommand, digest: &mut InputDigest) -> CliResult<RunReport> {
    match command {
        RdCommand::Chain { f, g } => {
            let inc = IncrementSequence::new(f.clone(), g.clone())?;
            let value = rd_chain(&inc);
            Ok(RunReport::new(
                "rd chain",
                digest,
                json!({ "value": value, "steps": inc.len() }),
            ))
        }
        RdCommand::Poset {
            poset,
            gf,
            null,
            sample,
        } => {
            let parsed = poset_from_json(&read_input(poset, digest)?)?;
            rd_on_poset("rd poset", &parsed, gf, null.as_deref(), sample, digest)
        }
        RdCommand::Partition { f, g } => {
            let model = PartitionModel::from_weights(f.clone(), g.clone())?;
            let value = rd_partition(&model);
            Ok(RunReport::new(
                "rd partition",
                digest,
                json!({ "value": value, "blocks": model.block_count() }),
            ))
        }
        RdCommand::Bundle {
            dims,
            gf,
            null,
            sample,
        } => {
            let bundle = ChainBundle::new(dims.clone())?;
            let poset = bundle_poset(&bundle)?;
            rd_on_poset("rd bundle", &poset, gf, null.as_deref(), sample, digest)
        }
    }
}

fn piecewise_json(solution: &PiecewiseLinearGF) -> serde_json::Value {
    json!({
        "knots": solution.knots(),
        "segments": solution.segments(),
        "attained_rd": solution.attained_rd(),
    })
}

fn run_mrdp(command: &MrdpCommand, digest: &mut InputDigest) -> CliResult<RunReport> {
    match command {
        MrdpCommand::Uniform { n, verify } => {
            let solution = solve_uniform(*n)?;
            let mut report = RunReport::new(
                "mrdp uniform",
                digest,
                json!({ "p": solution.p, "entropy": solution.entropy }),
            );
            if verify.verify {
                report.verify = Some(verify::verify_uniform(&solution, verify.resolution)?);
            }
            Ok(report)
        }
        MrdpCommand::Interpolate { n, knots, verify } => {
            let constraints = KnotConstraints::new(parse_pairs(knots, "knot")?)?;
            let solution = solve_interpolation(*n, &constraints)?;
            let mut report = RunReport::new("mrdp interpolate", digest, piecewise_json(&solution));
            if verify.verify {
                report.verify = Some(verify::verify_interpolation(
                    *n,
                    &constraints,
                    &solution,
                    verify.resolution,
                )?);
            }
            Ok(report)
        }
        MrdpCommand::Conditional { p1, p2, verify } => {
            let solution = solve_conditional(*p1, *p2)?;
            let mut report = RunReport::new(
                "mrdp conditional",
                digest,
                json!({ "x_star": solution.x_star, "value": solution.value }),
            );
            if verify.verify {
                report.verify = Some(verify::verify_conditional(*p1, *p2, &solution)?);
            }
            Ok(report)
        }
        MrdpCommand::Independence { p1, p2, verify } => {
            let solution = solve_independence(*p1, *p2)?;
            let mut report = RunReport::new(
                "mrdp independence",
                digest,
                json!({
                    "x_star": solution.x_star,
                    "value": solution.value,
                    "feasible_interval": [solution.lower, solution.upper],
                    "second_derivative": solution.second_derivative,
                }),
            );
            if verify.verify {
                report.verify = Some(verify::verify_independence(*p1, *p2, &solution)?);
            }
            Ok(report)
        }
        MrdpCommand::Cardinality {
            n,
            budget,
            knots,
            verify,
        } => {
            let constraints = match knots {
                Some(text) => Some(complete_knots(parse_pairs(text, "knot")?, *n, *budget)?),
                None => None,
            };
            let solution = solve_cardinality_dependent(*n, *budget, constraints.as_ref())?;
            let mut report = RunReport::new("mrdp cardinality", digest, piecewise_json(&solution));
            if verify.verify {
                let effective = match constraints {
                    Some(c) => c,
                    None => KnotConstraints::new(vec![(0, 0.0), (*n, *budget)])?,
                };
                report.verify = Some(verify::verify_interpolation(
                    *n,
                    &effective,
                    &solution,
                    verify.resolution,
                )?);
            }
            Ok(report)
        }
        MrdpCommand::BundleHeight {
            dims,
            low,
            high,
            verify,
        } => {
            let bundle = ChainBundle::new(dims.clone())?;
            let solution = solve_height_dependent(&bundle, *low, *high)?;
            let mut result = json!({
                "dims": dims,
                "m": low,
                "M": high,
                "max_rd": solution.max_rd,
            });
            let mut warnings = Vec::new();
            if solution.poset.len() <= 4096 {
                result["values"] = serde_json::to_value(solution.gf.values())
                    .expect("grading serializes");
            } else {
                warnings.push(format!(
                    "values omitted: the bundle has {} elements",
                    solution.poset.len()
                ));
            }
            let mut report = RunReport::new("mrdp bundle-height", digest, result);
            report.warnings = warnings;
            if verify.verify {
                report.verify = Some(verify::verify_height(&solution, chain_cap()?)?);
            }
            Ok(report)
        }
        MrdpCommand::TypeDistribution { d, spans, verify } => {
            if d.len() != spans.len() {
                return Err(CliError::Input(format!(
                    "{} divergences but {} spans",
                    d.len(),
                    spans.len()
                )));
            }
            let params = QueueTypeParams::new(
                d.iter()
                    .zip(spans)
                    .map(|(&divergence, &span)| TypeParams { divergence, span })
                    .collect(),
            )?;
            let solution = solve_type_distribution(&params)?;
            let mut report = RunReport::new(
                "mrdp type-distribution",
                digest,
                json!({
                    "p": solution.p(),
                    "lambda": solution.lambda(),
                    "objective": solution.objective(),
                }),
            );
            if verify.verify {
                report.verify = Some(verify::verify_type_distribution(
                    &params,
                    &solution,
                    verify.resolution,
                )?);
            }
            Ok(report)
        }
    }
}

fn run_apps(command: &AppsCommand, digest: &mut InputDigest) -> CliResult<RunReport> {
    match command {
        AppsCommand::GroupTest {
            plan,
            population,
            budget,
            fix,
            partition,
        } => {
            let mut current = match (plan, population, budget) {
                (Some(path), None, None) => plan_from_json(&read_input(path, digest)?)?,
                (None, Some(n), Some(m)) => group_test_null(*n, *m)?,
                _ => {
                    return Err(CliError::Input(
                        "provide either --plan or both --N and --M".into(),
                    ))
                }
            };
            if let Some(text) = fix {
                let knots = complete_knots(
                    parse_pairs(text, "fixed cost")?,
                    current.population(),
                    current.budget(),
                )?;
                current = group_test_update(&current, &knots)?;
            }
            let partition_sizes: Option<Vec<usize>> = partition
                .clone()
                .or_else(|| current.partition().map(<[usize]>::to_vec));
            let mut result = json!({
                "population": current.population(),
                "budget": current.budget(),
                "cost_model": piecewise_json(current.cost_fn()),
                "updates": current.history().len(),
            });
            if let Some(sizes) = partition_sizes {
                let costs = group_test_partition_costs(&current, &sizes)?;
                result["partition_report"] =
                    serde_json::to_value(&costs).expect("report serializes");
            }
            Ok(RunReport::new("apps group-test", digest, result))
        }
        AppsCommand::QueueTypes { model } => {
            let parsed = queue_model_from_json(&read_input(model, digest)?)?;
            let distribution = infer_type_distribution(&parsed)?;
            let per_queue: Vec<serde_json::Value> = parsed
                .queues()
                .iter()
                .map(|q| {
                    json!({
                        "capacity": q.capacity(),
                        "span": q.span(),
                        "divergence": queue_divergence(q).expect("validated queue"),
                    })
                })
                .collect();
            Ok(RunReport::new(
                "apps queue-types",
                digest,
                json!({
                    "p": distribution.p(),
                    "lambda": distribution.lambda(),
                    "objective": distribution.objective(),
                    "per_queue": per_queue,
                }),
            ))
        }
    }
}
