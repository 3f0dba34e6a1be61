//! `belllab` — enumeration, fine-tuning, entropy and simulation workflows
//! for N-setting-mechanism Bell scenario models.
//!
//! Subcommands: `count`, `enumerate`, `finetune`, `entropy`, `simulate`,
//! `check`, `make-model`. Reports are JSON on stdout unless `--out` is given;
//! files are written atomically (temp + rename). Every subcommand is
//! deterministic given its full argument list, seeds included.
//!
//! Exit codes: 0 success, 2 argument error, 3 budget refusal, 4 model-file
//! validation error. `BELLLAB_THREADS` caps internal parallelism.

use anyhow::{anyhow, Context as _};
use belllab::entropy::{self, SequencePrior};
use belllab::finetune::{self, DEFAULT_CONFIG_BUDGET};
use belllab::kernel::OutcomeKernel;
use belllab::modelfile;
use belllab::models::{CausalModel, ChoicePrior, SuperdetModel};
use belllab::montecarlo::{self, EmpiricalTable};
use belllab::scenario::{contexts_by_settings, SettingPair};
use belllab::simplex::{self, LatticeDistribution};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OTHER: u8 = 1;
const EXIT_ARG: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_MODEL: u8 = 4;

#[derive(Parser)]
#[command(name = "belllab", version, about = "Bell-scenario causal models: exact fine-tuning counts and sub-ensemble entropy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print V(Λ, L), the number of lattice points of the discretized simplex
    Count(CountArgs),
    /// List lattice configurations in canonical order, one per line
    Enumerate(EnumerateArgs),
    /// Compute the overhead fine-tuning parameter F
    Finetune(FinetuneArgs),
    /// Sub-ensemble sequence entropy, entropy drop and mutual information
    Entropy(EntropyArgs),
    /// Simulate runs from a model file; write CSV records and a summary
    Simulate(SimulateArgs),
    /// Run the constraint (m)/(n) and condition (ii) checkers on a model file
    Check(CheckArgs),
    /// Write a superdeterministic model file (constrained or demo)
    MakeModel(MakeModelArgs),
}

fn positive_u64() -> clap::builder::RangedU64ValueParser {
    clap::value_parser!(u64).range(1..)
}

#[derive(Args)]
struct CountArgs {
    /// Number of hidden-variable values Λ
    #[arg(long = "lambda", value_parser = positive_u64())]
    lambda: u64,
    /// Lattice denominator L
    #[arg(long = "l", value_parser = positive_u64())]
    l: u64,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long = "lambda", value_parser = positive_u64())]
    lambda: u64,
    #[arg(long = "l", value_parser = positive_u64())]
    l: u64,
    /// Stop after this many configurations
    #[arg(long)]
    limit: Option<u64>,
    /// Refuse enumerations larger than this many configurations
    #[arg(long, default_value_t = DEFAULT_CONFIG_BUDGET, value_parser = positive_u64())]
    budget: u64,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FinetuneArgs {
    /// constrained | general
    #[arg(long)]
    mode: String,
    #[arg(long = "n", value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long = "lambda", value_parser = positive_u64())]
    lambda: u64,
    #[arg(long = "l", value_parser = positive_u64())]
    l: u64,
    /// Kernel for general mode: injective | constant | readout | <file.json>
    #[arg(long, default_value = "injective")]
    kernel: String,
    #[arg(long, default_value_t = DEFAULT_CONFIG_BUDGET, value_parser = positive_u64())]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long = "n", value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Number of runs N₀
    #[arg(long = "n0", value_parser = positive_u64())]
    n0: u64,
    /// uniform | <file.json> with {"dense":[..]} or {"product":[[..],..]}
    #[arg(long, default_value = "uniform")]
    prior: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Model file (see `make-model`)
    #[arg(long)]
    model: PathBuf,
    /// Number of runs N₀
    #[arg(long = "n0", value_parser = positive_u64())]
    n0: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wing size N for retrocausal/nonlocal models (superdeterministic
    /// models fix it themselves)
    #[arg(long = "n", value_parser = clap::value_parser!(u32).range(1..))]
    n: Option<u32>,
    /// Run records CSV path
    #[arg(long)]
    out_csv: PathBuf,
    /// Summary JSON path (stdout if omitted)
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    /// Cap on reported condition-(ii) witness pairs
    #[arg(long, default_value_t = belllab::models::DEFAULT_WITNESS_CAP as u64, value_parser = positive_u64())]
    witness_cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MakeModelArgs {
    /// constrained | demo (demo plants one same-sector table difference)
    #[arg(long, default_value = "constrained")]
    class: String,
    #[arg(long = "n", value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long = "lambda", value_parser = positive_u64())]
    lambda: u64,
    #[arg(long = "l", value_parser = positive_u64())]
    l: u64,
    /// injective | constant | readout | <file.json>
    #[arg(long, default_value = "readout")]
    kernel: String,
    /// Four sector tables as numerators: "a,b,..;..;..;.." (spread over the
    /// simplex when omitted)
    #[arg(long)]
    tables: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

/// An error that already knows its exit code.
#[derive(Debug)]
struct CodedError {
    code: u8,
    inner: anyhow::Error,
}

impl fmt::Display for CodedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.inner)
    }
}

impl std::error::Error for CodedError {}

type CliResult<T> = Result<T, CodedError>;

fn arg_error(msg: impl Into<String>) -> CodedError {
    CodedError {
        code: EXIT_ARG,
        inner: anyhow!(msg.into()),
    }
}

fn classify(e: anyhow::Error) -> CodedError {
    let code = match e.downcast_ref::<belllab::Error>() {
        Some(belllab::Error::BudgetExceeded { .. }) => EXIT_BUDGET,
        Some(_) => EXIT_ARG,
        None => EXIT_OTHER,
    };
    CodedError { code, inner: e }
}

fn model_error(e: impl Into<anyhow::Error>) -> CodedError {
    CodedError {
        code: EXIT_MODEL,
        inner: e.into(),
    }
}

fn main() -> ExitCode {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ARG);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    match std::env::var("BELLLAB_THREADS") {
        Ok(v) => {
            let k: usize = v
                .parse()
                .map_err(|_| format!("BELLLAB_THREADS must be a positive integer, got '{v}'"))?;
            if k == 0 {
                return Err("BELLLAB_THREADS must be >= 1".into());
            }
            belllab::par::set_max_threads(k)
        }
        Err(_) => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Count(a) => cmd_count(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Finetune(a) => cmd_finetune(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Check(a) => cmd_check(a),
        Command::MakeModel(a) => cmd_make_model(a),
    }
}

fn cmd_count(a: CountArgs) -> CliResult<()> {
    let v = simplex::count_configurations(a.lambda as usize, a.l)
        .map_err(|e| classify(e.into()))?;
    println!("{v}");
    Ok(())
}

fn cmd_enumerate(a: EnumerateArgs) -> CliResult<()> {
    let lambda = a.lambda as usize;
    let total = match a.limit {
        Some(limit) => {
            simplex::count_configurations(lambda, a.l).map_err(|e| classify(e.into()))?;
            limit
        }
        None => simplex::count_within_budget(lambda, a.l, a.budget)
            .map_err(|e| classify(e.into()))?,
    };
    let mut out = String::new();
    for d in simplex::enumerate_configurations(lambda, a.l)
        .map_err(|e| classify(e.into()))?
        .take(total as usize)
    {
        let line: Vec<String> = d.numerators().iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    emit(&a.out, &out)
}

fn cmd_finetune(a: FinetuneArgs) -> CliResult<()> {
    let lambda = a.lambda as usize;
    let report = match a.mode.as_str() {
        "constrained" => finetune::f_constrained(a.n, lambda, a.l)
            .map_err(|e| classify(e.into()))?,
        "general" => {
            let kernel = build_kernel(&a.kernel, lambda)?;
            finetune::f_general(&kernel, a.n, lambda, a.l, a.budget)
                .map_err(|e| classify(e.into()))?
        }
        other => return Err(arg_error(format!("unknown mode '{other}' (constrained | general)"))),
    };
    let json = serde_json::to_string_pretty(&report.to_wire()).expect("report serialization");
    emit_line(&a.out, &json)
}

fn cmd_entropy(a: EntropyArgs) -> CliResult<()> {
    let prior = match a.prior.as_str() {
        "uniform" => SequencePrior::uniform(a.n, a.n0).map_err(|e| classify(e.into()))?,
        path => load_prior(Path::new(path), a.n, a.n0)?,
    };
    let report = entropy::entropy_report(&prior);
    let json = serde_json::to_string_pretty(&report).expect("report serialization");
    emit_line(&a.out, &json)
}

fn load_prior(path: &Path, n: u32, n0: u64) -> CliResult<SequencePrior> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading prior file {}", path.display()))
        .map_err(|e| CodedError {
            code: EXIT_ARG,
            inner: e,
        })?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| arg_error(format!("prior file is not JSON: {e}")))?;
    if let Some(dense) = v.get("dense") {
        let probs: Vec<f64> = serde_json::from_value(dense.clone())
            .map_err(|e| arg_error(format!("bad dense prior: {e}")))?;
        SequencePrior::dense(n, n0, probs).map_err(|e| classify(e.into()))
    } else if let Some(product) = v.get("product") {
        let per_run: Vec<Vec<f64>> = serde_json::from_value(product.clone())
            .map_err(|e| arg_error(format!("bad product prior: {e}")))?;
        if per_run.len() as u64 != n0 {
            return Err(arg_error(format!(
                "product prior has {} runs, --n0 is {n0}",
                per_run.len()
            )));
        }
        SequencePrior::product(n, per_run).map_err(|e| classify(e.into()))
    } else {
        Err(arg_error("prior file needs a \"dense\" or \"product\" key"))
    }
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let n = match (&model, a.n) {
        (CausalModel::Superdeterministic(m), Some(n)) if n != m.n() => {
            return Err(arg_error(format!(
                "--n {n} conflicts with the model's N={}",
                m.n()
            )));
        }
        (CausalModel::Superdeterministic(m), _) => m.n(),
        (_, Some(n)) => n,
        (_, None) => 2,
    };
    let prior = ChoicePrior::uniform(n);
    let runs =
        montecarlo::simulate(&model, a.n0, a.seed, &prior).map_err(|e| classify(e.into()))?;
    write_atomic(&a.out_csv, &montecarlo::runs_to_csv(&runs))?;

    let table = EmpiricalTable::from_runs(n, &runs).map_err(|e| classify(e.into()))?;
    let condition_ii = match &model {
        CausalModel::Superdeterministic(m) => Some(m.check_condition_ii().holds),
        _ => None,
    };
    let sectors_by_settings = contexts_by_settings(n).map_err(|e| classify(e.into()))?;
    let sectors: Vec<serde_json::Value> = SettingPair::ALL
        .iter()
        .map(|&pair| {
            let counts = table.sector_counts(pair);
            let visits = table.sector_visits(pair);
            let freq: Vec<f64> = counts
                .iter()
                .map(|&c| if visits > 0 { c as f64 / visits as f64 } else { 0.0 })
                .collect();
            // Sector-level analytic statistics exist whenever they are
            // context-independent: always for retrocausal/nonlocal models,
            // and for superdeterministic models satisfying condition (ii).
            let analytic: Option<Vec<f64>> = match &model {
                CausalModel::Superdeterministic(m) => {
                    if condition_ii == Some(true) {
                        let member = &sectors_by_settings[&pair][0];
                        Some(m.statistics(member).expect("dimension checked").to_f64().to_vec())
                    } else {
                        None
                    }
                }
                CausalModel::Retrocausal(m) => Some(m.statistics(pair).to_f64().to_vec()),
                CausalModel::Nonlocal(m) => Some(m.statistics(pair).to_f64().to_vec()),
            };
            json!({
                "MA": pair.0.as_char(),
                "MB": pair.1.as_char(),
                "visits": visits,
                "counts": counts,
                "freq": freq,
                "analytic": analytic,
            })
        })
        .collect();
    let coincidence = match &model {
        CausalModel::Superdeterministic(m) if m.check_constraint_m() => {
            let pairs = montecarlo::coincidence_pairs(&runs);
            Some(
                entropy::verify_coincidence(m, &pairs)
                    .map_err(|e| classify(e.into()))?
                    .consistent,
            )
        }
        _ => None,
    };
    let summary = json!({
        "class": model.class_name(),
        "N": n,
        "n_runs": a.n0,
        "seed": a.seed,
        "sectors": sectors,
        "condition_ii_analytic": condition_ii,
        "coincidence_consistent": coincidence,
    });
    emit_line(&a.out_json, &serde_json::to_string_pretty(&summary).expect("summary"))
}

fn cmd_check(a: CheckArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let report = match &model {
        CausalModel::Superdeterministic(m) => {
            let condition = m.check_condition_ii_with_cap(a.witness_cap as usize);
            let witnesses: Vec<serde_json::Value> = condition
                .witnesses
                .iter()
                .map(|(x, y)| json!([x, y]))
                .collect();
            json!({
                "class": model.class_name(),
                "constraint_m": m.check_constraint_m(),
                "constraint_n": m.check_constraint_n(),
                "condition_ii": {"holds": condition.holds, "witnesses": witnesses},
            })
        }
        _ => json!({
            "class": model.class_name(),
            "constraint_m": null,
            "constraint_n": null,
            "condition_ii": {"holds": true, "witnesses": []},
            "note": "statistics depend on the induced settings only; condition (ii) holds identically",
        }),
    };
    emit_line(&a.out, &serde_json::to_string_pretty(&report).expect("report"))
}

fn cmd_make_model(a: MakeModelArgs) -> CliResult<()> {
    let lambda = a.lambda as usize;
    let kernel = build_kernel(&a.kernel, lambda)?;
    let v = simplex::count_configurations(lambda, a.l).map_err(|e| classify(e.into()))?;
    use belllab::num_traits::ToPrimitive;
    let v = v
        .to_u64()
        .ok_or_else(|| arg_error("V(Λ, L) too large for table generation"))?;

    let sector_tables: [LatticeDistribution; 4] = match &a.tables {
        Some(spec) => parse_tables(spec, lambda, a.l)?,
        None => {
            // Spread the four sector tables across the simplex.
            std::array::from_fn(|k| {
                let rank = (k as u64 * (v - 1)) / 3;
                simplex::unrank(lambda, a.l, &rank.into()).expect("rank below V")
            })
        }
    };
    let mut model = SuperdetModel::make_constrained(a.n, kernel, sector_tables)
        .map_err(|e| classify(e.into()))?;

    match a.class.as_str() {
        "constrained" => {}
        "demo" => {
            if a.n < 2 {
                return Err(arg_error("demo models need --n >= 2 (two contexts per sector)"));
            }
            if v < 2 {
                return Err(arg_error("demo models need V(Λ, L) >= 2 (two distinct tables)"));
            }
            // Replant one context of the first sector with a different table,
            // breaking condition (ii) there.
            let sectors = contexts_by_settings(a.n).map_err(|e| classify(e.into()))?;
            let victim = sectors[&SettingPair::ALL[0]][0].clone();
            let mut tables = model.tables().to_vec();
            let current = &tables[victim.index() as usize];
            let rank = simplex::rank(current);
            use belllab::num_bigint::BigUint;
            let other = (rank + 1u32) % BigUint::from(v);
            tables[victim.index() as usize] =
                simplex::unrank(lambda, a.l, &other).expect("rank below V");
            model = SuperdetModel::new(a.n, model.kernel().clone(), tables)
                .map_err(|e| classify(e.into()))?;
        }
        other => {
            return Err(arg_error(format!(
                "unknown class '{other}' (constrained | demo)"
            )))
        }
    }
    let json = modelfile::to_json(&CausalModel::Superdeterministic(model));
    write_atomic(&a.out, &json)
}

fn parse_tables(spec: &str, lambda: usize, l: u64) -> CliResult<[LatticeDistribution; 4]> {
    let parts: Vec<&str> = spec.split(';').collect();
    if parts.len() != 4 {
        return Err(arg_error(format!(
            "--tables needs 4 ';'-separated tables, got {}",
            parts.len()
        )));
    }
    let mut tables = Vec::with_capacity(4);
    for part in parts {
        let numerators: Vec<u64> = part
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|e| arg_error(format!("bad table '{part}': {e}")))?;
        if numerators.len() != lambda {
            return Err(arg_error(format!(
                "table '{part}' has {} entries, expected Λ={lambda}",
                numerators.len()
            )));
        }
        tables.push(LatticeDistribution::new(numerators, l).map_err(|e| classify(e.into()))?);
    }
    Ok(tables.try_into().expect("length checked"))
}

fn build_kernel(spec: &str, lambda_count: usize) -> CliResult<OutcomeKernel> {
    match spec {
        "injective" => OutcomeKernel::injective(lambda_count)
            .map_err(|_| arg_error("injective kernel needs --lambda between 1 and 4")),
        "constant" => OutcomeKernel::constant(lambda_count).map_err(|e| classify(e.into())),
        "readout" => {
            if lambda_count != 4 {
                return Err(arg_error("the readout kernel fixes --lambda 4"));
            }
            Ok(OutcomeKernel::readout())
        }
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading kernel file {path}"))
                .map_err(model_error)?;
            let kernel = OutcomeKernel::from_json(&text).map_err(model_error)?;
            if kernel.lambda_count() != lambda_count {
                return Err(model_error(anyhow!(
                    "kernel file has lambda_count={}, --lambda is {lambda_count}",
                    kernel.lambda_count()
                )));
            }
            Ok(kernel)
        }
    }
}

fn load_model(path: &Path) -> CliResult<CausalModel> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading model file {}", path.display()))
        .map_err(model_error)?;
    modelfile::from_json(&text).map_err(model_error)
}

/// Report output: file (atomic) or stdout.
fn emit_line(out: &Option<PathBuf>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut with_newline = content.to_string();
            with_newline.push('\n');
            write_atomic(path, &with_newline)
        }
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let io = || -> anyhow::Result<()> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .with_context(|| format!("creating temp file in {}", dir.display()))?;
        tmp.write_all(content.as_bytes())?;
        tmp.persist(path)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    };
    io().map_err(|e| CodedError {
        code: EXIT_OTHER,
        inner: e,
    })
}
