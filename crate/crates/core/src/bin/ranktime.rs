use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ranktime::harness::io::{records_to_csv, ModelSpec};
use ranktime::harness::{self, ExperimentConfig, Strategy};
use ranktime::recommend::{self, Solver, BORDA_APPROX_FACTOR};
use ranktime::{Error, PreferenceModel, Result, WeightFunction, DEFAULT_BRUTE_FORCE_CAP};

#[derive(Parser)]
#[command(name = "ranktime", version, about = "Recommend rankings that are quick to re-sort")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recommend an order for a preference model.
    Recommend(RecommendArgs),
    /// Run a simulated recommendation experiment and write poll records as CSV.
    Simulate(SimulateArgs),
    /// Print the pairwise marginal matrix of a model.
    Marginals(ModelArgs),
    /// Turn a profile into the Plackett-Luce mixture that encodes its Kemeny problem.
    HardInstance(HardArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Model description (TOML).
    #[arg(long, conflicts_with = "profile", required_unless_present = "profile")]
    model: Option<PathBuf>,
    /// Profile file; the model is the uniform distribution over it.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecommendArgs {
    #[command(flatten)]
    input: ModelArgs,
    #[arg(long, default_value = "brute")]
    solver: String,
    /// linear, affine:C,D or table:W1,W2,...
    #[arg(long, default_value = "linear")]
    weight: String,
    /// Monte Carlo samples for the expected time under a non-linear weight.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
    cap: usize,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's strategy.
    #[arg(long)]
    strategy: Option<String>,
    /// Also write per-poll averages to this CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct HardArgs {
    #[arg(long)]
    profile: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Recommend(a) => recommend_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Marginals(a) => marginals_cmd(a),
        Command::HardInstance(a) => hard_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io { path: path.clone(), source: e }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_input(args: &ModelArgs) -> Result<PreferenceModel> {
    match (&args.model, &args.profile) {
        (Some(path), _) => harness::load_model(path),
        (None, Some(path)) => PreferenceModel::uniform(harness::load_profile(path)?),
        (None, None) => Err(Error::InvalidInput("give --model or --profile".into())),
    }
}

fn recommend_cmd(args: RecommendArgs) -> Result<()> {
    let model = load_input(&args.input)?;
    let solver: Solver = args.solver.parse()?;
    let weight: WeightFunction = args.weight.parse()?;
    let (order, objective) = recommend::solve(&model, solver, args.cap)?;

    let mut text = String::new();
    let _ = writeln!(text, "solver: {solver}");
    let _ = writeln!(text, "order: {order}");
    let _ = writeln!(text, "expected_time_linear: {objective}");
    if !weight.is_linear() {
        let general = recommend::recommend_general_weights(&model, &weight, 0)?;
        let solver_factor = match solver {
            Solver::Borda | Solver::Local => BORDA_APPROX_FACTOR,
            Solver::Exact | Solver::BruteForce => 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let (est, se) = recommend::expected_time_mc(&order, &model, &weight, args.samples, &mut rng)?;
        let _ = writeln!(text, "weight: {weight}");
        let _ = writeln!(text, "alpha: {}", general.bounds.alpha);
        let _ = writeln!(text, "beta: {}", general.bounds.beta);
        let _ = writeln!(text, "guarantee: {}", general.bounds.factor() * solver_factor);
        let _ = writeln!(text, "expected_time_weighted: {est}");
        let _ = writeln!(text, "expected_time_weighted_stderr: {se}");
        let _ = writeln!(text, "samples: {}", args.samples);
        let _ = writeln!(text, "seed: {}", args.seed);
    }
    emit(args.input.out.as_ref(), &text)
}

fn simulate_cmd(args: SimulateArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(s) = &args.strategy {
        cfg.strategy = s.parse::<Strategy>()?;
    }
    let records = harness::run_experiment(&cfg)?;
    emit(Some(&args.out), &records_to_csv(&records)?)?;
    if let Some(path) = &args.summary {
        let mut text = String::from("poll,strategy,mean_time,mean_dkt,mean_moves\n");
        for s in harness::per_poll_averages(&records) {
            let _ = writeln!(text, "{},{},{},{},{}", s.poll, cfg.strategy, s.mean_time, s.mean_dkt, s.mean_moves);
        }
        emit(Some(path), &text)?;
    }
    Ok(())
}

fn marginals_cmd(args: ModelArgs) -> Result<()> {
    let model = load_input(&args)?;
    let mut text = String::new();
    for row in model.pairwise_marginals().rows() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(text, "{}", cells.join(","));
    }
    emit(args.out.as_ref(), &text)
}

fn hard_cmd(args: HardArgs) -> Result<()> {
    let profile = harness::load_profile(&args.profile)?;
    let model = harness::kemeny_hard_instance(&profile)?;
    emit(args.out.as_ref(), &ModelSpec::from_model(&model).to_toml()?)
}
