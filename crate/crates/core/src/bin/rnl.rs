use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use radnorm::bounds::{bound_profile, BoundConfig, ModeChoice, DEFAULT_BUDGET_CAP, DEFAULT_EXACT_THRESHOLD, DEFAULT_NODE_BUDGET, DEFAULT_RESTARTS};
use radnorm::error::{Error, Result};
use radnorm::families;
use radnorm::graph::GraphView;
use radnorm::matrix::{read_input, MatrixInput, WeightMatrix};
use radnorm::oracles;
use radnorm::report::{run_scenario, Scenario, VerifyOptions, DEFAULT_SAMPLES};
use radnorm::sampler::{self, Mode, CSV_HEADER};

#[derive(Parser)]
#[command(name = "rnl", version, about = "Norm bounds and Monte Carlo estimates for weighted Rademacher matrices")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "RNL_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound profile of a square matrix.
    Profile(ProfileArgs),
    /// Monte Carlo estimate of the expected norm.
    Mc(McArgs),
    /// Generate a family instance.
    Family(FamilyArgs),
    /// Run a verification scenario.
    Verify(VerifyArgs),
    /// Brute-force oracles for tiny inputs.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
}

#[derive(Args)]
struct BoundArgs {
    /// Estimator for R(p).
    #[arg(long = "r-mode", value_enum, default_value = "auto")]
    r_mode: RModeArg,
    #[arg(long, default_value_t = DEFAULT_BUDGET_CAP)]
    budget_cap: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    #[arg(long, default_value_t = DEFAULT_EXACT_THRESHOLD)]
    exact_threshold: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    /// Upper constant of the heuristic bracket (at least 1).
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RModeArg {
    Auto,
    Exact01,
    Heuristic,
}

impl BoundArgs {
    fn config(&self, seed: u64) -> BoundConfig {
        BoundConfig {
            mode: match self.r_mode {
                RModeArg::Auto => ModeChoice::Auto,
                RModeArg::Exact01 => ModeChoice::Exact01,
                RModeArg::Heuristic => ModeChoice::Heuristic,
            },
            budget_cap: self.budget_cap,
            node_budget: self.node_budget,
            exact_threshold: self.exact_threshold,
            restarts: self.restarts,
            seed,
            c0: self.c0,
        }
    }
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    bounds: BoundArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "rademacher_iid")]
    mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Moment orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// First CSV column; defaults to the input file stem.
    #[arg(long)]
    id: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyName {
    UnionComplete,
    RandomRegular,
    LargeGirth,
    OneCycleNeighborhood,
    BlockPlusSingletons,
    Circulant,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Girth target.
    #[arg(long)]
    g: Option<usize>,
    /// Neighbourhood radius.
    #[arg(long)]
    r: Option<usize>,
    /// Circulant coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    scenario: Scenario,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    n: Option<usize>,
    /// Degree grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long)]
    girth: Option<usize>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Vec<f64>,
    #[command(flatten)]
    bounds: BoundArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Largest sign-bilinear form of a matrix.
    SignBilinear {
        #[arg(long)]
        input: PathBuf,
    },
    /// Normalized maximum over index-set pairs of a realized matrix.
    X {
        #[arg(long)]
        input: PathBuf,
    },
    /// Connected vertex sets through a vertex (1-based).
    Connected {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Greedy neighbourhood cover (1-based vertices).
    GreedyCover {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        i_pool: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        j_pool: Vec<usize>,
        #[arg(long)]
        threshold: usize,
    },
    /// Largest norm of at most p edges, by enumeration.
    SubgraphNorm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: usize,
    },
    /// Exact expected norm over all sign patterns.
    ExactMean {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "rademacher_iid")]
        mode: Mode,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_json(out: Option<&PathBuf>, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn need(name: &str, v: Option<usize>) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidArgument(format!("--{name} is required for this family")))
}

fn graph_of(input: &Path) -> Result<GraphView> {
    match read_input(input)? {
        MatrixInput::Edges(e) => GraphView::from_edges(e.n(), e.pairs()),
        MatrixInput::Weights(w) => radnorm::graph::derive_graph(&w),
    }
}

fn to_zero_based(v: &[usize]) -> Result<Vec<usize>> {
    v.iter()
        .map(|&x| x.checked_sub(1).ok_or_else(|| Error::InvalidArgument("vertices are 1-based".into())))
        .collect()
}

fn matrix(input: &Path) -> Result<WeightMatrix> {
    Ok(read_input(input)?.into_matrix())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Profile(args) => {
            let a = matrix(&args.input)?;
            let profile = bound_profile(&a, &args.bounds.config(args.seed))?;
            emit_json(args.out.as_ref(), &profile)
        }
        Command::Mc(args) => {
            let a = matrix(&args.input)?;
            let est = if args.p.is_empty() {
                sampler::mc_norm(&a, args.mode, args.samples, args.seed)?
            } else {
                sampler::mc_norm_moments_with(&a, args.mode, &args.p, args.samples, args.seed)?
            };
            match args.format {
                Format::Json => emit_json(args.out.as_ref(), &est),
                Format::Csv => {
                    let id = args
                        .id
                        .clone()
                        .unwrap_or_else(|| args.input.file_stem().map_or("matrix".into(), |s| s.to_string_lossy().into_owned()));
                    emit(args.out.as_ref(), &format!("{CSV_HEADER}\n{}\n", est.csv_row(&id)))
                }
            }
        }
        Command::Family(args) => {
            let inst = match args.family {
                FamilyName::UnionComplete => families::union_complete(need("m", args.m)?, need("d", args.d)?)?,
                FamilyName::RandomRegular => families::random_regular(need("n", args.n)?, need("d", args.d)?, args.seed)?,
                FamilyName::LargeGirth => families::large_girth_instance(need("n", args.n)?, need("d", args.d)?, need("g", args.g)?, args.seed)?,
                FamilyName::OneCycleNeighborhood => {
                    families::one_cycle_neighborhood_instance(need("n", args.n)?, need("d", args.d)?, need("r", args.r)?, args.seed)?
                }
                FamilyName::BlockPlusSingletons => families::block_plus_singletons(need("n", args.n)?, need("d", args.d)?)?,
                FamilyName::Circulant => families::circulant(&args.b)?,
            };
            emit_json(args.out.as_ref(), &inst.to_json())
        }
        Command::Verify(args) => {
            let opts = VerifyOptions {
                samples: args.samples,
                seed: args.seed,
                n: args.n,
                degrees: (!args.d.is_empty()).then(|| args.d.clone()),
                girth: args.girth,
                radius: args.radius,
                b: (!args.b.is_empty()).then(|| args.b.clone()),
                bounds: args.bounds.config(args.seed),
            };
            let report = run_scenario(args.scenario, &opts)?;
            emit_json(args.out.as_ref(), &report)
        }
        Command::Oracle { which } => {
            let value: Value = match which {
                OracleCommand::SignBilinear { input } => serde_json::to_value(oracles::sign_bilinear_max(&matrix(&input)?)?)?,
                OracleCommand::X { input } => json!({ "x": oracles::x_quantity(&matrix(&input)?)? }),
                OracleCommand::Connected { input, v, k, r } => {
                    let g = graph_of(&input)?;
                    let v = to_zero_based(&[v])?[0];
                    let sets = oracles::enumerate_connected(&g, v, k, r)?;
                    let sets: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().map(|x| x + 1).collect()).collect();
                    json!({ "count": sets.len(), "sets": sets })
                }
                OracleCommand::GreedyCover { input, i_pool, j_pool, threshold } => {
                    let g = graph_of(&input)?;
                    // an omitted pool means every vertex
                    let pool = |p: &[usize]| -> Result<Vec<usize>> {
                        if p.is_empty() {
                            Ok((0..g.n()).collect())
                        } else {
                            to_zero_based(p)
                        }
                    };
                    let (picked, counts) = oracles::greedy_cover(&g, &pool(&i_pool)?, &pool(&j_pool)?, threshold)?;
                    let picked: Vec<usize> = picked.into_iter().map(|x| x + 1).collect();
                    json!({ "picked": picked, "counts": counts })
                }
                OracleCommand::SubgraphNorm { input, p } => {
                    let e = match read_input(&input)? {
                        MatrixInput::Edges(e) => e,
                        MatrixInput::Weights(w) => radnorm::matrix::EdgeSet::from_matrix(&w)?,
                    };
                    json!({ "p": p, "value": oracles::subgraph_norm_enum(&e, p)? })
                }
                OracleCommand::ExactMean { input, mode } => {
                    json!({ "mode": mode, "mean": sampler::exact_small_norm_expectation(&matrix(&input)?, mode)? })
                }
            };
            emit_json(None, &value)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("rnl: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("rnl: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rnl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
