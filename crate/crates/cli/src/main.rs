//! `ecl` — approximate equilibria for linear congestion games from the
//! command line: bound tables, instance generation, equilibrium
//! verification, solvers, cost ratios, and the one-shot reproduction report.
//!
//! Exit codes: 0 success, 1 a requested check failed (a profile is not an
//! `eps`-equilibrium, a bundle does not verify, a reproduction row fails),
//! 2 bad usage or malformed input files.

// NaN must fail the domain guards, hence the `!(x >= 0.0)` comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ecl_core::atomic::solvers::{
    brute_force_with, epsilon_best_response, potential_descent, DynamicsTrace, MoveRule,
    DEFAULT_ENUMERATION_CAP, DEFAULT_MAX_STEPS,
};
use ecl_core::atomic::Profile;
use ecl_core::instances::{self, AssignmentForm, GameForm, InstanceBundle};
use ecl_core::network::{Graph, DEFAULT_PATH_CAP};
use ecl_core::nonatomic::solvers::{minimize, Objective, SolveOptions};
use ecl_core::report::{self, rounded_json, Family, DEFAULT_SEED};
use ecl_core::EQ_TOL;

#[derive(Parser)]
#[command(
    name = "ecl",
    about = "Approximate equilibria for linear congestion games",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form anarchy/stability bounds on an eps grid.
    Bounds(BoundsArgs),
    /// Generate a lower-bound instance bundle.
    Generate(GenerateArgs),
    /// Verify that a profile or flow is an eps-equilibrium of a game.
    Verify(VerifyArgs),
    /// Compute equilibria or optima of a game.
    Solve(SolveArgs),
    /// Cost ratio of two assignments, or a full bundle audit.
    Ratio(RatioArgs),
    /// Run the full reproduction suite and write its reports.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// Grid as start:end:step, e.g. 0:2:0.05.
    #[arg(long, default_value = "0:2:0.05", value_parser = parse_grid)]
    grid: (f64, f64, f64),
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GenerateArgs {
    /// Instance family.
    #[arg(long, value_enum)]
    family: GenerateFamily,
    /// Approximation factor the family is built for.
    #[arg(long, default_value_t = 0.0, value_parser = parse_epsilon, allow_negative_numbers = true)]
    epsilon: f64,
    /// Flexible player count (atomic-pos) or player count (two-links).
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Fixed player count for atomic-pos; `best` sweeps an integer grid.
    #[arg(long, default_value = "best")]
    lambda: String,
    /// Dominance strictness margin for atomic-pos.
    #[arg(long, default_value_t = 1e-9)]
    delta: f64,
    /// Constant offset of the first link for two-links.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Emit the routing-network realization instead of the strategy-set game
    /// (nonatomic-poa with eps <= 1 only).
    #[arg(long)]
    network: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenerateFamily {
    AtomicPoa,
    NonatomicPoa,
    Pigou,
    AtomicPos,
    TwoLinks,
}

#[derive(Args)]
struct VerifyArgs {
    /// Game file (atomic, non-atomic, or routing network JSON).
    game: PathBuf,
    /// Profile (`choices`) or flow (`weights`) JSON.
    assignment: PathBuf,
    #[arg(long, value_parser = parse_epsilon, allow_negative_numbers = true)]
    epsilon: f64,
}

#[derive(Args)]
struct SolveArgs {
    game: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, default_value_t = 0.0, value_parser = parse_epsilon, allow_negative_numbers = true)]
    epsilon: f64,
    /// Start profile for the dynamics (defaults to every player's first
    /// strategy).
    #[arg(long)]
    start: Option<PathBuf>,
    /// Move order for `dynamics`.
    #[arg(long, default_value = "first")]
    order: String,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Profile cap for `brute`.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u128,
    /// Worker threads for `brute` (deterministic for any value).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Duality-gap tolerance for the conditional-gradient methods.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Record the per-iteration gap trace (fw methods).
    #[arg(long)]
    trace: bool,
    /// Write the dynamics trace as CSV.
    #[arg(long)]
    trace_csv: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Exhaustive enumeration (atomic).
    Brute,
    /// eps-best-response dynamics (atomic).
    Dynamics,
    /// eps-potential descent (atomic).
    Descent,
    /// Conditional-gradient minimization of the eps-potential (non-atomic).
    FwPotential,
    /// Conditional-gradient minimization of the social cost (non-atomic).
    FwOpt,
}

#[derive(Args)]
struct RatioArgs {
    /// Audit a bundle file instead of explicit assignments.
    #[arg(long, conflicts_with_all = ["game", "numerator", "denominator"])]
    bundle: Option<PathBuf>,
    #[arg(required_unless_present = "bundle")]
    game: Option<PathBuf>,
    #[arg(required_unless_present = "bundle")]
    numerator: Option<PathBuf>,
    #[arg(required_unless_present = "bundle")]
    denominator: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Output directory for report.json, report.csv, and bounds.csv.
    #[arg(short, long, default_value = "reproduction")]
    output: PathBuf,
    /// Comma-separated family subset (default: all).
    #[arg(long, value_delimiter = ',')]
    families: Vec<String>,
    /// Seed for the randomized suites.
    #[arg(long, env = "ECL_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v >= 0.0) {
        return Err(format!("epsilon must be nonnegative, got {v}"));
    }
    Ok(v)
}

fn parse_grid(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected start:end:step".into());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse().map_err(|e| format!("{e}")))
        .collect::<Result<_, _>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !(start >= 0.0) || end < start || !(step > 0.0) {
        return Err(format!("bad grid {start}:{end}:{step}"));
    }
    Ok((start, end, step))
}

/// Round to 6 significant digits for human-readable lines.
fn sig6(x: f64) -> f64 {
    report::round_sig(x, 6)
}

fn write_or_print(output: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn load_json(path: &Path) -> anyhow::Result<serde_json::Value> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Load a game of either kind; routing networks are expanded on the spot and
/// bundle files contribute their embedded game.
fn load_game(path: &Path) -> anyhow::Result<GameForm> {
    let mut value = load_json(path)?;
    if value.get("game").is_some() && value.get("equilibrium").is_some() {
        value = value["game"].take();
    }
    let keys = value
        .as_object()
        .ok_or_else(|| anyhow!("{}: expected a JSON object", path.display()))?;
    if keys.contains_key("players") {
        Ok(GameForm::Atomic(serde_json::from_value(value)?))
    } else if keys.contains_key("edges") {
        let graph: Graph = serde_json::from_value(value)?;
        if graph.commodities.is_empty() {
            bail!("{}: routing network has no commodities", path.display());
        }
        Ok(GameForm::Nonatomic(graph.expand_self(DEFAULT_PATH_CAP)?))
    } else if keys.contains_key("commodities") {
        Ok(GameForm::Nonatomic(serde_json::from_value(value)?))
    } else {
        bail!(
            "{}: not a recognized game schema (needs players, commodities, or edges)",
            path.display()
        )
    }
}

fn load_assignment(path: &Path) -> anyhow::Result<AssignmentForm> {
    let value = load_json(path)?;
    let keys = value
        .as_object()
        .ok_or_else(|| anyhow!("{}: expected a JSON object", path.display()))?;
    if keys.contains_key("choices") {
        Ok(AssignmentForm::Profile(serde_json::from_value(value)?))
    } else if keys.contains_key("weights") {
        Ok(AssignmentForm::Flow(serde_json::from_value(value)?))
    } else {
        bail!(
            "{}: not a profile (choices) or flow (weights)",
            path.display()
        )
    }
}

fn cmd_bounds(args: &BoundsArgs) -> anyhow::Result<i32> {
    let (start, end, step) = args.grid;
    let content = match args.format {
        Format::Csv => report::bounds_csv(start, end, step)?,
        Format::Json => {
            let mut rows = Vec::new();
            let mut k = 0u64;
            loop {
                let eps = start + step * k as f64;
                if eps > end + step * 1e-9 {
                    break;
                }
                rows.push(ecl_core::bounds::bound_report(eps)?);
                k += 1;
            }
            serde_json::to_string_pretty(&rounded_json(&rows))? + "\n"
        }
    };
    write_or_print(&args.output, &content)?;
    Ok(0)
}

fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<i32> {
    if args.network {
        if args.family != GenerateFamily::NonatomicPoa {
            bail!("--network is only available for the nonatomic-poa family");
        }
        let graph = instances::nonatomic_poa_lb_graph(args.epsilon)?;
        let content = serde_json::to_string_pretty(&graph)? + "\n";
        write_or_print(&args.output, &content)?;
        return Ok(0);
    }
    let bundle: InstanceBundle = match args.family {
        GenerateFamily::AtomicPoa => instances::atomic_poa_lb(args.epsilon)?,
        GenerateFamily::NonatomicPoa => instances::nonatomic_poa_lb(args.epsilon)?,
        GenerateFamily::Pigou => instances::pigou(args.epsilon)?,
        GenerateFamily::AtomicPos => {
            let lambda = if args.lambda == "best" {
                instances::pos_best_lambda(args.epsilon, args.n)
            } else {
                args.lambda
                    .parse()
                    .map_err(|e| anyhow!("--lambda takes an integer or `best`: {e}"))?
            };
            instances::atomic_pos_lb(args.epsilon, args.n, lambda, args.delta)?
        }
        GenerateFamily::TwoLinks => instances::two_links(args.n, args.gamma)?,
    };
    let content = serde_json::to_string_pretty(&bundle)? + "\n";
    write_or_print(&args.output, &content)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<i32> {
    let game = load_game(&args.game)?;
    let assignment = load_assignment(&args.assignment)?;
    let (epsilon_star, witness_text) = match (&game, &assignment) {
        (GameForm::Atomic(g), AssignmentForm::Profile(p)) => {
            let report = g.profile_epsilon(p)?;
            let witness = report
                .witness
                .map(|(player, strategy)| {
                    format!("player {player} improves by switching to strategy {strategy}")
                })
                .unwrap_or_else(|| "every player already best-responds".into());
            (report.epsilon_star, witness)
        }
        (GameForm::Nonatomic(g), AssignmentForm::Flow(f)) => {
            let report = g.flow_epsilon(f)?;
            let witness = report
                .witness
                .map(|(commodity, used, cheaper)| {
                    format!("commodity {commodity} uses strategy {used} while {cheaper} is cheaper")
                })
                .unwrap_or_else(|| "every used strategy is cheapest".into());
            (report.epsilon_star, witness)
        }
        (GameForm::Atomic(_), AssignmentForm::Flow(_)) => {
            bail!("atomic game given a flow; expected a profile with `choices`")
        }
        (GameForm::Nonatomic(_), AssignmentForm::Profile(_)) => {
            bail!("non-atomic game given a profile; expected a flow with `weights`")
        }
    };
    if epsilon_star.is_infinite() {
        println!("epsilon_star = unbounded (a zero-cost deviation exists)");
    } else {
        println!("epsilon_star = {}", sig6(epsilon_star));
    }
    println!("witness: {witness_text}");
    if epsilon_star <= args.epsilon + EQ_TOL {
        println!("PASS: an epsilon-equilibrium at epsilon = {}", args.epsilon);
        Ok(0)
    } else {
        println!(
            "FAIL: not an epsilon-equilibrium at epsilon = {}",
            args.epsilon
        );
        Ok(1)
    }
}

fn default_start(game: &ecl_core::atomic::AtomicGame) -> Profile {
    Profile::new(vec![0; game.num_players()])
}

fn load_start(args: &SolveArgs, game: &ecl_core::atomic::AtomicGame) -> anyhow::Result<Profile> {
    match &args.start {
        None => Ok(default_start(game)),
        Some(path) => match load_assignment(path)? {
            AssignmentForm::Profile(p) => Ok(p),
            AssignmentForm::Flow(_) => bail!("start must be a profile for atomic dynamics"),
        },
    }
}

fn dynamics_output(args: &SolveArgs, trace: &DynamicsTrace) -> anyhow::Result<()> {
    if let Some(path) = &args.trace_csv {
        let mut file =
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        trace.write_csv(&mut file)?;
    }
    if args.output.is_some() {
        let content = serde_json::to_string_pretty(&rounded_json(trace))? + "\n";
        write_or_print(&args.output, &content)?;
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> anyhow::Result<i32> {
    let game = load_game(&args.game)?;
    match (args.method, game) {
        (Method::Brute, GameForm::Atomic(game)) => {
            let set = brute_force_with(&game, args.epsilon, args.cap, args.jobs)?;
            println!(
                "profiles: {} equilibria: {} poa: {} pos: {} opt_cost: {}",
                game.profile_count(),
                set.equilibria.len(),
                sig6(set.poa),
                sig6(set.pos),
                sig6(set.opt_cost)
            );
            if args.output.is_some() {
                let content = serde_json::to_string_pretty(&rounded_json(&set))? + "\n";
                write_or_print(&args.output, &content)?;
            }
            Ok(0)
        }
        (Method::Dynamics, GameForm::Atomic(game)) => {
            let start = load_start(args, &game)?;
            let rule: MoveRule = args.order.parse()?;
            let trace = epsilon_best_response(&game, &start, args.epsilon, rule, args.max_steps)?;
            println!(
                "steps: {} converged: {} terminal: {:?}",
                trace.steps.len(),
                trace.converged,
                trace.terminal.choices
            );
            dynamics_output(args, &trace)?;
            Ok(0)
        }
        (Method::Descent, GameForm::Atomic(game)) => {
            let start = load_start(args, &game)?;
            let trace = potential_descent(&game, &start, args.epsilon, args.max_steps)?;
            println!(
                "steps: {} converged: {} terminal: {:?}",
                trace.steps.len(),
                trace.converged,
                trace.terminal.choices
            );
            dynamics_output(args, &trace)?;
            Ok(0)
        }
        (Method::FwPotential | Method::FwOpt, GameForm::Nonatomic(game)) => {
            let objective = match args.method {
                Method::FwPotential => Objective::Potential { eps: args.epsilon },
                _ => Objective::SocialCost,
            };
            let options = SolveOptions {
                tol: args.tol,
                max_iter: args.max_iter,
                record_trace: args.trace,
            };
            let result = minimize(&game, objective, &options)?;
            println!(
                "objective: {} gap: {:e} iterations: {} converged: {}",
                sig6(result.objective),
                result.duality_gap,
                result.iterations,
                result.converged
            );
            if args.output.is_some() {
                let content = serde_json::to_string_pretty(&rounded_json(&result))? + "\n";
                write_or_print(&args.output, &content)?;
            }
            Ok(0)
        }
        (Method::Brute | Method::Dynamics | Method::Descent, GameForm::Nonatomic(_)) => {
            bail!("method needs an atomic game (players), got a non-atomic one")
        }
        (Method::FwPotential | Method::FwOpt, GameForm::Atomic(_)) => {
            bail!("method needs a non-atomic game (commodities), got an atomic one")
        }
    }
}

fn social_cost(game: &GameForm, assignment: &AssignmentForm) -> anyhow::Result<f64> {
    match (game, assignment) {
        (GameForm::Atomic(g), AssignmentForm::Profile(p)) => Ok(g.social_cost(p)?),
        (GameForm::Nonatomic(g), AssignmentForm::Flow(f)) => Ok(g.social_cost(f)?),
        _ => bail!("assignment kind does not match the game kind"),
    }
}

fn cmd_ratio(args: &RatioArgs) -> anyhow::Result<i32> {
    if let Some(path) = &args.bundle {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let bundle: InstanceBundle =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let check = bundle.check()?;
        println!(
            "family: {} expected_epsilon: {} measured_epsilon: {} expected_ratio: {} measured_ratio: {}",
            bundle.metadata.family,
            sig6(bundle.expected_epsilon),
            sig6(check.measured_epsilon),
            sig6(bundle.expected_ratio),
            sig6(check.measured_ratio),
        );
        return if check.epsilon_ok && check.ratio_ok {
            println!("PASS: bundle verifies");
            Ok(0)
        } else {
            println!("FAIL: bundle does not reproduce its expected values");
            Ok(1)
        };
    }
    let game = load_game(args.game.as_ref().expect("required by clap"))?;
    let numerator = load_assignment(args.numerator.as_ref().expect("required by clap"))?;
    let denominator = load_assignment(args.denominator.as_ref().expect("required by clap"))?;
    let top = social_cost(&game, &numerator)?;
    let bottom = social_cost(&game, &denominator)?;
    if bottom <= 0.0 {
        bail!("denominator assignment has zero social cost; ratio undefined");
    }
    println!(
        "cost: {} / {} ratio: {}",
        sig6(top),
        sig6(bottom),
        sig6(top / bottom)
    );
    Ok(0)
}

fn cmd_reproduce(args: &ReproduceArgs) -> anyhow::Result<i32> {
    let families: Vec<Family> = if args.families.is_empty() {
        Family::all()
    } else {
        args.families
            .iter()
            .map(|name| name.parse())
            .collect::<ecl_core::Result<_>>()?
    };
    let report = report::run(&families, args.seed)?;
    std::fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    let json_path = args.output.join("report.json");
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&report.to_json_value())? + "\n",
    )?;
    let csv_path = args.output.join("report.csv");
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    std::fs::write(&csv_path, csv)?;
    let bounds_path = args.output.join("bounds.csv");
    std::fs::write(&bounds_path, report::bounds_csv(0.0, 3.0, 0.1)?)?;

    for row in &report.rows {
        println!(
            "[{}] {} | {} (expected {}, measured {}, tol {})",
            if row.pass { "pass" } else { "FAIL" },
            row.family,
            row.case,
            sig6(row.expected),
            sig6(row.measured),
            row.tolerance
        );
    }
    let failing = report.failing();
    println!(
        "{} checks across {} families; {} failing; seed {}",
        report.rows.len(),
        families.len(),
        failing.len(),
        report.seed
    );
    println!(
        "wrote {}, {}, {}",
        json_path.display(),
        csv_path.display(),
        bounds_path.display()
    );
    if failing.is_empty() {
        Ok(0)
    } else {
        let mut stderr = std::io::stderr();
        for row in failing {
            writeln!(stderr, "failing: {} | {}", row.family, row.case)?;
        }
        Ok(1)
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Ratio(args) => cmd_ratio(args),
        Command::Reproduce(args) => cmd_reproduce(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(error) => {
            eprintln!("error: {error:#}");
            std::process::exit(2);
        }
    }
}
